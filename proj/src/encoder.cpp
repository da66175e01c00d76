#include "dgasn/encoder.hpp"

namespace dgasn {

GatLayerOut gat_layer(ad::Tape& tape, ad::Value h_prev, const EdgeIndex& edges,
                      const std::vector<std::pair<ad::Value, ad::Value>>& head_params,
                      double leaky_slope) {
    GatLayerOut out;
    ad::Value h_cat;
    for (size_t k = 0; k < head_params.size(); ++k) {
        const auto& [w, a] = head_params[k];
        ad::Value messages = ad::matmul(h_prev, w);  // n x d
        ad::Value m_dst = ad::gather_rows(messages, edges.dst);
        ad::Value m_src = ad::gather_rows(messages, edges.src);
        ad::Value pair = ad::concat_cols(m_dst, m_src);        // slots x 2d
        ad::Value logits = ad::leaky_relu(ad::matmul(pair, a), leaky_slope);
        ad::Value weights = ad::segment_softmax(logits, edges);
        ad::Value agg = ad::segment_weighted_sum(weights, m_src, edges);
        ad::Value h_head = ad::elu(agg);
        out.head_slot_logits.push_back(logits);
        h_cat = (k == 0) ? h_head : ad::concat_cols(h_cat, h_head);
    }
    out.h = h_cat;
    return out;
}

EncodeResult encode(ad::Tape& tape, const Graph& graph,
                    const std::vector<std::vector<std::pair<ad::Value, ad::Value>>>& layer_params,
                    double leaky_slope) {
    EncodeResult res;
    ad::Value h = tape.leaf(graph.dense_attrs());
    for (const auto& heads : layer_params) {
        GatLayerOut lo = gat_layer(tape, h, graph.edge_index, heads, leaky_slope);
        h = lo.h;
        ad::Value mean_logits = ad::mean_over_group(lo.head_slot_logits);
        res.trace.fwd.push_back(ad::gather_rows(mean_logits, graph.edge_index.fwd_slot));
        res.trace.bwd.push_back(ad::gather_rows(mean_logits, graph.edge_index.bwd_slot));
    }
    res.h = h;
    return res;
}

}  // namespace dgasn
