#pragma once

#include <vector>

#include "dgasn/autodiff.hpp"
#include "dgasn/graph.hpp"
#include "dgasn/model.hpp"

namespace dgasn {

// Per-layer pre-softmax attention logits for the stored undirected edges,
// averaged over heads. fwd is the (vi,vj) orientation of the stored (i<j)
// pair, bwd the reverse; both are |E| x 1 Values on the tape.
struct AttentionTrace {
    std::vector<ad::Value> fwd;  // one per layer
    std::vector<ad::Value> bwd;
};

inline constexpr double kLeakyReluSlope = 0.2;

struct GatLayerOut {
    ad::Value h;                              // n x (heads * head_dim)
    std::vector<ad::Value> head_slot_logits;  // per head, slots x 1, post-LeakyReLU
};

// One multi-head GAT layer: per head, messages W h, slot logits
// LeakyReLU(a^T [m_dst || m_src]), softmax over each destination segment
// (self-slot included), weighted sum, ELU; head outputs concatenated.
GatLayerOut gat_layer(ad::Tape& tape, ad::Value h_prev, const EdgeIndex& edges,
                      const std::vector<std::pair<ad::Value, ad::Value>>& head_params,
                      double leaky_slope = kLeakyReluSlope);

struct EncodeResult {
    ad::Value h;  // n x (heads * head_dim of the last layer)
    AttentionTrace trace;
};

// Stacks L gat_layer applications starting from the raw attributes. The
// param Values must already live on the tape (one (W, a) pair per head per
// layer, matching ModelParams order).
EncodeResult encode(ad::Tape& tape, const Graph& graph,
                    const std::vector<std::vector<std::pair<ad::Value, ad::Value>>>& layer_params,
                    double leaky_slope = kLeakyReluSlope);

}  // namespace dgasn
