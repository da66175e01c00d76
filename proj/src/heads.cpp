#include "dgasn/heads.hpp"

namespace dgasn {

EdgeOperator parse_edge_operator(const std::string& name) {
    if (name == "concatenate") return EdgeOperator::concatenate;
    if (name == "hadamard") return EdgeOperator::hadamard;
    if (name == "average") return EdgeOperator::average;
    if (name == "l1") return EdgeOperator::l1;
    if (name == "l2") return EdgeOperator::l2;
    throw std::invalid_argument("unknown edge operator: " + name);
}

std::string edge_operator_name(EdgeOperator op) {
    switch (op) {
        case EdgeOperator::concatenate: return "concatenate";
        case EdgeOperator::hadamard: return "hadamard";
        case EdgeOperator::average: return "average";
        case EdgeOperator::l1: return "l1";
        case EdgeOperator::l2: return "l2";
    }
    return "?";
}

int edge_embed_dim(EdgeOperator op, int node_dim) {
    return op == EdgeOperator::concatenate ? 2 * node_dim : node_dim;
}

ad::Value edge_embed(ad::Tape& tape, ad::Value h, const std::vector<std::pair<int, int>>& pairs,
                     EdgeOperator op) {
    std::vector<int> left, right;
    left.reserve(pairs.size());
    right.reserve(pairs.size());
    for (auto [i, j] : pairs) {
        left.push_back(i);
        right.push_back(j);
    }
    ad::Value hi = ad::gather_rows(h, std::move(left));
    ad::Value hj = ad::gather_rows(h, std::move(right));
    switch (op) {
        case EdgeOperator::concatenate: return ad::concat_cols(hi, hj);
        case EdgeOperator::hadamard: return ad::mul(hi, hj);
        case EdgeOperator::average: return ad::scale(ad::add(hi, hj), 0.5);
        case EdgeOperator::l1: return ad::abs(ad::sub(hi, hj));
        case EdgeOperator::l2: {
            ad::Value d = ad::sub(hi, hj);
            return ad::mul(d, d);
        }
    }
    throw std::invalid_argument("edge_embed: bad operator");
}

ad::Value mlp_logits(ad::Tape& tape, ad::Value x, const MlpValues& mlp) {
    ad::Value h = x;
    for (size_t i = 0; i < mlp.size(); ++i) {
        h = ad::add_bias(ad::matmul(h, mlp[i].first), mlp[i].second);
        if (i + 1 < mlp.size()) h = ad::relu(h);
    }
    return h;
}

ad::Value node_classify(ad::Tape& tape, ad::Value h, const MlpValues& node_head) {
    return ad::sigmoid(mlp_logits(tape, h, node_head));
}

ad::Value edge_classify(ad::Tape& tape, ad::Value e, const MlpValues& edge_head) {
    return ad::sigmoid(mlp_logits(tape, e, edge_head));
}

ad::Value domain_discriminate(ad::Tape& tape, ad::Value e, const MlpValues& domain_head,
                              double lambda) {
    return ad::sigmoid(mlp_logits(tape, ad::grad_reverse(e, lambda), domain_head));
}

}  // namespace dgasn
