#pragma once

#include <string>
#include <vector>

#include "dgasn/autodiff.hpp"
#include "dgasn/model.hpp"

namespace dgasn {

enum class EdgeOperator { concatenate, hadamard, average, l1, l2 };

EdgeOperator parse_edge_operator(const std::string& name);
std::string edge_operator_name(EdgeOperator op);
int edge_embed_dim(EdgeOperator op, int node_dim);

// Per stored pair (i,j) with i<j: concatenate [h_i || h_j], hadamard h_i*h_j,
// average (h_i+h_j)/2, l1 |h_i-h_j|, l2 (h_i-h_j)^2 elementwise.
ad::Value edge_embed(ad::Tape& tape, ad::Value h, const std::vector<std::pair<int, int>>& pairs,
                     EdgeOperator op);

// Tape-resident MLP parameters (leaves inserted from ModelParams).
using MlpValues = std::vector<std::pair<ad::Value, ad::Value>>;

// Hidden layers use ReLU; returns pre-sigmoid logits of the last layer.
ad::Value mlp_logits(ad::Tape& tape, ad::Value x, const MlpValues& mlp);

ad::Value node_classify(ad::Tape& tape, ad::Value h, const MlpValues& node_head);
ad::Value edge_classify(ad::Tape& tape, ad::Value e, const MlpValues& edge_head);
// Applies grad_reverse(e, lambda) before the discriminator MLP.
ad::Value domain_discriminate(ad::Tape& tape, ad::Value e, const MlpValues& domain_head,
                              double lambda);

}  // namespace dgasn
