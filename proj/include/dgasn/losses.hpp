#pragma once

#include <cstdint>
#include <vector>

#include "dgasn/autodiff.hpp"
#include "dgasn/encoder.hpp"

namespace dgasn {

struct LossWeights {
    double eta = 1.0;     // weight of the node classification loss
    double xi = 0.1;      // weight of the supervised attention loss
    double lambda = 0.0;  // scheduled weight of the domain loss (via grad reversal)
    double gamma = 5.0;   // cost-sensitive factor on heterophilous attention terms
};

struct LossReport {
    double l_node = 0.0;
    double l_edge = 0.0;
    std::vector<double> l_attn_per_layer;
    double l_attn = 0.0;
    double l_domain = 0.0;
    // Bookkeeping value l_edge + eta*l_node + xi*l_attn - lambda*l_domain;
    // the optimized scalar runs the domain term through the reversal instead.
    double l_total = 0.0;
};

// All losses are built from pre-sigmoid logits in the numerically stable
// branch form; probabilities exist only for reporting and evaluation.

// Mean over rows, sum over columns of the per-class sigmoid cross-entropy.
ad::Value loss_node(ad::Tape& tape, ad::Value logits, const DenseMatrix& targets);

// Mean binary cross-entropy; labels 1 = homophilous.
ad::Value loss_edge(ad::Tape& tape, ad::Value logits, const std::vector<uint8_t>& labels);

// Per-layer supervised attention loss, both orientations, gamma on the
// heterophilous terms, normalized by 2|E|.
ad::Value loss_attention_layer(ad::Tape& tape, ad::Value fwd_logits, ad::Value bwd_logits,
                               const std::vector<uint8_t>& labels, double gamma);

ad::Value loss_attention_total(ad::Tape& tape, const AttentionTrace& trace,
                               const std::vector<uint8_t>& labels, double gamma);

// Mean binary cross-entropy over all edges of both networks; 1 = target.
ad::Value loss_domain(ad::Tape& tape, ad::Value logits, const std::vector<uint8_t>& domain_labels);

// Multi-hot row matrix from per-node label id lists.
DenseMatrix multi_hot(const std::vector<std::vector<int>>& labels, int num_classes);

}  // namespace dgasn
