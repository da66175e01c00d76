#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace dgasn {

struct MetricError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ScoredEdges {
    std::vector<double> scores;   // in [0, 1]
    std::vector<uint8_t> labels;  // 1 = positive class
};

// Mann-Whitney AUC with half credit for ties, O(n log n) via tie groups.
double auc(const ScoredEdges& scored);

// AP over distinct-score threshold groups (ties enter together).
double average_precision(const ScoredEdges& scored);

// Positive class = heterophilous: metrics of (1 - z_hat) against (1 - z).
struct TargetMetrics {
    double auc = 0.0;
    double ap = 0.0;
};
TargetMetrics evaluate_target(const std::vector<double>& homophilous_scores,
                              const std::vector<uint8_t>& edge_labels);

// Per-network, per-class histograms of the per-edge attention statistic,
// 50 uniform bins on [0, 1]. Header "network,class,bin_lo,bin_hi,count".
void export_attention_histograms(const std::string& path,
                                 const std::vector<double>& source_stats,
                                 const std::vector<uint8_t>& source_labels,
                                 const std::vector<double>& target_stats,
                                 const std::vector<uint8_t>& target_labels);

}  // namespace dgasn
