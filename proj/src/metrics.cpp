#include "dgasn/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>

namespace dgasn {

double auc(const ScoredEdges& scored) {
    const size_t n = scored.scores.size();
    if (n != scored.labels.size()) throw MetricError("auc: score/label length mismatch");
    size_t pos = 0;
    for (uint8_t l : scored.labels) pos += l;
    const size_t neg = n - pos;
    if (pos == 0 || neg == 0) throw MetricError("auc: needs at least one positive and one negative");

    std::vector<size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](size_t a, size_t b) { return scored.scores[a] < scored.scores[b]; });

    // Sum of positive-pair wins plus half credit for ties, via tie groups.
    double wins = 0.0;
    size_t neg_below = 0;
    size_t i = 0;
    while (i < n) {
        size_t j = i;
        size_t group_pos = 0, group_neg = 0;
        while (j < n && scored.scores[order[j]] == scored.scores[order[i]]) {
            (scored.labels[order[j]] ? group_pos : group_neg)++;
            ++j;
        }
        wins += static_cast<double>(group_pos) * neg_below;
        wins += 0.5 * static_cast<double>(group_pos) * group_neg;
        neg_below += group_neg;
        i = j;
    }
    return wins / (static_cast<double>(pos) * static_cast<double>(neg));
}

double average_precision(const ScoredEdges& scored) {
    const size_t n = scored.scores.size();
    if (n != scored.labels.size()) throw MetricError("ap: score/label length mismatch");
    size_t total_pos = 0;
    for (uint8_t l : scored.labels) total_pos += l;
    if (total_pos == 0) throw MetricError("ap: needs at least one positive");

    std::vector<size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](size_t a, size_t b) { return scored.scores[a] > scored.scores[b]; });

    double ap = 0.0;
    size_t tp = 0, seen = 0;
    double prev_recall = 0.0;
    size_t i = 0;
    while (i < n) {
        size_t j = i;
        while (j < n && scored.scores[order[j]] == scored.scores[order[i]]) {
            tp += scored.labels[order[j]];
            ++seen;
            ++j;
        }
        const double recall = static_cast<double>(tp) / total_pos;
        const double precision = static_cast<double>(tp) / seen;
        ap += (recall - prev_recall) * precision;
        prev_recall = recall;
        i = j;
    }
    return ap;
}

TargetMetrics evaluate_target(const std::vector<double>& homophilous_scores,
                              const std::vector<uint8_t>& edge_labels) {
    ScoredEdges s;
    s.scores.reserve(homophilous_scores.size());
    s.labels.reserve(edge_labels.size());
    for (double z : homophilous_scores) s.scores.push_back(1.0 - z);
    for (uint8_t z : edge_labels) s.labels.push_back(static_cast<uint8_t>(1 - z));
    return TargetMetrics{auc(s), average_precision(s)};
}

namespace {

constexpr int kBins = 50;

void write_histogram(std::ofstream& f, const char* network, const std::vector<double>& stats,
                     const std::vector<uint8_t>& labels) {
    for (int cls = 0; cls <= 1; ++cls) {
        std::vector<long> counts(kBins, 0);
        for (size_t e = 0; e < stats.size(); ++e) {
            if (labels[e] != cls) continue;
            int b = static_cast<int>(stats[e] * kBins);
            b = std::clamp(b, 0, kBins - 1);
            counts[b]++;
        }
        const char* cname = cls ? "homophilous" : "heterophilous";
        for (int b = 0; b < kBins; ++b)
            f << network << "," << cname << "," << static_cast<double>(b) / kBins << ","
              << static_cast<double>(b + 1) / kBins << "," << counts[b] << "\n";
    }
}

}  // namespace

void export_attention_histograms(const std::string& path, const std::vector<double>& source_stats,
                                 const std::vector<uint8_t>& source_labels,
                                 const std::vector<double>& target_stats,
                                 const std::vector<uint8_t>& target_labels) {
    std::ofstream f(path);
    if (!f) throw std::runtime_error("cannot open " + path + " for writing");
    f << "network,class,bin_lo,bin_hi,count\n";
    write_histogram(f, "source", source_stats, source_labels);
    write_histogram(f, "target", target_stats, target_labels);
}

}  // namespace dgasn
