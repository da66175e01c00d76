#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "dgasn/edge_index.hpp"
#include "dgasn/matrix.hpp"

namespace dgasn {

struct DataError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Immutable attributed undirected graph. Edge labels, when present, follow
// the node-label agreement rule: 1 if the endpoints share at least one label,
// 0 if their label sets are disjoint.
struct Graph {
    int n = 0;
    int attr_dim = 0;
    int label_dim = 0;
    std::vector<std::vector<int>> attrs;        // per node, sorted attribute indices (X_ik = 1)
    std::vector<std::vector<int>> node_labels;  // per node, sorted label ids; empty vector = unlabeled
    bool has_node_labels = false;
    std::vector<std::pair<int, int>> und_edges;  // canonical i<j, no self pairs, no duplicates
    std::vector<uint8_t> edge_labels;            // per und_edge; 1 homophilous, 0 heterophilous
    bool has_edge_labels = false;
    EdgeIndex edge_index;

    int num_edges() const { return static_cast<int>(und_edges.size()); }
    DenseMatrix dense_attrs() const;

    // Copy with node and edge labels removed (what the trainer sees of the target).
    Graph without_labels() const;

    void rebuild_edge_index() { edge_index = EdgeIndex::build(n, und_edges); }
};

struct DatasetStats {
    int nodes = 0;
    int attrs_dim = 0;
    int label_dim = 0;
    int total_edges_raw = 0;  // unique undirected pairs plus unique self-loops
    int self_loops_removed = 0;
    int homophilous = 0;
    int heterophilous = 0;
    int duplicates_collapsed = 0;  // not part of the raw-edge identity
};

// 1 iff the two multi-hot label sets overlap. Throws DataError on an
// unlabeled endpoint, where the rule is undefined.
int derive_edge_label(const std::vector<int>& labels_i, const std::vector<int>& labels_j);

// Directory format: meta.json {n, attr_dim, label_dim}; edges.tsv "i\tj";
// attrs.tsv "i\tk"; optional labels.tsv "i\tc". All indices 0-based.
std::pair<Graph, DatasetStats> load_graph(const std::string& dir);
void save_graph(const std::string& dir, const Graph& g);
DatasetStats compute_stats(const Graph& g, int self_loops_removed = 0, int duplicates = 0);

struct SynthParams {
    int nodes = 200;
    int classes = 3;
    int attr_dim = 32;
    double intra_class_edge_prob = 0.03;
    double inter_class_edge_prob = 0.015;
    double source_flip_rate = 0.05;  // per-bit noise on the class attribute signature
    double target_flip_rate = 0.40;
};

// Stochastic-block-model pair with class attribute signatures. Both graphs
// are fully labeled; the trainer is responsible for stripping target labels.
std::pair<Graph, Graph> synth_pair(uint64_t seed, const SynthParams& params);

}  // namespace dgasn
