#include "dgasn/graph.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <random>
#include <set>
#include <sstream>

#include "dgasn/rng.hpp"
#include "json.hpp"

namespace fs = std::filesystem;

namespace dgasn {

EdgeIndex EdgeIndex::build(int n, const std::vector<std::pair<int, int>>& und_edges) {
    EdgeIndex ei;
    // Per-node slot lists: self-slot first, then neighbors in edge order.
    std::vector<std::vector<int>> nbr(n);
    for (int e = 0; e < static_cast<int>(und_edges.size()); ++e) {
        nbr[und_edges[e].first].push_back(und_edges[e].second);
        nbr[und_edges[e].second].push_back(und_edges[e].first);
    }
    ei.seg_offsets.resize(n + 1);
    int total = 0;
    for (int i = 0; i < n; ++i) {
        ei.seg_offsets[i] = total;
        total += 1 + static_cast<int>(nbr[i].size());
    }
    ei.seg_offsets[n] = total;
    ei.src.resize(total);
    ei.dst.resize(total);
    std::vector<int> cursor(n);
    for (int i = 0; i < n; ++i) {
        const int base = ei.seg_offsets[i];
        ei.src[base] = i;
        ei.dst[base] = i;
        cursor[i] = base + 1;
        for (int j : nbr[i]) {
            ei.src[cursor[i]] = j;
            ei.dst[cursor[i]] = i;
            ++cursor[i];
        }
    }
    // Locate both orientations of every stored edge.
    ei.fwd_slot.resize(und_edges.size());
    ei.bwd_slot.resize(und_edges.size());
    // Slots within a segment follow edge insertion order, so a per-node
    // cursor recovers them in one pass over the edge list.
    std::vector<int> next(n);
    for (int i = 0; i < n; ++i) next[i] = ei.seg_offsets[i] + 1;
    for (int e = 0; e < static_cast<int>(und_edges.size()); ++e) {
        const auto [u, v] = und_edges[e];
        ei.fwd_slot[e] = next[u]++;  // dst=u, src=v
        ei.bwd_slot[e] = next[v]++;  // dst=v, src=u
    }
    return ei;
}

DenseMatrix Graph::dense_attrs() const {
    DenseMatrix x(n, attr_dim);
    for (int i = 0; i < n; ++i)
        for (int k : attrs[i]) x(i, k) = 1.0;
    return x;
}

Graph Graph::without_labels() const {
    Graph g = *this;
    g.node_labels.assign(n, {});
    g.has_node_labels = false;
    g.edge_labels.clear();
    g.has_edge_labels = false;
    return g;
}

int derive_edge_label(const std::vector<int>& labels_i, const std::vector<int>& labels_j) {
    if (labels_i.empty() || labels_j.empty())
        throw DataError("derive_edge_label: endpoint with no node labels");
    // Label lists are sorted.
    size_t a = 0, b = 0;
    while (a < labels_i.size() && b < labels_j.size()) {
        if (labels_i[a] == labels_j[b]) return 1;
        if (labels_i[a] < labels_j[b])
            ++a;
        else
            ++b;
    }
    return 0;
}

DatasetStats compute_stats(const Graph& g, int self_loops_removed, int duplicates) {
    DatasetStats s;
    s.nodes = g.n;
    s.attrs_dim = g.attr_dim;
    s.label_dim = g.label_dim;
    s.self_loops_removed = self_loops_removed;
    s.duplicates_collapsed = duplicates;
    s.total_edges_raw = g.num_edges() + self_loops_removed;
    if (g.has_edge_labels) {
        for (uint8_t z : g.edge_labels) (z ? s.homophilous : s.heterophilous)++;
    }
    return s;
}

namespace {

std::vector<std::pair<int, int>> read_index_pairs(const fs::path& path, int max_first,
                                                  int max_second, const char* what) {
    std::vector<std::pair<int, int>> out;
    std::ifstream f(path);
    if (!f) throw DataError("cannot open " + path.string());
    std::string line;
    int lineno = 0;
    while (std::getline(f, line)) {
        ++lineno;
        if (line.empty()) continue;
        std::istringstream ss(line);
        long a = -1, b = -1;
        char tab = 0;
        if (!(ss >> a) || !ss.get(tab) || tab != '\t' || !(ss >> b))
            throw DataError(path.string() + ":" + std::to_string(lineno) + ": malformed " + what +
                            " line");
        if (a < 0 || a >= max_first || b < 0 || b >= max_second)
            throw DataError(path.string() + ":" + std::to_string(lineno) + ": index out of range");
        out.emplace_back(static_cast<int>(a), static_cast<int>(b));
    }
    return out;
}

}  // namespace

std::pair<Graph, DatasetStats> load_graph(const std::string& dir) {
    const fs::path root(dir);
    const fs::path meta_path = root / "meta.json";
    std::ifstream meta_file(meta_path);
    if (!meta_file) throw DataError("missing meta.json in " + dir);
    nlohmann::json meta;
    try {
        meta_file >> meta;
    } catch (const nlohmann::json::exception& e) {
        throw DataError("invalid meta.json in " + dir + ": " + e.what());
    }

    Graph g;
    g.n = meta.at("n").get<int>();
    g.attr_dim = meta.at("attr_dim").get<int>();
    g.label_dim = meta.at("label_dim").get<int>();
    if (g.n < 0 || g.attr_dim < 0 || g.label_dim < 0) throw DataError("negative size in meta.json");
    g.attrs.resize(g.n);
    g.node_labels.resize(g.n);

    for (auto [i, k] : read_index_pairs(root / "attrs.tsv", g.n, g.attr_dim, "attrs"))
        g.attrs[i].push_back(k);
    for (auto& a : g.attrs) {
        std::sort(a.begin(), a.end());
        a.erase(std::unique(a.begin(), a.end()), a.end());
    }

    if (fs::exists(root / "labels.tsv")) {
        for (auto [i, c] : read_index_pairs(root / "labels.tsv", g.n, g.label_dim, "labels"))
            g.node_labels[i].push_back(c);
        for (auto& l : g.node_labels) {
            std::sort(l.begin(), l.end());
            l.erase(std::unique(l.begin(), l.end()), l.end());
        }
        g.has_node_labels = true;
        for (int i = 0; i < g.n; ++i)
            if (g.node_labels[i].empty())
                throw DataError("node " + std::to_string(i) + " has no labels in labeled graph");
    }

    int self_loops = 0, duplicates = 0;
    std::set<std::pair<int, int>> seen, self_seen;
    for (auto [i, j] : read_index_pairs(root / "edges.tsv", g.n, g.n, "edges")) {
        if (i == j) {
            if (self_seen.insert({i, j}).second)
                ++self_loops;
            else
                ++duplicates;
            continue;
        }
        auto key = std::minmax(i, j);
        if (seen.insert(key).second)
            g.und_edges.push_back(key);
        else
            ++duplicates;
    }

    if (g.has_node_labels) {
        g.edge_labels.reserve(g.und_edges.size());
        for (auto [i, j] : g.und_edges)
            g.edge_labels.push_back(
                static_cast<uint8_t>(derive_edge_label(g.node_labels[i], g.node_labels[j])));
        g.has_edge_labels = true;
    }

    g.rebuild_edge_index();
    DatasetStats stats = compute_stats(g, self_loops, duplicates);
    return {std::move(g), stats};
}

void save_graph(const std::string& dir, const Graph& g) {
    fs::create_directories(dir);
    const fs::path root(dir);
    {
        nlohmann::json meta;
        meta["n"] = g.n;
        meta["attr_dim"] = g.attr_dim;
        meta["label_dim"] = g.label_dim;
        std::ofstream f(root / "meta.json");
        f << meta.dump(2) << "\n";
    }
    {
        std::ofstream f(root / "edges.tsv");
        for (auto [i, j] : g.und_edges) f << i << "\t" << j << "\n";
    }
    {
        std::ofstream f(root / "attrs.tsv");
        for (int i = 0; i < g.n; ++i)
            for (int k : g.attrs[i]) f << i << "\t" << k << "\n";
    }
    if (g.has_node_labels) {
        std::ofstream f(root / "labels.tsv");
        for (int i = 0; i < g.n; ++i)
            for (int c : g.node_labels[i]) f << i << "\t" << c << "\n";
    }
}

namespace {

Graph synth_one(std::mt19937_64& rng, const SynthParams& p, double flip_rate) {
    Graph g;
    g.n = p.nodes;
    g.attr_dim = p.attr_dim;
    g.label_dim = p.classes;
    g.attrs.resize(g.n);
    g.node_labels.resize(g.n);

    for (int i = 0; i < g.n; ++i) g.node_labels[i] = {i % p.classes};
    g.has_node_labels = true;

    // Class attribute signatures: contiguous bands of the attribute space,
    // noised per node with the given flip rate.
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const int band = std::max(1, p.attr_dim / p.classes);
    for (int i = 0; i < g.n; ++i) {
        const int c = g.node_labels[i][0];
        const int lo = c * band;
        const int hi = std::min(p.attr_dim, lo + band);
        for (int k = 0; k < p.attr_dim; ++k) {
            bool on = (k >= lo && k < hi);
            if (u(rng) < flip_rate) on = !on;
            if (on) g.attrs[i].push_back(k);
        }
    }

    for (int i = 0; i < g.n; ++i)
        for (int j = i + 1; j < g.n; ++j) {
            const bool same = g.node_labels[i][0] == g.node_labels[j][0];
            const double prob = same ? p.intra_class_edge_prob : p.inter_class_edge_prob;
            if (u(rng) < prob) g.und_edges.emplace_back(i, j);
        }

    g.edge_labels.reserve(g.und_edges.size());
    for (auto [i, j] : g.und_edges)
        g.edge_labels.push_back(
            static_cast<uint8_t>(derive_edge_label(g.node_labels[i], g.node_labels[j])));
    g.has_edge_labels = true;
    g.rebuild_edge_index();
    return g;
}

}  // namespace

std::pair<Graph, Graph> synth_pair(uint64_t seed, const SynthParams& params) {
    auto rs = make_rng(seed, "synth/source");
    auto rt = make_rng(seed, "synth/target");
    Graph source = synth_one(rs, params, params.source_flip_rate);
    Graph target = synth_one(rt, params, params.target_flip_rate);
    return {std::move(source), std::move(target)};
}

}  // namespace dgasn
