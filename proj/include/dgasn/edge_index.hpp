#pragma once

#include <utility>
#include <vector>

namespace dgasn {

// Directed message slots grouped by destination node. Every undirected edge
// contributes both orientations, and every node gets a self-slot, so the
// aggregation set of node i is always N(i) plus i itself.
struct EdgeIndex {
    std::vector<int> src;          // source node per slot
    std::vector<int> dst;          // destination node per slot
    std::vector<int> seg_offsets;  // size n+1; slots [seg_offsets[i], seg_offsets[i+1]) have dst == i
    // Slot positions of the two orientations of each stored undirected edge
    // (u,v) with u<v: fwd is dst=u,src=v (importance of v to u), bwd the reverse.
    std::vector<int> fwd_slot;
    std::vector<int> bwd_slot;

    int num_nodes() const { return static_cast<int>(seg_offsets.size()) - 1; }
    int num_slots() const { return static_cast<int>(src.size()); }

    static EdgeIndex build(int n, const std::vector<std::pair<int, int>>& und_edges);
};

}  // namespace dgasn
