#pragma once

#include <vector>

namespace qmec {

class VoronoiGraph;

// Plane graph given by a rotation system: adj[v] lists neighbours in ccw order.
struct PlaneGraph {
    std::vector<std::vector<int>> adj;
    int size() const { return int(adj.size()); }
};

struct Separation {
    std::vector<int> A, B, W;
};

struct SeparatorStats {
    int levels = 0;        // BFS depth of the component that was cut
    bool used_cycle = false;
    bool euler_ok = true;  // embedding check on the contracted graph
};

// Lipton-Tarjan: no A-B edge, |A|,|B| <= 2n/3, |W| <= 2*sqrt(2n) + 1.
Separation planar_separator(const PlaneGraph& g, SeparatorStats* stats = nullptr);

// Subgraph of the finite part of g induced by `verts` (rays dropped);
// local id i stands for verts[i].
PlaneGraph induced_subgraph(const VoronoiGraph& g, const std::vector<int>& verts);

}  // namespace qmec
