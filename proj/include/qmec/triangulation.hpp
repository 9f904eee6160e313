#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "qmec/geom.hpp"

namespace qmec {

// Incremental Delaunay / regular triangulation with ghost triangles.
// Triangles are ccw; a ghost triangle has exactly one vertex equal to kGhost.
// nb[i] is the neighbour across the edge opposite v[i].
class Triangulation {
public:
    static constexpr int kGhost = -1;

    struct Tri {
        std::array<int, 3> v;
        std::array<int, 3> nb;
    };

    // Throws AllCollinear / TooFewSites. Duplicate points throw DuplicateSites.
    static Triangulation delaunay(const std::vector<Point>& pts, std::uint64_t seed = 1);
    // Weighted (power) version. Lifted height is |p|^2 - w. Redundant points
    // are left out; equal centres are not allowed.
    static Triangulation regular(const std::vector<Point>& pts, const std::vector<double>& w,
                                 std::uint64_t seed = 1);

    const std::vector<Point>& points() const { return pts_; }
    const std::vector<double>& weights() const { return w_; }
    bool weighted() const { return weighted_; }
    const std::vector<Tri>& tris() const { return tris_; }
    bool is_ghost(int t) const;
    bool is_vertex(int i) const { return vertex_tri_[i] >= 0; }
    int vertex_tri(int i) const { return vertex_tri_[i]; }

    // Walk to the triangle containing p (a ghost if p is outside the hull).
    int locate(Point p, int hint = -1) const;

    // Union of finite triangles sharing a common circumcircle (power circle
    // when weighted). Returns class id per triangle, -1 for ghosts.
    std::vector<int> triangle_classes(int* num_classes) const;

    // ccw-rotating list of triangles around vertex i, starting anywhere.
    std::vector<int> star(int i) const;

    // sign of the conflict test of point index p against triangle t
    bool conflicts(int t, int p) const;

private:
    std::vector<Point> pts_;
    std::vector<double> w_;
    bool weighted_ = false;
    std::vector<Tri> tris_;
    std::vector<int> vertex_tri_;

    void run(std::uint64_t seed);
    int side_test(int t, int p) const;
    bool on_circle(int t, int p) const;
};

// Spatial sort along a Hilbert curve (in-place on an index list).
void hilbert_sort(const std::vector<Point>& pts, std::vector<int>& idx);

}  // namespace qmec
