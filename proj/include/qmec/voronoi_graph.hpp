#pragma once

#include <functional>
#include <vector>

#include "qmec/geom.hpp"
#include "qmec/triangulation.hpp"

namespace qmec {

struct VorVertex {
    enum Kind : std::uint8_t { VORONOI = 0, ARTIFICIAL = 1 };
    Point pos;
    double radius = 0.0;
    Kind kind = VORONOI;
    std::vector<int> sites;  // ccw around pos
};

// u -> v; v == -1 marks the ray past an artificial vertex (direction `dir`).
// `left` is the site to the left when walking u -> v.
struct VorEdge {
    int u = -1, v = -1;
    int left = -1, right = -1;
    Point dir;  // unit, only for rays

    bool is_ray() const { return v < 0; }
};

// A point on the graph: a vertex, or an edge with parameter t
// (t in [0,1] for finite edges, t >= 0 along a ray).
struct GraphPos {
    int vertex = -1;
    int edge = -1;
    double t = 0.0;

    static GraphPos at_vertex(int v) { return {v, -1, 0.0}; }
    static GraphPos on_edge(int e, double t) { return {-1, e, t}; }
};

struct UniquePath {
    std::vector<int> vertices;  // graph vertices passed, in order
    std::vector<int> edges;     // edges used, in order
};

class VoronoiGraph {
public:
    static VoronoiGraph build(const std::vector<Point>& sites, std::uint64_t seed = 1);

    const std::vector<Point>& sites() const { return sites_; }
    const std::vector<VorVertex>& vertices() const { return verts_; }
    const std::vector<VorEdge>& edges() const { return edges_; }
    // incident edges of a vertex in ccw order (rays included)
    const std::vector<int>& incident(int v) const { return adj_[v]; }
    const std::vector<int>& hull() const { return hull_; }  // ccw site ids
    const Triangulation& delaunay() const { return tri_; }
    int num_voronoi() const { return num_voronoi_; }
    double artificial_distance() const { return art_dist_; }

    int other(int e, int v) const { return edges_[e].u == v ? edges_[e].v : edges_[e].u; }
    Point point(const GraphPos& x) const;
    Point edge_point(int e, double t) const;
    double radius_at(const GraphPos& x) const;
    Circle mec(int v) const { return {verts_[v].pos, verts_[v].radius}; }
    Circle mec(const GraphPos& x) const { return {point(x), radius_at(x)}; }

    int nearest_site(Point p, int hint = -1) const;
    // MEC at a point that must lie on the graph (PointNotOnGraph otherwise)
    Circle mec_at(Point x) const;
    // parameter of the edge point nearest to p (clamped)
    double project(int e, Point p) const;

    // edge leaving c toward c'; NonOverlappingMecs when the MECs share no interior
    int next_step(const GraphPos& c, const GraphPos& cp) const;
    UniquePath unique_path(const GraphPos& c, const GraphPos& cp) const;
    // Walk the unique path, calling visit(vertex) for each graph vertex passed
    // (c and c' included when they are vertices). Stops early when visit
    // returns false; returns false in that case.
    bool walk_path(const GraphPos& c, const GraphPos& cp, const std::function<bool(int)>& visit) const;

    // checks condition (i) and (ii) of the artificial vertices
    bool artificial_conditions_hold() const;

    bool inside_hull(Point q) const;       // strictly inside
    Point outward_witness(Point q) const;  // for q outside or on the hull

private:
    std::vector<Point> sites_;
    Triangulation tri_;
    std::vector<VorVertex> verts_;
    std::vector<VorEdge> edges_;
    std::vector<std::vector<int>> adj_;
    std::vector<int> hull_;
    std::vector<int> tri_class_;
    int num_voronoi_ = 0;
    double art_dist_ = 0.0;

    void place_artificial(double D);
};

}  // namespace qmec
