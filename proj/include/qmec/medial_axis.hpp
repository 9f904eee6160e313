#pragma once

#include <array>
#include <vector>

#include "qmec/geom.hpp"

namespace qmec {

struct MedialOptions {
    // strict: clockwise input and clearance minima at axis nodes are errors
    bool strict = false;
};

// Validated polygon: ccw, simple, snapped to the integer grid used by the
// segment Voronoi builder, straight-angle vertices dropped.
struct CheckedPolygon {
    std::vector<Point> pts;
    double scale = 1.0;     // grid step is 1/scale
    bool reversed = false;  // input was clockwise
    int dropped = 0;        // collinear vertices removed
};
CheckedPolygon check_polygon(const std::vector<Point>& in, const MedialOptions& opt = {});
bool is_convex_ccw(const std::vector<Point>& pts);

// One smooth piece of an axis edge. Straight pieces are bisectors of two
// edges or of two vertices; curved ones are parabolas (vertex focus, edge
// directrix). Local parameter u runs over [0,1] from p0 to p1.
struct AxisPiece {
    Point p0, p1;
    Feature f1, f2;
    bool curved = false;
    ParabolicArc arc;  // curved only; arc.t0 at p0, arc.t1 at p1

    Point at(double u) const;
    double clearance(double u) const;
    Circle mec(double u) const { return {at(u), clearance(u)}; }
    // derivative of the clearance per unit arc length, in direction of u
    double slope(double u) const;
    // u in (0,1) where the clearance is smallest, or -1 if it is monotone
    double min_param() const;
    AxisPiece reversed() const;
};

struct MANode {
    enum Kind : std::uint8_t { LEAF = 0, INTERNAL = 1 };
    Point pos;
    double clearance = 0.0;
    Kind kind = INTERNAL;
    int vertex = -1;  // polygon vertex of a leaf
};

struct MAEdge {
    int u = -1, v = -1;
    std::vector<AxisPiece> pieces;  // ordered u -> v
};

// A point on the axis: edge plus s in [0, #pieces]; the integer part picks
// the piece, the fraction is its local parameter.
struct AxisPos {
    int edge = -1;
    double s = 0.0;
};

struct ValleyPoint {
    AxisPos pos;
    Circle mec;
    std::array<Point, 2> chord;       // contact points, diametrically opposed
    std::array<int, 2> mountains{-1, -1};  // u side, v side of the edge
};

class MedialAxisTree {
public:
    static MedialAxisTree build(const std::vector<Point>& polygon, const MedialOptions& opt = {});

    const CheckedPolygon& polygon() const { return poly_; }
    const std::vector<MANode>& nodes() const { return nodes_; }
    const std::vector<MAEdge>& edges() const { return edges_; }
    const std::vector<int>& incident(int v) const { return adj_[v]; }
    int other(int e, int v) const { return edges_[e].u == v ? edges_[e].v : edges_[e].u; }
    int root() const { return root_; }
    int parent(int v) const { return parent_[v]; }
    int num_internal() const { return num_internal_; }

    const AxisPiece& piece(AxisPos x, double* u) const;
    Point point(AxisPos x) const;
    double clearance(AxisPos x) const;
    Circle mec(AxisPos x) const { return {point(x), clearance(x)}; }
    Circle mec(int node) const { return {nodes_[node].pos, nodes_[node].clearance}; }
    // position of a node as an edge end
    AxisPos node_pos(int node, int edge) const;
    double edge_end(int e) const { return double(edges_[e].pieces.size()); }
    // clearance derivative at node v going into edge e
    double leaving_slope(int v, int e) const;
    std::vector<Feature> features() const;

private:
    CheckedPolygon poly_;
    std::vector<MANode> nodes_;
    std::vector<MAEdge> edges_;
    std::vector<std::vector<int>> adj_;
    std::vector<int> parent_;
    int root_ = -1;
    int num_internal_ = 0;
};

// Valleys (edge-interior clearance minima, plateaus collapsed to their
// midpoint) and peaks (internal nodes that are local maxima; a plateau of
// equal nodes is represented by its smallest id).
struct Landscape {
    std::vector<ValleyPoint> valleys;
    std::vector<int> peaks;
    std::vector<int> node_minima;  // degenerate: every branch rises from the node
};
Landscape classify_valleys_peaks(const MedialAxisTree& m, const MedialOptions& opt = {});

// The axis cut at valleys (and at node minima) into mountains, each rooted
// at its highest node. Forest vertices ("mnodes") are axis nodes, with one
// copy per side at each cut.
class MountainForest {
public:
    struct MNode {
        Point pos;
        double r = 0.0;
        int axis_node = -1;  // -1 for a valley copy
        int valley = -1;
        int mountain = -1;
        int parent = -1;
        int up_seg = -1;  // segment toward the parent
        int depth = 0;
    };
    // part of an axis edge inside one mountain; lo/hi are its ends by s
    struct MSeg {
        int edge = -1;
        double s_lo = 0.0, s_hi = 0.0;
        int lo = -1, hi = -1;  // mnodes
        bool hi_is_parent = true;
        int mountain = -1;
    };
    struct Mountain {
        int root = -1;        // mnode
        int peak_node = -1;   // axis node
        std::vector<int> mnodes;
        std::vector<int> valleys;
    };

    // also fills in the mountains on each side of every valley
    static MountainForest build(const MedialAxisTree& m, Landscape& land);

    const std::vector<MNode>& mnodes() const { return mn_; }
    const std::vector<MSeg>& segs() const { return seg_; }
    const std::vector<Mountain>& mountains() const { return mt_; }
    const std::vector<int>& edge_segs(int e) const { return edge_seg_[e]; }
    // segment holding x; at a cut, the one in `mountain` (any when -1)
    int seg_at(AxisPos x, int mountain = -1) const;
    int mountain_at(AxisPos x) const { return seg_[seg_at(x)].mountain; }
    // mountains an axis node belongs to
    std::vector<int> node_mountains(const MedialAxisTree& m, int node) const;

    // Largest MEC centred on `mountain` containing q, given a point x of that
    // mountain whose MEC contains q. Walks toward the peak with binary lifting.
    Circle qim(const MedialAxisTree& m, int mountain, AxisPos x, Point q, int* probes = nullptr) const;
    std::size_t memory_bytes() const;

private:
    std::vector<MNode> mn_;
    std::vector<MSeg> seg_;
    std::vector<Mountain> mt_;
    std::vector<std::vector<int>> edge_seg_;
    std::vector<std::vector<int>> up_;  // up_[k][v]: 2^k-th ancestor
};

// last point of the sub-edge [from, to] (by s, either direction) whose MEC
// contains q, assuming the MEC at `from` does
Circle last_containing(const MedialAxisTree& m, int edge, double from, double to, Point q);

struct SubPolygon {
    int mountain = -1;
    std::vector<Point> pts;  // ccw
};
struct Partition {
    MountainForest forest;
    std::vector<SubPolygon> parts;
};
Partition partition_mountains(const MedialAxisTree& m, Landscape& land);

double polygon_area(const std::vector<Point>& pts);

}  // namespace qmec
