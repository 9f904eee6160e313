#pragma once

#include <memory>
#include <vector>

#include "qmec/geom.hpp"
#include "qmec/medial_axis.hpp"
#include "qmec/plica.hpp"

namespace qmec {

// Finds the boundary feature nearest to q (an edge, or a reflex corner) and
// the axis point straight behind q as seen from that feature. The MEC there
// touches the feature and contains q, since q lies on its radius.
struct FaceHit {
    Feature feature;
    AxisPos pos;
};

class FaceLocator {
public:
    static FaceLocator build(const MedialAxisTree& m);
    // throws QueryOutsidePolygon unless q is strictly inside
    FaceHit locate(const MedialAxisTree& m, Point q) const;
    int num_faces() const;
    std::size_t memory_bytes() const;

private:
    struct Slot {
        double key_hi;
        int edge, piece;
    };
    struct Impl;
    std::shared_ptr<const Impl> rt_;
    // faces: polygon edges first, then reflex corners
    std::vector<std::vector<Slot>> chain_;
    std::vector<int> corner_face_;  // polygon vertex -> face, or -1
    double tol_ = 0;
};

struct GuideEntry {
    AxisPos pos;
    Circle circle;
    int mountain = -1;
};

struct PolygonQicStats {
    long sets = 0;
    long entries = 0;
    int max_bucket = 0;
    void merge(const PolygonQicStats& o);
};

// Guiding circles of one anchor node over a connected scope of the axis,
// bucketed by radius (only radii >= the anchor's can hold entries).
class GuidingSet {
public:
    // scope: nodes w with mark[w] == tag, plus the edges leaving them
    static GuidingSet build(const MedialAxisTree& m, const MountainForest& f, const std::vector<int>& mark, int tag,
                            int anchor, PolygonQicStats* stats = nullptr);

    // largest MEC centred in scope containing q; q must lie in the anchor's MEC
    Circle query(const MedialAxisTree& m, const MountainForest& f, Point q, int* probes = nullptr) const;

    int anchor() const { return anchor_; }
    const std::vector<double>& radii() const { return R_; }
    int num_buckets() const { return int(R_.size()); }
    std::vector<GuideEntry> bucket(int b) const { return {ent_.begin() + off_[b], ent_.begin() + off_[b + 1]}; }
    int max_bucket() const;
    std::size_t memory_bytes() const;

private:
    int anchor_ = -1;
    Circle anchor_mec_;
    std::vector<double> R_;
    std::vector<int> off_;
    std::vector<GuideEntry> ent_;
};

// Centroid decomposition of the axis tree, one guiding set per centroid.
class CentroidTree {
public:
    struct Node {
        int centroid = -1;
        int parent = -1;
        int depth = 0;
        int size = 0;  // axis nodes in the component
        std::vector<int> children;
        GuidingSet qic;
    };
    static CentroidTree build(const MedialAxisTree& m, const MountainForest& f, PolygonQicStats* stats = nullptr);

    const std::vector<Node>& nodes() const { return nodes_; }
    int root() const { return root_; }
    int of_axis_node(int v) const { return ct_of_[v]; }
    int depth() const;
    // highest centroid on the chain from the root down to v's node whose MEC holds q
    int choose(const MedialAxisTree& m, int v, Point q, int* probes = nullptr) const;
    std::size_t memory_bytes() const;

private:
    std::vector<Node> nodes_;
    std::vector<int> ct_of_;
    int root_ = -1;
};

enum class PolygonBranch { NodeMec = 0, ValleyMec = 1, Locator = 2 };

struct PolygonQueryInfo {
    PolygonBranch branch = PolygonBranch::NodeMec;
    int probes = 0;  // containment tests and point-location calls
};

struct PolygonStats {
    int nodes = 0, internal = 0, edges = 0;
    int valleys = 0, peaks = 0, node_minima = 0, mountains = 0;
    int centroid_depth = 0;
    PolygonQicStats qic;
};

class PolygonIndex {
public:
    static PolygonIndex build(const std::vector<Point>& polygon, const MedialOptions& opt = {});

    Circle query(Point q, PolygonQueryInfo* info = nullptr) const;

    const MedialAxisTree& axis() const { return *m_; }
    const Landscape& landscape() const { return land_; }
    const MountainForest& forest() const { return forest_; }
    const CentroidTree& centroids() const { return ct_; }
    const FaceLocator& locator() const { return loc_; }
    const PolygonStats& stats() const { return stats_; }
    const MedialOptions& options() const { return opt_; }
    std::size_t memory_bytes() const;

private:
    MedialOptions opt_;
    std::shared_ptr<MedialAxisTree> m_;
    Landscape land_;
    MountainForest forest_;
    FaceLocator loc_;
    PlicaIndex node_plica_, valley_plica_;
    bool has_node_plica_ = false, has_valley_plica_ = false;
    std::vector<int> node_of_circle_;
    CentroidTree ct_;
    PolygonStats stats_;
};

Circle polygon_query(const PolygonIndex& idx, Point q);

// Largest MEC centred on one mountain containing q, walking up from a point
// of that mountain whose MEC holds q (PromiseViolated otherwise).
Circle qim_query(const PolygonIndex& idx, int mountain, AxisPos from, Point q);

class ConvexIndex {
public:
    static ConvexIndex build(const std::vector<Point>& polygon);
    Circle query(Point q) const;

    const MedialAxisTree& axis() const { return *m_; }
    const FaceLocator& locator() const { return loc_; }
    int num_faces() const { return loc_.num_faces(); }
    std::size_t memory_bytes() const;

private:
    std::shared_ptr<MedialAxisTree> m_;
    MountainForest forest_;
    FaceLocator loc_;
};

Circle convex_query(const ConvexIndex& idx, Point q);

}  // namespace qmec
