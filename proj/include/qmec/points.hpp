#pragma once

#include <cstdint>
#include <limits>
#include <memory>
#include <vector>

#include "qmec/geom.hpp"
#include "qmec/plica.hpp"
#include "qmec/voronoi_graph.hpp"

namespace qmec {

// Bisector frame of a graph edge: points m + s*d, s in [s0, s1], radius sqrt(h^2 + s^2).
// d points from the edge's u end toward v (or along the ray).
struct EdgeFrame {
    Point m, d;
    double h = 0, s0 = 0, s1 = std::numeric_limits<double>::infinity();
};

std::vector<EdgeFrame> edge_frames(const VoronoiGraph& g);

struct QicStats {
    long entries = 0;
    long buckets = 0;
    int max_bucket = 0;  // largest |S_v^r|
    long red_ties = 0;   // guiding vertices with more than one growing edge carrying entries
    long walks = 0;
    long excluded = 0;   // candidates failing the path condition
    void merge(const QicStats& o);
};

struct QicContext {
    const VoronoiGraph* g = nullptr;
    const std::vector<EdgeFrame>* frames = nullptr;
};

// Guiding circles for a set of source vertices, scoped to a vertex subset.
class PointsQiC {
public:
    static PointsQiC build(const QicContext& ctx, const std::vector<int>& scope, const std::vector<int>& sources,
                           QicStats* stats = nullptr);

    // largest MEC containing q; the source vertex's MEC must contain q
    Circle query(const QicContext& ctx, int slot, Point q) const;

    int num_sources() const { return int(src_.size()); }
    int source_vertex(int slot) const { return src_[slot].vertex; }
    std::size_t memory_bytes() const;
    const std::vector<double>& radii() const { return R_; }

    // guiding circles of a source in bucket order, for inspection
    struct Guide {
        int k;       // index into radii()
        int vertex;  // or -1
        int edge;    // or -1
        Circle circle;
    };
    std::vector<Guide> guides(const QicContext& ctx, int slot) const;

    template <class Ar>
    void serialize(Ar& ar) {
        ar(R_, src_, off_, ent_);
    }

    struct Source {
        int vertex = -1;
        int k0 = 0;              // bucket b holds radius R[k0 + b]
        int nb = 0;              // number of buckets
        std::int64_t off = 0;    // into off_ (nb + 1 values)
        std::int64_t ent = 0;    // into ent_
        template <class Ar>
        void serialize(Ar& ar) {
            ar(vertex, k0, nb, off, ent);
        }
    };

private:
    std::vector<double> R_;
    std::vector<Source> src_;
    std::vector<std::uint32_t> off_;
    std::vector<std::int32_t> ent_;  // >= 0: edge*2 + branch, < 0: -1 - vertex

    Circle entry_circle(const QicContext& ctx, std::int32_t code, double r) const;
};

// Best circle centred on edge e that contains q (radius < 0 when none).
Circle tight_on_edge(const QicContext& ctx, int e, Point q);

struct PointsOptions {
    bool gamma = false;
    bool rpart = false;
    int rpart_r = 0;  // 0: ceil(N^(2/3)), N = graph vertices
    std::uint64_t seed = 1;
    double c_sep = 4.0;
};

struct ProbeCount {
    int plica = 0;
    int qic = 0;
};

struct RPartition {
    std::vector<std::vector<int>> parts;  // graph vertex ids
    std::vector<int> boundary;
    std::vector<int> part_of;  // -1 for boundary vertices
};

// r-partition by recursive separation; boundary = all separator vertices.
RPartition build_rpartition(const VoronoiGraph& g, int r);

struct PointsStats {
    int depth = 0;
    int nodes = 0;
    double max_sep_ratio = 0;   // |W| / sqrt(|G_t|)
    double max_part_ratio = 0;  // max(|A|,|B|) / |G_t|
    bool sep_ok = true;
    QicStats qic;
    QicStats rpart_qic;
    int rpart_r = 0;
    int rpart_parts = 0;
    int rpart_boundary = 0;
    int rpart_max_part = 0;
};

class PointsIndex {
public:
    static PointsIndex build(const std::vector<Point>& sites, const PointsOptions& opt = {});

    QueryResult query(Point q, ProbeCount* probes = nullptr) const;
    QueryResult gamma_query(Point q, ProbeCount* probes = nullptr) const;
    QueryResult rpart_query(Point q, ProbeCount* probes = nullptr) const;

    bool has_gamma() const { return !gamma_.empty(); }
    bool has_rpart() const { return has_rpart_; }
    const VoronoiGraph& graph() const { return *g_; }
    const std::vector<Point>& sites() const { return g_->sites(); }
    const PointsStats& stats() const { return stats_; }
    const PointsOptions& options() const { return opt_; }
    std::size_t memory_bytes() const { return base_bytes() + gamma_bytes() + rpart_bytes(); }
    std::size_t base_bytes() const;
    std::size_t gamma_bytes() const;
    std::size_t rpart_bytes() const;

    struct Node {
        std::vector<int> verts, W, A, B;
        int level = 1;
        int left = -1, right = -1;
        // held out of line: most nodes are small and many have neither
        std::shared_ptr<const PlicaIndex> phi, theta;
        PointsQiC qic;
    };
    const std::vector<Node>& nodes() const { return nodes_; }
    const RPartition& rpartition() const { return rp_; }

private:
    std::shared_ptr<VoronoiGraph> g_;
    std::vector<EdgeFrame> frames_;
    PointsOptions opt_;
    PointsStats stats_;
    std::vector<Node> nodes_;

    // GAMMA: gamma_[i] covers owners [0, gamma_count_[i])
    std::vector<PlicaIndex> gamma_;
    std::vector<int> gamma_count_;
    std::vector<std::pair<int, int>> gamma_owner_;  // (node, slot)

    // RPART
    bool has_rpart_ = false;
    RPartition rp_;
    PlicaIndex upsilon_, psi_;
    bool has_upsilon_ = false, has_psi_ = false;
    PointsQiC upsilon_qic_;
    std::vector<PointsQiC> part_qic_;
    std::vector<std::pair<int, int>> psi_owner_;  // (part, slot)

    QicContext ctx() const { return {g_.get(), &frames_}; }
    bool trivial(Point q, QueryResult& out) const;
    int build_node(std::vector<int> verts, int level);
    void attach_locators();

    friend struct PointsIO;
};

}  // namespace qmec
