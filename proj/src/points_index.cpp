#include <algorithm>
#include <cmath>
#include <numeric>

#include "qmec/points.hpp"
#include "qmec/separator.hpp"

namespace qmec {

namespace {

std::vector<Circle> mecs(const VoronoiGraph& g, const std::vector<int>& verts) {
    std::vector<Circle> c;
    c.reserve(verts.size());
    for (int v : verts) c.push_back(g.mec(v));
    return c;
}

std::vector<int> to_global(const std::vector<int>& local, const std::vector<int>& verts) {
    std::vector<int> out;
    out.reserve(local.size());
    for (int i : local) out.push_back(verts[i]);
    return out;
}

}  // namespace

RPartition build_rpartition(const VoronoiGraph& g, int r) {
    const int N = int(g.vertices().size());
    RPartition P;
    P.part_of.assign(N, -1);
    if (r <= 1) {
        // degenerate: every vertex alone, everything with an edge is boundary
        for (int v = 0; v < N; ++v) {
            P.parts.push_back({v});
            bool has_edge = false;
            for (int e : g.incident(v)) has_edge |= !g.edges()[e].is_ray();
            if (has_edge)
                P.boundary.push_back(v);
            else
                P.part_of[v] = v;
        }
        return P;
    }
    std::vector<int> all(N);
    std::iota(all.begin(), all.end(), 0);
    std::vector<std::vector<int>> todo{all}, pieces;
    while (!todo.empty()) {
        auto verts = std::move(todo.back());
        todo.pop_back();
        if (int(verts.size()) <= r) {
            if (!verts.empty()) pieces.push_back(std::move(verts));
            continue;
        }
        auto sep = planar_separator(induced_subgraph(g, verts));
        for (int i : sep.W) P.boundary.push_back(verts[i]);
        todo.push_back(to_global(sep.A, verts));
        todo.push_back(to_global(sep.B, verts));
    }
    // first-fit decreasing into parts of at most r vertices
    std::sort(pieces.begin(), pieces.end(), [](auto& a, auto& b) { return a.size() > b.size(); });
    for (auto& pc : pieces) {
        std::size_t j = 0;
        while (j < P.parts.size() && P.parts[j].size() + pc.size() > std::size_t(r)) ++j;
        if (j == P.parts.size()) P.parts.emplace_back();
        P.parts[j].insert(P.parts[j].end(), pc.begin(), pc.end());
    }
    for (int p = 0; p < int(P.parts.size()); ++p) {
        std::sort(P.parts[p].begin(), P.parts[p].end());
        for (int v : P.parts[p]) P.part_of[v] = p;
    }
    std::sort(P.boundary.begin(), P.boundary.end());
    return P;
}

int PointsIndex::build_node(std::vector<int> verts, int level) {
    const VoronoiGraph& g = *g_;
    int id = int(nodes_.size());
    nodes_.emplace_back();
    auto sep = planar_separator(induced_subgraph(g, verts));
    Node N;
    N.level = level;
    N.W = to_global(sep.W, verts);
    N.A = to_global(sep.A, verts);
    N.B = to_global(sep.B, verts);
    const double n = double(verts.size());
    stats_.max_sep_ratio = std::max(stats_.max_sep_ratio, double(N.W.size()) / std::sqrt(n));
    stats_.max_part_ratio = std::max(stats_.max_part_ratio, double(std::max(N.A.size(), N.B.size())) / n);
    if (double(N.W.size()) > opt_.c_sep * std::sqrt(n) || 3 * std::max(N.A.size(), N.B.size()) > 2 * verts.size())
        stats_.sep_ok = false;
    stats_.depth = std::max(stats_.depth, level);
    N.qic = PointsQiC::build(ctx(), verts, N.W, &stats_.qic);
    N.verts = std::move(verts);
    auto A = N.A, B = N.B;
    nodes_[id] = std::move(N);
    int l = A.empty() ? -1 : build_node(std::move(A), level + 1);
    int r = B.empty() ? -1 : build_node(std::move(B), level + 1);
    nodes_[id].left = l;
    nodes_[id].right = r;
    return id;
}

PointsIndex PointsIndex::build(const std::vector<Point>& sites, const PointsOptions& opt) {
    PointsIndex I;
    I.opt_ = opt;
    I.g_ = std::make_shared<VoronoiGraph>(VoronoiGraph::build(sites, opt.seed));
    const VoronoiGraph& g = *I.g_;
    I.frames_ = edge_frames(g);
    const int N = int(g.vertices().size());
    std::vector<int> all(N);
    std::iota(all.begin(), all.end(), 0);
    I.build_node(all, 1);
    I.stats_.nodes = int(I.nodes_.size());

    if (opt.rpart) {
        I.has_rpart_ = true;
        int r = opt.rpart_r > 0 ? opt.rpart_r : int(std::ceil(std::pow(double(N), 2.0 / 3.0)));
        I.stats_.rpart_r = r;
        I.rp_ = build_rpartition(g, r);
        const RPartition& P = I.rp_;
        I.stats_.rpart_parts = int(P.parts.size());
        I.stats_.rpart_boundary = int(P.boundary.size());
        for (auto& p : P.parts) I.stats_.rpart_max_part = std::max(I.stats_.rpart_max_part, int(p.size()));
        if (!P.boundary.empty()) I.upsilon_qic_ = PointsQiC::build(I.ctx(), all, P.boundary, &I.stats_.rpart_qic);
        for (int p = 0; p < int(P.parts.size()); ++p) {
            std::vector<int> src;
            for (int v : P.parts[p])
                if (P.part_of[v] == p) src.push_back(v);
            I.part_qic_.push_back(PointsQiC::build(I.ctx(), P.parts[p], src, &I.stats_.rpart_qic));
        }
    }
    I.attach_locators();
    return I;
}

// Every PLiCA structure, from the vertex lists alone. Loading a saved index
// runs this too, with the same seeds.
void PointsIndex::attach_locators() {
    const VoronoiGraph& g = *g_;
    for (int id = 0; id < int(nodes_.size()); ++id) {
        Node& N = nodes_[id];
        if (!N.W.empty()) N.phi = std::make_shared<const PlicaIndex>(PlicaIndex::build(mecs(g, N.W), opt_.seed + id));
        if (!N.A.empty())
            N.theta = std::make_shared<const PlicaIndex>(PlicaIndex::build(mecs(g, N.A), opt_.seed + id + 7));
    }

    gamma_.clear();
    gamma_count_.clear();
    gamma_owner_.clear();
    if (opt_.gamma) {
        std::vector<Circle> circ;
        for (int lvl = 1; lvl <= stats_.depth; ++lvl) {
            for (int t = 0; t < int(nodes_.size()); ++t) {
                const Node& nd = nodes_[t];
                if (nd.level != lvl) continue;
                for (int s = 0; s < int(nd.W.size()); ++s) {
                    gamma_owner_.push_back({t, s});
                    circ.push_back(g.mec(nd.W[s]));
                }
            }
            gamma_count_.push_back(int(circ.size()));
            if (circ.empty())
                gamma_.emplace_back();
            else
                gamma_.push_back(PlicaIndex::build(circ, opt_.seed + 1000 + lvl));
        }
    }

    has_upsilon_ = has_psi_ = false;
    psi_owner_.clear();
    if (has_rpart_) {
        const RPartition& P = rp_;
        if (!P.boundary.empty()) {
            has_upsilon_ = true;
            upsilon_ = PlicaIndex::build(mecs(g, P.boundary), opt_.seed + 2000);
        }
        std::vector<Circle> interior;
        for (int p = 0; p < int(P.parts.size()); ++p) {
            int slot = 0;
            for (int v : P.parts[p])
                if (P.part_of[v] == p) {
                    psi_owner_.push_back({p, slot++});
                    interior.push_back(g.mec(v));
                }
        }
        if (!interior.empty()) {
            has_psi_ = true;
            psi_ = PlicaIndex::build(interior, opt_.seed + 3000);
        }
    }
}

bool PointsIndex::trivial(Point q, QueryResult& out) const {
    if (!finite(q)) throw Error(ErrorCode::ValidationError, "query point is not finite");
    int s = g_->nearest_site(q);
    if (g_->sites()[s] == q) throw Error(ErrorCode::QueryAtSite, "query point coincides with a site");
    if (!g_->inside_hull(q)) {
        out = QueryResult::unbounded_toward(g_->outward_witness(q));
        return true;
    }
    return false;
}

QueryResult PointsIndex::query(Point q, ProbeCount* probes) const {
    QueryResult out;
    if (trivial(q, out)) return out;
    ProbeCount local;
    ProbeCount& pc = probes ? *probes : local;
    int t = nodes_.empty() ? -1 : 0;
    while (t >= 0) {
        const Node& N = nodes_[t];
        if (N.phi) {
            ++pc.plica;
            if (auto h = N.phi->query(q)) {
                ++pc.qic;
                return QueryResult::of(N.qic.query(ctx(), *h, q));
            }
        }
        if (N.theta) {
            ++pc.plica;
            if (N.theta->query(q)) {
                t = N.left;
                continue;
            }
        }
        t = N.right;
    }
    throw Error(ErrorCode::InternalError, "separator tree search fell off the tree");
}

QueryResult PointsIndex::gamma_query(Point q, ProbeCount* probes) const {
    if (!has_gamma()) throw Error(ErrorCode::ValidationError, "index was built without GAMMA");
    QueryResult out;
    if (trivial(q, out)) return out;
    ProbeCount local;
    ProbeCount& pc = probes ? *probes : local;
    const int L = int(gamma_.size());
    auto probe = [&](int i) -> std::optional<int> {
        if (gamma_count_[i] == 0) return std::nullopt;
        ++pc.plica;
        return gamma_[i].query(q);
    };
    // smallest level whose cumulative separator MECs contain q; level 1 first,
    // then a lower-bound search so the answer level is always one we probed
    std::optional<int> hit = probe(0);
    if (!hit) {
        int lo = 1, hi = L;
        while (lo < hi) {
            int mid = (lo + hi) / 2;
            if (auto h = probe(mid)) {
                hi = mid;
                hit = h;
            } else {
                lo = mid + 1;
            }
        }
        if (hi == L) return query(q, probes);  // rounding at a circle boundary
    }
    auto [t, slot] = gamma_owner_[*hit];
    ++pc.qic;
    return QueryResult::of(nodes_[t].qic.query(ctx(), slot, q));
}

QueryResult PointsIndex::rpart_query(Point q, ProbeCount* probes) const {
    if (!has_rpart_) throw Error(ErrorCode::ValidationError, "index was built without RPART");
    QueryResult out;
    if (trivial(q, out)) return out;
    ProbeCount local;
    ProbeCount& pc = probes ? *probes : local;
    if (has_upsilon_) {
        ++pc.plica;
        if (auto h = upsilon_.query(q)) {
            ++pc.qic;
            return QueryResult::of(upsilon_qic_.query(ctx(), *h, q));
        }
    }
    if (has_psi_) {
        ++pc.plica;
        if (auto h = psi_.query(q)) {
            auto [p, slot] = psi_owner_[*h];
            ++pc.qic;
            return QueryResult::of(part_qic_[p].query(ctx(), slot, q));
        }
    }
    throw Error(ErrorCode::InternalError, "no MEC contains a point inside the hull");
}

std::size_t PointsIndex::base_bytes() const {
    std::size_t b = 0;
    for (auto& n : nodes_) {
        b += sizeof(Node) + n.W.size() * sizeof(int) + n.qic.memory_bytes();
        if (n.phi) b += sizeof(PlicaIndex) + n.phi->memory_bytes();
        if (n.theta) b += sizeof(PlicaIndex) + n.theta->memory_bytes();
    }
    return b;
}

std::size_t PointsIndex::gamma_bytes() const {
    std::size_t b = gamma_owner_.size() * sizeof(gamma_owner_[0]);
    for (std::size_t i = 0; i < gamma_.size(); ++i)
        if (gamma_count_[i] > 0) b += gamma_[i].memory_bytes();
    return b;
}

std::size_t PointsIndex::rpart_bytes() const {
    if (!has_rpart_) return 0;
    std::size_t b = psi_owner_.size() * sizeof(psi_owner_[0]) + upsilon_qic_.memory_bytes();
    if (has_upsilon_) b += upsilon_.memory_bytes();
    if (has_psi_) b += psi_.memory_bytes();
    for (auto& q : part_qic_) b += q.memory_bytes();
    return b;
}

}  // namespace qmec
