#include <algorithm>
#include <cmath>

#include "qmec/points.hpp"

namespace qmec {

std::vector<EdgeFrame> edge_frames(const VoronoiGraph& g) {
    std::vector<EdgeFrame> F(g.edges().size());
    for (std::size_t e = 0; e < F.size(); ++e) {
        const VorEdge& E = g.edges()[e];
        Point a = g.sites()[E.left], b = g.sites()[E.right];
        EdgeFrame& f = F[e];
        f.m = midpoint(a, b);
        f.h = 0.5 * dist(a, b);
        f.d = unit(perp(b - a));
        Point pu = g.vertices()[E.u].pos;
        Point along = E.is_ray() ? E.dir : g.vertices()[E.v].pos - pu;
        if (dot(f.d, along) < 0) f.d = -1.0 * f.d;
        f.s0 = dot(pu - f.m, f.d);
        f.s1 = E.is_ray() ? std::numeric_limits<double>::infinity() : dot(g.vertices()[E.v].pos - f.m, f.d);
    }
    return F;
}

void QicStats::merge(const QicStats& o) {
    entries += o.entries;
    buckets += o.buckets;
    max_bucket = std::max(max_bucket, o.max_bucket);
    red_ties += o.red_ties;
    walks += o.walks;
    excluded += o.excluded;
}

Circle tight_on_edge(const QicContext& ctx, int e, Point q) {
    const EdgeFrame& f = (*ctx.frames)[e];
    const Point a = ctx.g->sites()[ctx.g->edges()[e].left];
    // |x-q|^2 - |x-a|^2 = c + 2 s g along x = m + s d
    double c = dist2(f.m, q) - dist2(f.m, a);
    double gg = dot(f.d, a - q);
    double lo = f.s0, hi = f.s1;
    double scale = std::max(dist2(f.m, q), f.h * f.h) * 1e-15;
    if (std::abs(gg) * std::max(1.0, std::abs(f.s0)) <= scale) {
        if (c > scale) return {{}, -1};
    } else if (gg > 0) {
        hi = std::min(hi, -c / (2 * gg));
    } else {
        lo = std::max(lo, -c / (2 * gg));
    }
    if (lo > hi || !std::isfinite(lo) || !std::isfinite(hi)) return {{}, -1};
    double s = std::abs(hi) >= std::abs(lo) ? hi : lo;
    Point x = f.m + s * f.d;
    return {x, dist(x, a)};
}

namespace {

// does disk(x, r) meet disk(v, rv) somewhere on the side of the line through m
// opposite to d (the hull side of a ray's hull edge)?
bool lens_reaches(Point x, double r, Point v, double rv, Point d, Point m) {
    double D = dist(x, v);
    if (D >= r + rv) return false;
    double level = dot(m, d);
    auto inside_both = [&](Point p) { return dist(p, x) <= r * (1 + 1e-12) && dist(p, v) <= rv * (1 + 1e-12); };
    double best = std::numeric_limits<double>::infinity();
    Point p1 = x - r * d, p2 = v - rv * d;
    if (inside_both(p1)) best = std::min(best, dot(p1, d));
    if (inside_both(p2)) best = std::min(best, dot(p2, d));
    if (D > std::abs(r - rv) && D > 0) {
        double t = (D * D + r * r - rv * rv) / (2 * D);
        double hh = std::sqrt(std::max(0.0, r * r - t * t));
        Point u = (1.0 / D) * (v - x);
        Point base = x + t * u;
        best = std::min({best, dot(base + hh * perp(u), d), dot(base - hh * perp(u), d)});
    }
    return best < level;
}

// scratch marks survive across builds (stamp based), so per-node builds stay
// proportional to the node size
struct Builder {
    const VoronoiGraph* gp = nullptr;
    std::vector<int> scope_mark, region_mark, edge_mark;
    int scope_id = 1, region_id = 0, edge_id = 0;
    QicStats st;

    void reset(const VoronoiGraph& g) {
        gp = &g;
        if (scope_mark.size() < g.vertices().size()) {
            scope_mark.assign(g.vertices().size(), 0);
            region_mark.assign(g.vertices().size(), 0);
        }
        if (edge_mark.size() < g.edges().size()) edge_mark.assign(g.edges().size(), 0);
        st = {};
    }

    struct Sig {
        bool fail = false;
        std::vector<int> verts;
        double maxr = 0;
        bool operator==(const Sig& o) const { return fail == o.fail && verts == o.verts; }
    };

    Sig walk(int v, const GraphPos& target) {
        Sig s;
        ++st.walks;
        try {
            gp->walk_path(GraphPos::at_vertex(v), target, [&](int w) {
                s.verts.push_back(w);
                if (scope_mark[w] != scope_id) {
                    s.fail = true;
                    return false;
                }
                s.maxr = std::max(s.maxr, gp->vertices()[w].radius);
                return true;
            });
        } catch (const Error&) {
            s.fail = true;
        }
        return s;
    }
};

}  // namespace

PointsQiC PointsQiC::build(const QicContext& ctx, const std::vector<int>& scope, const std::vector<int>& sources,
                           QicStats* stats) {
    thread_local Builder B;
    B.reset(*ctx.g);
    const VoronoiGraph& g = *ctx.g;
    const auto& V = g.vertices();
    const auto& E = g.edges();
    const auto& F = *ctx.frames;

    PointsQiC Q;
    ++B.scope_id;
    for (int v : scope) {
        B.scope_mark[v] = B.scope_id;
        Q.R_.push_back(V[v].radius);
    }
    std::sort(Q.R_.begin(), Q.R_.end());
    Q.R_.erase(std::unique(Q.R_.begin(), Q.R_.end()), Q.R_.end());
    const auto& R = Q.R_;
    auto kindex = [&](double r) { return int(std::lower_bound(R.begin(), R.end(), r) - R.begin()); };

    struct Cand {
        int k;
        std::int32_t code;
        GraphPos pos;
    };
    std::vector<Cand> cands, kept;
    std::vector<int> region;
    for (int v : sources) {
        const double rv = V[v].radius;
        const Point pv = V[v].pos;
        const int kv = kindex(rv);
        kept.clear();
        kept.push_back({kv, -1 - v, GraphPos::at_vertex(v)});

        // vertices whose MEC overlaps MEC_v, connected to v through such vertices
        ++B.region_id;
        region.assign(1, v);
        B.region_mark[v] = B.region_id;
        for (std::size_t h = 0; h < region.size(); ++h) {
            int u = region[h];
            for (int e : g.incident(u)) {
                if (E[e].is_ray()) continue;
                int w = g.other(e, u);
                if (B.region_mark[w] == B.region_id || B.scope_mark[w] != B.scope_id) continue;
                if (dist(V[w].pos, pv) >= V[w].radius + rv) continue;
                B.region_mark[w] = B.region_id;
                region.push_back(w);
            }
        }

        // vertex candidates
        for (int u : region) {
            if (u == v || V[u].radius < rv) continue;
            auto s = B.walk(v, GraphPos::at_vertex(u));
            if (!s.fail && s.maxr <= V[u].radius)
                kept.push_back({kindex(V[u].radius), -1 - u, GraphPos::at_vertex(u)});
            else
                ++B.st.excluded;
        }

        // edge candidates, branch by branch
        ++B.edge_id;
        for (int u : region)
            for (int e : g.incident(u)) {
                if (B.edge_mark[e] == B.edge_id) continue;
                B.edge_mark[e] = B.edge_id;
                const EdgeFrame& f = F[e];
                const VorEdge& ed = E[e];
                const bool ray = ed.is_ray();
                for (int branch = 0; branch < 2; ++branch) {
                    // branch 0: s in (s0, min(s1,0)); branch 1: s in (max(s0,0), s1)
                    double slo = branch ? std::max(f.s0, 0.0) : f.s0;
                    double shi = branch ? f.s1 : std::min(f.s1, 0.0);
                    if (!(slo < shi)) continue;
                    double r_in, r_out;
                    if (branch) {
                        r_in = f.s0 >= 0 ? V[ed.u].radius : f.h;
                        r_out = ray ? std::numeric_limits<double>::infinity() : V[ed.v].radius;
                    } else {
                        r_in = f.s1 <= 0 ? V[ed.v].radius : f.h;
                        r_out = V[ed.u].radius;
                    }
                    int k = int(std::upper_bound(R.begin(), R.end(), std::max(r_in, rv)) - R.begin());
                    if (rv > r_in) k = kindex(rv);
                    int kend = kindex(r_out);  // exclusive
                    cands.clear();
                    for (; k < kend; ++k) {
                        double r = R[k];
                        if (r <= r_in) continue;
                        double s = std::sqrt(std::max(0.0, r * r - f.h * f.h));
                        if (!branch) s = -s;
                        if (!(s > slo && s < shi)) continue;
                        Point x = f.m + s * f.d;
                        if (dist(x, pv) >= r + rv) continue;
                        if (ray && !lens_reaches(x, r, pv, rv, f.d, f.m)) continue;
                        double t = ray ? s - f.s0 : (s - f.s0) / (f.s1 - f.s0);
                        cands.push_back({k, std::int32_t(2 * e + branch), GraphPos::on_edge(e, t)});
                    }
                    if (cands.empty()) continue;
                    // path condition; the path is taken to be the same between two
                    // candidates whose walks agree
                    std::vector<Builder::Sig> sig(cands.size());
                    std::vector<char> have(cands.size(), 0);
                    auto get = [&](std::size_t i) -> const Builder::Sig& {
                        if (!have[i]) {
                            sig[i] = B.walk(v, cands[i].pos);
                            have[i] = 1;
                        }
                        return sig[i];
                    };
                    std::vector<std::pair<std::size_t, std::size_t>> todo{{0, cands.size() - 1}};
                    std::vector<char> ok(cands.size(), 0);
                    while (!todo.empty()) {
                        auto [i, j] = todo.back();
                        todo.pop_back();
                        const auto& a = get(i);
                        const auto& b = get(j);
                        if (a == b) {
                            for (std::size_t x = i; x <= j; ++x) ok[x] = !a.fail && a.maxr <= R[cands[x].k];
                        } else {
                            ok[i] = !a.fail && a.maxr <= R[cands[i].k];
                            ok[j] = !b.fail && b.maxr <= R[cands[j].k];
                            if (j - i >= 2) {
                                std::size_t mid = (i + j) / 2;
                                todo.push_back({i, mid});
                                todo.push_back({mid, j});
                            }
                        }
                    }
                    for (std::size_t i = 0; i < cands.size(); ++i) {
                        if (ok[i])
                            kept.push_back(cands[i]);
                        else
                            ++B.st.excluded;
                    }
                }
            }

        std::stable_sort(kept.begin(), kept.end(), [](const Cand& a, const Cand& b) { return a.k < b.k; });
        Source S;
        S.vertex = v;
        S.k0 = kv;
        S.nb = kept.back().k - kv + 1;
        S.off = std::int64_t(Q.off_.size());
        S.ent = std::int64_t(Q.ent_.size());
        std::size_t i = 0;
        for (int b = 0; b < S.nb; ++b) {
            Q.off_.push_back(std::uint32_t(i));
            std::size_t j = i;
            while (j < kept.size() && kept[j].k == kv + b) ++j;
            B.st.max_bucket = std::max(B.st.max_bucket, int(j - i));
            i = j;
        }
        Q.off_.push_back(std::uint32_t(kept.size()));
        for (auto& c : kept) Q.ent_.push_back(c.code);
        B.st.entries += long(kept.size());
        B.st.buckets += S.nb;

        // more than one growing edge with entries at a guiding vertex
        ++B.edge_id;
        for (auto& c : kept)
            if (c.code >= 0) B.edge_mark[c.code >> 1] = B.edge_id;
        for (auto& c : kept) {
            if (c.code >= 0) continue;
            int u = -1 - c.code, grow = 0;
            for (int e : g.incident(u)) {
                if (B.edge_mark[e] != B.edge_id) continue;
                const EdgeFrame& f = F[e];
                bool at_u = E[e].u == u;
                if (at_u ? f.s0 >= 0 : f.s1 <= 0) ++grow;
            }
            if (grow > 1) ++B.st.red_ties;
        }
        Q.src_.push_back(S);
    }
    if (stats) stats->merge(B.st);
    return Q;
}

Circle PointsQiC::entry_circle(const QicContext& ctx, std::int32_t code, double r) const {
    if (code < 0) return ctx.g->mec(-1 - code);
    const EdgeFrame& f = (*ctx.frames)[code >> 1];
    double s = std::sqrt(std::max(0.0, r * r - f.h * f.h));
    if (!(code & 1)) s = -s;
    return {f.m + s * f.d, r};
}

std::vector<PointsQiC::Guide> PointsQiC::guides(const QicContext& ctx, int slot) const {
    const Source& S = src_[slot];
    std::vector<Guide> out;
    for (int b = 0; b < S.nb; ++b)
        for (auto i = off_[S.off + b]; i < off_[S.off + b + 1]; ++i) {
            auto code = ent_[S.ent + i];
            double r = R_[S.k0 + b];
            out.push_back({S.k0 + b, code < 0 ? -1 - code : -1, code >= 0 ? code >> 1 : -1, entry_circle(ctx, code, r)});
        }
    return out;
}

Circle PointsQiC::query(const QicContext& ctx, int slot, Point q) const {
    const Source& S = src_[slot];
    const Tolerance tol;
    if (!contains(ctx.g->mec(S.vertex), q, tol)) throw Error(ErrorCode::PromiseViolated, "query point not in the source MEC");
    auto bucket_hits = [&](int b) {
        for (auto i = off_[S.off + b]; i < off_[S.off + b + 1]; ++i)
            if (contains(entry_circle(ctx, ent_[S.ent + i], R_[S.k0 + b]), q, tol)) return true;
        return false;
    };
    int lo = 0, hi = S.nb;
    while (hi - lo > 1) {
        int mid = (lo + hi) / 2;
        if (bucket_hits(mid))
            lo = mid;
        else
            hi = mid;
    }
    Circle best = ctx.g->mec(S.vertex);
    auto offer = [&](const Circle& c) {
        if (c.radius > best.radius && contains(c, q, tol)) best = c;
    };
    const double r = R_[S.k0 + lo];
    for (auto i = off_[S.off + lo]; i < off_[S.off + lo + 1]; ++i) {
        auto code = ent_[S.ent + i];
        Circle c = entry_circle(ctx, code, r);
        if (!contains(c, q, tol)) continue;
        offer(c);
        if (code >= 0) {
            offer(tight_on_edge(ctx, code >> 1, q));
        } else {
            for (int e : ctx.g->incident(-1 - code)) offer(tight_on_edge(ctx, e, q));
        }
    }
    return best;
}

std::size_t PointsQiC::memory_bytes() const {
    return R_.size() * sizeof(double) + src_.size() * sizeof(Source) + off_.size() * sizeof(std::uint32_t) +
           ent_.size() * sizeof(std::int32_t);
}

}  // namespace qmec
