#include "qmec/medial_axis.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <queue>

#include <boost/geometry.hpp>
#include <boost/geometry/geometries/point_xy.hpp>
#include <boost/geometry/geometries/polygon.hpp>
#include <boost/polygon/point_data.hpp>
#include <boost/polygon/segment_data.hpp>
#include <boost/polygon/voronoi.hpp>

namespace qmec {

namespace bg = boost::geometry;
namespace bp = boost::polygon;

namespace {

struct DSU {
    std::vector<int> p;
    explicit DSU(int n) : p(n) { std::iota(p.begin(), p.end(), 0); }
    int find(int x) {
        while (p[x] != x) x = p[x] = p[p[x]];
        return x;
    }
    // keeps the smaller id as representative
    void unite(int a, int b) {
        a = find(a), b = find(b);
        if (a != b) p[std::max(a, b)] = std::min(a, b);
    }
};

double extent_of(const std::vector<Point>& pts) {
    double x0 = 1e300, y0 = 1e300, x1 = -1e300, y1 = -1e300;
    for (Point p : pts) x0 = std::min(x0, p.x), y0 = std::min(y0, p.y), x1 = std::max(x1, p.x), y1 = std::max(y1, p.y);
    return std::max(std::hypot(x1 - x0, y1 - y0), 1e-300);
}

Feature edge_feature(const std::vector<Point>& pts, int i) {
    Feature f;
    f.kind = Feature::EDGE;
    f.a = pts[i];
    f.b = pts[(i + 1) % pts.size()];
    f.index = i;
    return f;
}

Feature vertex_feature(const std::vector<Point>& pts, int i) {
    Feature f;
    f.kind = Feature::VERTEX;
    f.a = pts[i];
    f.index = i;
    return f;
}

// contact point of an axis point's MEC with a feature
Point contact(const Feature& f, Point c) {
    if (f.kind == Feature::VERTEX) return f.a;
    Point d = f.b - f.a;
    double t = std::clamp(dot(c - f.a, d) / norm2(d), 0.0, 1.0);
    return lerp(f.a, f.b, t);
}

}  // namespace

// ---- polygon checks ----

double polygon_area(const std::vector<Point>& pts) {
    double a = 0;
    for (std::size_t i = 0, n = pts.size(); i < n; ++i) a += cross(pts[i], pts[(i + 1) % n]);
    return 0.5 * a;
}

bool is_convex_ccw(const std::vector<Point>& pts) {
    std::size_t n = pts.size();
    if (n < 3) return false;
    for (std::size_t i = 0; i < n; ++i)
        if (orient_sign(pts[(i + n - 1) % n], pts[i], pts[(i + 1) % n]) <= 0) return false;
    return true;
}

CheckedPolygon check_polygon(const std::vector<Point>& in, const MedialOptions& opt) {
    if (in.size() < 3) throw Error(ErrorCode::TooFewVertices, "polygon needs at least 3 vertices");
    double big = 0;
    for (Point p : in) {
        if (!finite(p)) throw Error(ErrorCode::ValidationError, "non-finite polygon coordinate");
        big = std::max({big, std::fabs(p.x), std::fabs(p.y)});
    }
    if (big == 0) throw Error(ErrorCode::TooFewVertices, "degenerate polygon");
    CheckedPolygon out;
    // power-of-two scale keeps dyadic inputs such as the unit square exact
    int k = int(std::floor(std::log2(std::ldexp(1.0, 30) / big)));
    out.scale = std::ldexp(1.0, k);
    std::vector<Point> pts;
    for (Point p : in) pts.push_back({std::round(p.x * out.scale) / out.scale, std::round(p.y * out.scale) / out.scale});
    for (std::size_t i = 0; i < pts.size(); ++i)
        if (pts[i] == pts[(i + 1) % pts.size()]) throw Error(ErrorCode::NotSimple, "repeated polygon vertex");

    double area = polygon_area(pts);
    if (area == 0) throw Error(ErrorCode::NotSimple, "polygon has zero area");
    if (area < 0) {
        if (opt.strict) throw Error(ErrorCode::ClockwiseInput, "polygon is clockwise");
        std::reverse(pts.begin(), pts.end());
        out.reversed = true;
    }
    // drop straight-angle vertices until none remain
    for (bool changed = true; changed && pts.size() >= 3;) {
        changed = false;
        std::vector<Point> kept;
        std::size_t n = pts.size();
        for (std::size_t i = 0; i < n; ++i) {
            Point a = kept.empty() ? pts[(i + n - 1) % n] : kept.back();
            if (orient_sign(a, pts[i], pts[(i + 1) % n]) == 0 && dot(pts[i] - a, pts[(i + 1) % n] - pts[i]) > 0) {
                ++out.dropped;
                changed = true;
            } else {
                kept.push_back(pts[i]);
            }
        }
        pts.swap(kept);
    }
    if (pts.size() < 3) throw Error(ErrorCode::TooFewVertices, "polygon has fewer than 3 corners");

    using BPt = bg::model::d2::point_xy<double>;
    bg::model::polygon<BPt, false, false> poly;
    for (Point p : pts) poly.outer().push_back(BPt(p.x, p.y));
    std::string why;
    if (!bg::is_valid(poly, why)) throw Error(ErrorCode::NotSimple, "polygon is not simple: " + why);
    out.pts = std::move(pts);
    return out;
}

// ---- pieces ----

Point AxisPiece::at(double u) const {
    if (!curved) return lerp(p0, p1, u);
    return arc.at(arc.t0 + u * (arc.t1 - arc.t0)).first;
}

double AxisPiece::clearance(double u) const {
    if (curved) return arc.at(arc.t0 + u * (arc.t1 - arc.t0)).second;
    Point y = at(u);
    if (f1.kind == Feature::VERTEX) return dist(y, f1.a);
    if (f2.kind == Feature::VERTEX) return dist(y, f2.a);
    return f1.line_distance(y);
}

double AxisPiece::slope(double u) const {
    Point y = at(u);
    Point tan;
    if (curved) {
        Point n = perp(arc.direction);
        double a = dot(arc.focus - arc.origin, arc.direction);
        double b = dot(arc.focus - arc.origin, n);
        if (b < 0) n = -1.0 * n, b = -b;
        double t = arc.t0 + u * (arc.t1 - arc.t0);
        tan = (arc.t1 - arc.t0) * (arc.direction + ((t - a) / b) * n);
    } else {
        tan = p1 - p0;
    }
    double len = norm(tan);
    if (len == 0) return 0;
    const Feature* v = f1.kind == Feature::VERTEX ? &f1 : (f2.kind == Feature::VERTEX ? &f2 : nullptr);
    if (curved) v = f1.kind == Feature::VERTEX ? &f1 : &f2;
    if (v) {
        double d = dist(y, v->a);
        return d == 0 ? 1.0 : dot(tan, y - v->a) / (len * d);
    }
    return (f1.line_distance(p1) - f1.line_distance(p0)) / len;
}

double AxisPiece::min_param() const {
    double u;
    if (curved) {
        if (arc.t1 == arc.t0) return -1;
        double a = dot(arc.focus - arc.origin, arc.direction);
        u = (a - arc.t0) / (arc.t1 - arc.t0);
    } else if (f1.kind == Feature::VERTEX || f2.kind == Feature::VERTEX) {
        Point v = f1.kind == Feature::VERTEX ? f1.a : f2.a;
        Point d = p1 - p0;
        if (norm2(d) == 0) return -1;
        u = dot(v - p0, d) / norm2(d);
    } else {
        return -1;
    }
    return (u > 1e-12 && u < 1 - 1e-12) ? u : -1;
}

AxisPiece AxisPiece::reversed() const {
    AxisPiece r = *this;
    std::swap(r.p0, r.p1);
    std::swap(r.arc.t0, r.arc.t1);
    return r;
}

// ---- the axis tree ----

MedialAxisTree MedialAxisTree::build(const std::vector<Point>& polygon, const MedialOptions& opt) {
    MedialAxisTree m;
    m.poly_ = check_polygon(polygon, opt);
    const std::vector<Point>& P = m.poly_.pts;
    const int n = int(P.size());
    const double scale = m.poly_.scale;
    const double ext = extent_of(P);

    std::vector<bool> reflex(n);
    for (int i = 0; i < n; ++i) reflex[i] = orient_sign(P[(i + n - 1) % n], P[i], P[(i + 1) % n]) < 0;

    using ISeg = bp::segment_data<int>;
    using IPt = bp::point_data<int>;
    std::vector<ISeg> segs;
    for (int i = 0; i < n; ++i) {
        Point a = P[i], b = P[(i + 1) % n];
        segs.emplace_back(IPt(int(std::lround(a.x * scale)), int(std::lround(a.y * scale))),
                          IPt(int(std::lround(b.x * scale)), int(std::lround(b.y * scale))));
    }
    bp::voronoi_diagram<double> vd;
    bp::construct_voronoi(segs.begin(), segs.end(), &vd);

    using Cell = bp::voronoi_diagram<double>::cell_type;
    using Vtx = bp::voronoi_diagram<double>::vertex_type;
    auto feat = [&](const Cell* c) {
        int i = int(c->source_index());
        if (c->contains_segment()) return edge_feature(P, i);
        return vertex_feature(P, c->source_category() == bp::SOURCE_CATEGORY_SEGMENT_START_POINT ? i : (i + 1) % n);
    };
    const Vtx* v_base = &vd.vertices()[0];
    auto vpos = [&](const Vtx* v) { return Point{v->x() / scale, v->y() / scale}; };

    struct Kept {
        int a, b;
        Feature fa, fb;
    };
    std::vector<Kept> kept;
    for (const auto& e : vd.edges()) {
        if (!e.is_primary() || !e.is_finite() || &e > e.twin()) continue;
        Point A = vpos(e.vertex0()), B = vpos(e.vertex1());
        Feature fa = feat(e.cell()), fb = feat(e.twin()->cell());
        bool inside;
        const Feature* fs = fa.kind == Feature::EDGE ? &fa : (fb.kind == Feature::EDGE ? &fb : nullptr);
        if (fs) {
            double oa = cross(fs->b - fs->a, A - fs->a), ob = cross(fs->b - fs->a, B - fs->a);
            inside = (std::fabs(oa) >= std::fabs(ob) ? oa : ob) > 0;
        } else {
            inside = reflex[fa.index] && reflex[fb.index];
        }
        if (inside) kept.push_back({int(e.vertex0() - v_base), int(e.vertex1() - v_base), fa, fb});
    }

    // merge vertices joined by negligible edges
    const int nv = int(vd.vertices().size());
    DSU dsu(nv);
    const double merge_eps = 1e-9 * ext;
    for (const Kept& k : kept)
        if (dist(vpos(v_base + k.a), vpos(v_base + k.b)) <= merge_eps) dsu.unite(k.a, k.b);
    std::vector<std::vector<int>> vadj(nv);
    std::vector<Kept> links;
    for (const Kept& k : kept) {
        int a = dsu.find(k.a), b = dsu.find(k.b);
        if (a == b) continue;
        vadj[a].push_back(int(links.size()));
        vadj[b].push_back(int(links.size()));
        links.push_back({a, b, k.fa, k.fb});
    }

    auto make_piece = [&](const Kept& k, int from) {
        AxisPiece pc;
        int to = k.a == from ? k.b : k.a;
        pc.p0 = vpos(v_base + from);
        pc.p1 = vpos(v_base + to);
        pc.f1 = k.fa;
        pc.f2 = k.fb;
        if (k.fa.kind != k.fb.kind) {
            const Feature& fv = k.fa.kind == Feature::VERTEX ? k.fa : k.fb;
            const Feature& fe = k.fa.kind == Feature::EDGE ? k.fa : k.fb;
            Point dir = unit(fe.b - fe.a);
            if (std::fabs(cross(dir, fv.a - fe.a)) > 1e-12 * ext) {
                pc.curved = true;
                pc.arc.focus = fv.a;
                pc.arc.origin = fe.a;
                pc.arc.direction = dir;
                pc.arc.t0 = dot(pc.p0 - fe.a, dir);
                pc.arc.t1 = dot(pc.p1 - fe.a, dir);
            }
        }
        return pc;
    };

    // axis nodes are the vertices of degree other than two
    std::vector<int> node_of(nv, -1);
    for (int v = 0; v < nv; ++v) {
        if (vadj[v].empty() || vadj[v].size() == 2) continue;
        node_of[v] = int(m.nodes_.size());
        MANode nd;
        nd.pos = vpos(v_base + v);
        nd.kind = vadj[v].size() == 1 ? MANode::LEAF : MANode::INTERNAL;
        m.nodes_.push_back(nd);
    }
    if (m.nodes_.empty()) throw Error(ErrorCode::InternalError, "medial axis has no nodes");

    std::vector<char> used(links.size(), 0);
    for (int v = 0; v < nv; ++v) {
        if (node_of[v] < 0) continue;
        for (int l0 : vadj[v]) {
            if (used[l0]) continue;
            MAEdge E;
            E.u = node_of[v];
            int cur = v, l = l0;
            while (true) {
                used[l] = 1;
                E.pieces.push_back(make_piece(links[l], cur));
                cur = links[l].a == cur ? links[l].b : links[l].a;
                if (node_of[cur] >= 0) break;
                int nl = vadj[cur][0] == l ? vadj[cur][1] : vadj[cur][0];
                if (used[nl]) throw Error(ErrorCode::InternalError, "medial axis has a cycle");
                l = nl;
            }
            E.v = node_of[cur];
            m.edges_.push_back(std::move(E));
        }
    }
    const int N = int(m.nodes_.size());
    if (int(m.edges_.size()) != N - 1 || std::count(used.begin(), used.end(), 0) != 0)
        throw Error(ErrorCode::InternalError, "medial axis is not a tree");
    m.adj_.assign(N, {});
    for (int e = 0; e < int(m.edges_.size()); ++e) {
        m.adj_[m.edges_[e].u].push_back(e);
        m.adj_[m.edges_[e].v].push_back(e);
    }

    // leaves sit exactly on convex corners; internal clearance from the features
    for (int w = 0; w < N; ++w) {
        MANode& nd = m.nodes_[w];
        if (nd.kind == MANode::LEAF) {
            int e = m.adj_[w][0];
            MAEdge& E = m.edges_[e];
            AxisPiece& pc = E.u == w ? E.pieces.front() : E.pieces.back();
            int best = -1;
            double bd = 1e300;
            for (const Feature* f : {&pc.f1, &pc.f2}) {
                std::vector<int> cand{f->index};
                if (f->kind == Feature::EDGE) cand.push_back((f->index + 1) % n);
                for (int c : cand)
                    if (dist(P[c], nd.pos) < bd) bd = dist(P[c], nd.pos), best = c;
            }
            nd.vertex = best;
            nd.pos = P[best];
            nd.clearance = 0;
            (E.u == w ? pc.p0 : pc.p1) = nd.pos;
        } else {
            double r = 1e300;
            for (int e : m.adj_[w]) {
                const MAEdge& E = m.edges_[e];
                const AxisPiece& pc = E.u == w ? E.pieces.front() : E.pieces.back();
                r = std::min({r, pc.f1.distance(nd.pos), pc.f2.distance(nd.pos)});
            }
            nd.clearance = r;
            ++m.num_internal_;
        }
    }
    for (int w = 0; w < N; ++w)
        if (m.nodes_[w].kind == MANode::LEAF && reflex[m.nodes_[w].vertex])
            throw Error(ErrorCode::InternalError, "axis leaf at a reflex corner");

    m.root_ = 0;
    for (int w = 1; w < N; ++w)
        if (m.nodes_[w].clearance > m.nodes_[m.root_].clearance) m.root_ = w;
    m.parent_.assign(N, -1);
    std::vector<int> order{m.root_};
    std::vector<char> seen(N, 0);
    seen[m.root_] = 1;
    for (std::size_t i = 0; i < order.size(); ++i)
        for (int e : m.adj_[order[i]]) {
            int o = m.other(e, order[i]);
            if (!seen[o]) seen[o] = 1, m.parent_[o] = order[i], order.push_back(o);
        }
    if (int(order.size()) != N) throw Error(ErrorCode::InternalError, "medial axis is disconnected");
    return m;
}

const AxisPiece& MedialAxisTree::piece(AxisPos x, double* u) const {
    const auto& pcs = edges_[x.edge].pieces;
    int k = int(pcs.size());
    double s = std::clamp(x.s, 0.0, double(k));
    int i = std::min(int(std::floor(s)), k - 1);
    if (u) *u = s - i;
    return pcs[i];
}

Point MedialAxisTree::point(AxisPos x) const {
    double u;
    const AxisPiece& pc = piece(x, &u);
    const MAEdge& E = edges_[x.edge];
    if (u == 0 && x.s <= 0) return nodes_[E.u].pos;
    if (x.s >= edge_end(x.edge)) return nodes_[E.v].pos;
    return pc.at(u);
}

double MedialAxisTree::clearance(AxisPos x) const {
    const MAEdge& E = edges_[x.edge];
    if (x.s <= 0) return nodes_[E.u].clearance;
    if (x.s >= edge_end(x.edge)) return nodes_[E.v].clearance;
    double u;
    return piece(x, &u).clearance(u);
}

AxisPos MedialAxisTree::node_pos(int node, int edge) const {
    return {edge, edges_[edge].u == node ? 0.0 : edge_end(edge)};
}

double MedialAxisTree::leaving_slope(int v, int e) const {
    const MAEdge& E = edges_[e];
    if (E.u == v) return E.pieces.front().slope(0);
    return -E.pieces.back().slope(1);
}

std::vector<Feature> MedialAxisTree::features() const {
    std::vector<Feature> f;
    for (int i = 0; i < int(poly_.pts.size()); ++i) f.push_back(edge_feature(poly_.pts, i));
    return f;
}

// ---- valleys and peaks ----

namespace {

struct Profile {
    std::vector<double> s, r;
};

Profile edge_profile(const MedialAxisTree& m, int e) {
    Profile p;
    const auto& pcs = m.edges()[e].pieces;
    for (int i = 0; i < int(pcs.size()); ++i) {
        p.s.push_back(i);
        double u = pcs[i].min_param();
        if (u > 0) p.s.push_back(i + u);
    }
    p.s.push_back(double(pcs.size()));
    for (double s : p.s) p.r.push_back(m.clearance({e, s}));
    return p;
}

// arc length from the start of the edge to s
double length_to(const MedialAxisTree& m, int e, double s) {
    const auto& pcs = m.edges()[e].pieces;
    double L = 0;
    for (int i = 0; i < int(pcs.size()) && i < s; ++i) {
        double f = std::min(1.0, s - i);
        const AxisPiece& pc = pcs[i];
        if (!pc.curved) {
            L += f * dist(pc.p0, pc.p1);
            continue;
        }
        const int K = 16;
        Point prev = pc.at(0);
        for (int j = 1; j <= K; ++j) {
            Point nx = pc.at(f * j / K);
            L += dist(prev, nx);
            prev = nx;
        }
    }
    return L;
}

double tol_of(const MedialAxisTree& m) { return 1e-9 * extent_of(m.polygon().pts); }

}  // namespace

Landscape classify_valleys_peaks(const MedialAxisTree& m, const MedialOptions& opt) {
    Landscape land;
    const double tol = tol_of(m);
    const double slope_tol = 1e-9;
    const int N = int(m.nodes().size()), M = int(m.edges().size());
    std::vector<char> flat(M, 0);

    for (int e = 0; e < M; ++e) {
        Profile p = edge_profile(m, e);
        auto mm = std::minmax_element(p.r.begin(), p.r.end());
        double rmin = *mm.first;
        flat[e] = *mm.second - rmin <= tol;
        if (!(p.r.front() > rmin + tol && p.r.back() > rmin + tol)) continue;
        int k = int(mm.first - p.r.begin());
        int a = k, b = k;
        while (a > 0 && p.r[a - 1] <= rmin + tol) --a;
        while (b + 1 < int(p.r.size()) && p.r[b + 1] <= rmin + tol) ++b;
        double sv = p.s[k];
        if (a < b) {
            // plateau: midpoint by arc length
            double target = 0.5 * (length_to(m, e, p.s[a]) + length_to(m, e, p.s[b]));
            double lo = p.s[a], hi = p.s[b];
            for (int it = 0; it < 100; ++it) {
                double mid = 0.5 * (lo + hi);
                (length_to(m, e, mid) < target ? lo : hi) = mid;
            }
            sv = 0.5 * (lo + hi);
        }
        ValleyPoint vp;
        vp.pos = {e, sv};
        vp.mec = m.mec(vp.pos);
        double u;
        const AxisPiece& pc = m.piece(vp.pos, &u);
        vp.chord = {contact(pc.f1, vp.mec.center), contact(pc.f2, vp.mec.center)};
        land.valleys.push_back(vp);
    }

    std::vector<char> candidate(N, 0);
    for (int w = 0; w < N; ++w) {
        if (m.nodes()[w].kind != MANode::INTERNAL) continue;
        bool down = false, up = false;
        for (int e : m.incident(w)) {
            double sl = m.leaving_slope(w, e);
            down |= sl < -slope_tol;
            up |= sl > slope_tol;
        }
        if (!up) candidate[w] = 1;
        if (!down && up) {
            if (opt.strict) throw Error(ErrorCode::ValidationError, "clearance minimum at an axis node");
            land.node_minima.push_back(w);
        }
    }
    DSU groups(N);
    for (int e = 0; e < M; ++e)
        if (flat[e]) groups.unite(m.edges()[e].u, m.edges()[e].v);
    std::vector<char> group_ok(N, 1);
    for (int w = 0; w < N; ++w)
        if (!candidate[w]) group_ok[groups.find(w)] = 0;
    for (int w = 0; w < N; ++w)
        if (groups.find(w) == w && group_ok[w] && candidate[w]) land.peaks.push_back(w);
    return land;
}

// ---- mountains ----

MountainForest MountainForest::build(const MedialAxisTree& m, Landscape& land) {
    MountainForest F;
    const int N = int(m.nodes().size()), M = int(m.edges().size());
    std::vector<char> cut(N, 0);
    for (int w : land.node_minima) cut[w] = 1;

    auto add = [&](Point pos, double r, int axis_node, int valley) {
        MNode x;
        x.pos = pos;
        x.r = r;
        x.axis_node = axis_node;
        x.valley = valley;
        F.mn_.push_back(x);
        return int(F.mn_.size()) - 1;
    };
    std::vector<int> node_mn(N, -1);
    for (int w = 0; w < N; ++w)
        if (!cut[w]) node_mn[w] = add(m.nodes()[w].pos, m.nodes()[w].clearance, w, -1);
    // per edge end, the copy of a cut node
    std::vector<std::array<int, 2>> end_copy(M, {-1, -1});
    for (int e = 0; e < M; ++e)
        for (int side = 0; side < 2; ++side) {
            int w = side ? m.edges()[e].v : m.edges()[e].u;
            if (cut[w]) end_copy[e][side] = add(m.nodes()[w].pos, m.nodes()[w].clearance, w, -1);
        }
    auto end_mn = [&](int e, int side) {
        int w = side ? m.edges()[e].v : m.edges()[e].u;
        return cut[w] ? end_copy[e][side] : node_mn[w];
    };

    std::vector<int> valley_on(M, -1);
    for (int k = 0; k < int(land.valleys.size()); ++k) valley_on[land.valleys[k].pos.edge] = k;
    F.edge_seg_.assign(M, {});
    auto add_seg = [&](int e, double s0, double s1, int lo, int hi) {
        MSeg g;
        g.edge = e;
        g.s_lo = s0;
        g.s_hi = s1;
        g.lo = lo;
        g.hi = hi;
        F.edge_seg_[e].push_back(int(F.seg_.size()));
        F.seg_.push_back(g);
    };
    std::vector<std::array<int, 2>> valley_seg(land.valleys.size());
    for (int e = 0; e < M; ++e) {
        double end = m.edge_end(e);
        int k = valley_on[e];
        if (k < 0) {
            add_seg(e, 0, end, end_mn(e, 0), end_mn(e, 1));
            continue;
        }
        const ValleyPoint& vp = land.valleys[k];
        int a = add(vp.mec.center, vp.mec.radius, -1, k);
        int b = add(vp.mec.center, vp.mec.radius, -1, k);
        valley_seg[k][0] = int(F.seg_.size());
        add_seg(e, 0, vp.pos.s, end_mn(e, 0), a);
        valley_seg[k][1] = int(F.seg_.size());
        add_seg(e, vp.pos.s, end, b, end_mn(e, 1));
    }

    const int K = int(F.mn_.size());
    DSU comp(K);
    for (const MSeg& g : F.seg_) comp.unite(g.lo, g.hi);
    std::vector<int> mt_of_rep(K, -1);
    for (int x = 0; x < K; ++x) {
        int r = comp.find(x);
        if (mt_of_rep[r] < 0) {
            mt_of_rep[r] = int(F.mt_.size());
            F.mt_.push_back({});
        }
        F.mn_[x].mountain = mt_of_rep[r];
        F.mt_[mt_of_rep[r]].mnodes.push_back(x);
    }
    for (MSeg& g : F.seg_) g.mountain = F.mn_[g.lo].mountain;
    for (int k = 0; k < int(land.valleys.size()); ++k)
        for (int side = 0; side < 2; ++side) {
            int mt = F.seg_[valley_seg[k][side]].mountain;
            land.valleys[k].mountains[side] = mt;
            F.mt_[mt].valleys.push_back(k);
        }

    std::vector<std::vector<int>> madj(K);
    for (int g = 0; g < int(F.seg_.size()); ++g) {
        madj[F.seg_[g].lo].push_back(g);
        madj[F.seg_[g].hi].push_back(g);
    }
    auto higher = [&](int a, int b) {
        const MNode &A = F.mn_[a], &B = F.mn_[b];
        if (A.r != B.r) return A.r > B.r;
        int ka = A.axis_node < 0 ? N : A.axis_node, kb = B.axis_node < 0 ? N : B.axis_node;
        if (ka != kb) return ka < kb;
        return a < b;
    };
    int maxdepth = 0;
    for (Mountain& mt : F.mt_) {
        int root = mt.mnodes[0];
        for (int x : mt.mnodes)
            if (higher(x, root)) root = x;
        mt.root = root;
        mt.peak_node = F.mn_[root].axis_node;
        std::vector<int> q{root};
        std::vector<char> seen;
        F.mn_[root].parent = -1;
        for (std::size_t i = 0; i < q.size(); ++i) {
            int x = q[i];
            for (int g : madj[x]) {
                int y = F.seg_[g].lo == x ? F.seg_[g].hi : F.seg_[g].lo;
                if (y == root || F.mn_[y].parent >= 0 || F.mn_[y].up_seg >= 0) continue;
                F.mn_[y].parent = x;
                F.mn_[y].up_seg = g;
                F.mn_[y].depth = F.mn_[x].depth + 1;
                F.seg_[g].hi_is_parent = F.seg_[g].hi == x;
                maxdepth = std::max(maxdepth, F.mn_[y].depth);
                q.push_back(y);
            }
        }
        if (q.size() != mt.mnodes.size()) throw Error(ErrorCode::InternalError, "mountain is not a tree");
    }
    int levels = 1;
    while ((1 << levels) <= maxdepth) ++levels;
    F.up_.assign(levels, std::vector<int>(K, -1));
    for (int x = 0; x < K; ++x) F.up_[0][x] = F.mn_[x].parent;
    for (int l = 1; l < levels; ++l)
        for (int x = 0; x < K; ++x) {
            int h = F.up_[l - 1][x];
            F.up_[l][x] = h < 0 ? -1 : F.up_[l - 1][h];
        }
    return F;
}

int MountainForest::seg_at(AxisPos x, int mountain) const {
    const auto& gs = edge_seg_[x.edge];
    int any = -1;
    for (int g : gs) {
        const MSeg& S = seg_[g];
        if (x.s < S.s_lo - 1e-12 || x.s > S.s_hi + 1e-12) continue;
        if (mountain < 0 || S.mountain == mountain) return g;
        if (any < 0) any = g;
    }
    if (any >= 0) return any;
    // clamp stray parameters to the nearest segment
    return x.s <= seg_[gs.front()].s_lo ? gs.front() : gs.back();
}

std::vector<int> MountainForest::node_mountains(const MedialAxisTree& m, int node) const {
    std::vector<int> out;
    for (int e : m.incident(node)) {
        int g = seg_at(m.node_pos(node, e));
        const MSeg& S = seg_[g];
        if (std::find(out.begin(), out.end(), S.mountain) == out.end()) out.push_back(S.mountain);
    }
    std::sort(out.begin(), out.end());
    return out;
}

Circle MountainForest::qim(const MedialAxisTree& m, int mountain, AxisPos x, Point q, int* probes) const {
    const MSeg& S = seg_[seg_at(x, mountain)];
    int up = S.hi_is_parent ? S.hi : S.lo;
    double s_up = S.hi_is_parent ? S.s_hi : S.s_lo;
    auto circ = [&](int a) { return Circle{mn_[a].pos, mn_[a].r}; };
    int cnt = 1;
    if (!contains(circ(up), q)) {
        if (probes) *probes += cnt;
        return last_containing(m, S.edge, x.s, s_up, q);
    }
    int a = up;
    for (int l = int(up_.size()) - 1; l >= 0; --l) {
        int b = up_[l][a];
        if (b < 0) continue;
        ++cnt;
        if (contains(circ(b), q)) a = b;
    }
    if (probes) *probes += cnt;
    if (mn_[a].parent < 0) return circ(a);
    const MSeg& T = seg_[mn_[a].up_seg];
    double from = T.hi_is_parent ? T.s_lo : T.s_hi, to = T.hi_is_parent ? T.s_hi : T.s_lo;
    return last_containing(m, T.edge, from, to, q);
}

std::size_t MountainForest::memory_bytes() const {
    std::size_t b = mn_.size() * sizeof(MNode) + seg_.size() * sizeof(MSeg);
    for (const auto& mt : mt_) b += sizeof(Mountain) + (mt.mnodes.size() + mt.valleys.size()) * sizeof(int);
    for (const auto& v : edge_seg_) b += sizeof(v) + v.size() * sizeof(int);
    for (const auto& v : up_) b += sizeof(v) + v.size() * sizeof(int);
    return b;
}

Circle last_containing(const MedialAxisTree& m, int edge, double from, double to, Point q) {
    // piece boundaries strictly between from and to, in walking order
    std::vector<double> B{from};
    if (to > from) {
        for (double k = std::floor(from) + 1; k < to; k += 1) B.push_back(k);
    } else {
        for (double k = std::ceil(from) - 1; k > to; k -= 1) B.push_back(k);
    }
    B.push_back(to);
    int lo = 0, hi = int(B.size()) - 1;
    if (contains(m.mec({edge, to}), q)) return m.mec({edge, to});
    while (hi - lo > 1) {
        int mid = (lo + hi) / 2;
        (contains(m.mec({edge, B[mid]}), q) ? lo : hi) = mid;
    }
    double sa = B[lo], sb = B[hi];
    double base = std::floor(std::min(sa, sb));
    base = std::min(base, m.edge_end(edge) - 1);
    const AxisPiece& pc = m.edges()[edge].pieces[int(base)];
    double ua = sa - base, ub = sb - base;
    auto H = [&](double u) {
        Point y = pc.at(u);
        double r = pc.clearance(u);
        return dist2(y, q) - r * r;
    };
    if (H(ua) > 0) return m.mec({edge, sa});

    // H is a quadratic in u for every piece shape: fit it and take the root
    // nearest the feasible end, then polish on the exact function
    double h0 = H(0), hm = H(0.5), h1 = H(1);
    double A = 2 * (h0 + h1) - 4 * hm, Bq = h1 - h0 - A, C = h0;
    double guess = -1;
    std::vector<double> roots;
    if (std::fabs(A) < 1e-14 * (std::fabs(Bq) + std::fabs(C))) {
        if (Bq != 0) roots.push_back(-C / Bq);
    } else {
        double disc = Bq * Bq - 4 * A * C;
        if (disc >= 0) {
            double sq = std::sqrt(disc);
            double qq = -0.5 * (Bq + (Bq >= 0 ? sq : -sq));
            if (qq != 0) roots.push_back(qq / A), roots.push_back(C / qq);
        }
    }
    double best = 1e300;
    double ulo = std::min(ua, ub), uhi = std::max(ua, ub);
    for (double r : roots)
        if (r >= ulo && r <= uhi && std::fabs(r - ua) < best) best = std::fabs(r - ua), guess = r;

    double good = ua, bad = ub;
    if (guess >= 0) {
        double eps = 1e-7 * std::fabs(ub - ua);
        double g = std::clamp(guess - (ub > ua ? eps : -eps), ulo, uhi);
        double b = std::clamp(guess + (ub > ua ? eps : -eps), ulo, uhi);
        if (H(g) <= 0 && H(b) > 0) good = g, bad = b;
    }
    for (int it = 0; it < 60 && good != bad; ++it) {
        double mid = 0.5 * (good + bad);
        if (mid == good || mid == bad) break;
        (H(mid) <= 0 ? good : bad) = mid;
    }
    return m.mec({edge, base + good});
}

// ---- sub-polygons ----

Partition partition_mountains(const MedialAxisTree& m, Landscape& land) {
    Partition out{MountainForest::build(m, land), {}};
    const std::vector<Point>& P = m.polygon().pts;
    const int n = int(P.size());
    if (land.valleys.empty()) {
        out.parts.push_back({0, P});
        return out;
    }
    struct Ev {
        double key;
        Point pt;
        int valley, end;
        double angle;
    };
    std::vector<Ev> ev;
    for (int k = 0; k < int(land.valleys.size()); ++k) {
        const ValleyPoint& vp = land.valleys[k];
        double u;
        const AxisPiece& pc = m.piece(vp.pos, &u);
        const Feature* f[2] = {&pc.f1, &pc.f2};
        for (int j = 0; j < 2; ++j) {
            double key;
            Point pt = vp.chord[j];
            if (f[j]->kind == Feature::VERTEX) {
                key = f[j]->index;
                pt = P[f[j]->index];
            } else {
                Point d = f[j]->b - f[j]->a;
                double t = std::clamp(dot(pt - f[j]->a, d) / norm2(d), 0.0, 1.0);
                key = f[j]->index + t;
                if (t >= 1) key = (f[j]->index + 1) % n, pt = P[int(key)];
                if (t <= 0) pt = P[f[j]->index];
            }
            ev.push_back({key, pt, k, j, 0});
        }
    }
    for (Ev& e : ev) {
        int i = int(std::floor(e.key)) % n;
        Point dout = P[(i + 1) % n] - P[i];
        Point w = land.valleys[e.valley].chord[1 - e.end] - e.pt;
        double a = std::atan2(cross(dout, w), dot(dout, w));
        e.angle = a < 0 ? a + 2 * M_PI : a;
    }
    std::sort(ev.begin(), ev.end(), [](const Ev& a, const Ev& b) {
        if (a.key != b.key) return a.key < b.key;
        return a.angle > b.angle;
    });
    const int E = int(ev.size());
    std::vector<int> partner(E);
    {
        std::map<std::pair<int, int>, int> at;
        for (int i = 0; i < E; ++i) at[{ev[i].valley, ev[i].end}] = i;
        for (int i = 0; i < E; ++i) partner[i] = at[{ev[i].valley, 1 - ev[i].end}];
    }
    std::vector<char> done(E, 0);
    for (int j0 = 0; j0 < E; ++j0) {
        if (done[j0]) continue;
        SubPolygon part;
        auto push = [&](Point p) {
            if (part.pts.empty() || part.pts.back() != p) part.pts.push_back(p);
        };
        int cur = j0;
        do {
            done[cur] = 1;
            int nx = (cur + 1) % E;
            double ka = ev[cur].key, kb = ev[nx].key;
            if (nx == 0) kb += n;
            push(ev[cur].pt);
            for (double v = std::floor(ka) + 1; v < kb; v += 1) push(P[int(v) % n]);
            push(ev[nx].pt);
            int p = partner[nx];
            // face lies left of the chord from ev[nx] to ev[p]
            if (part.mountain < 0) {
                const ValleyPoint& vp = land.valleys[ev[nx].valley];
                double s = vp.pos.s;
                double lo = (s > std::floor(s)) ? std::floor(s) : s - 1;
                Point pu = m.point({vp.pos.edge, 0.5 * (std::max(lo, 0.0) + s)});
                bool uside = orient_sign(ev[nx].pt, ev[p].pt, pu) > 0;
                part.mountain = vp.mountains[uside ? 0 : 1];
            }
            cur = p;
        } while (cur != j0);
        if (part.pts.size() > 1 && part.pts.front() == part.pts.back()) part.pts.pop_back();
        out.parts.push_back(std::move(part));
    }
    return out;
}

}  // namespace qmec
