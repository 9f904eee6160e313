#include "qmec/voronoi_graph.hpp"

#include <algorithm>
#include <limits>
#include <numbers>

namespace qmec {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double ccw_from(double a, double b) {
    double d = std::fmod(b - a, kTwoPi);
    if (d < 0) d += kTwoPi;
    return d;
}

// signed depth of angle x inside the ccw arc from r to l (negative when outside)
double arc_margin(double r, double l, double x) {
    double span = ccw_from(r, l);
    double in = ccw_from(r, x);
    if (in <= span) return std::min(in, span - in);
    return -std::min(in - span, kTwoPi - in);
}

bool tri_overlap(const Point* A, const Point* B) {
    // separating axis over the six edges; touching counts as disjoint
    auto separated = [](const Point* P, const Point* Q) {
        for (int k = 0; k < 3; ++k) {
            Point a = P[k], b = P[(k + 1) % 3];
            int own = orient_sign(a, b, P[(k + 2) % 3]);
            if (own == 0) continue;
            bool all_out = true;
            for (int j = 0; j < 3 && all_out; ++j)
                if (orient_sign(a, b, Q[j]) * own > 0) all_out = false;
            if (all_out) return true;
        }
        return false;
    };
    return !separated(A, B) && !separated(B, A);
}

thread_local std::vector<unsigned> tl_stamp;
thread_local unsigned tl_clock = 0;

}  // namespace

VoronoiGraph VoronoiGraph::build(const std::vector<Point>& sites, std::uint64_t seed) {
    if (sites.size() < 3) throw Error(ErrorCode::TooFewSites, "need at least 3 sites");
    VoronoiGraph g;
    g.sites_ = sites;
    g.tri_ = Triangulation::delaunay(sites, seed);
    const auto& T = g.tri_.tris();
    int ncls = 0;
    g.tri_class_ = g.tri_.triangle_classes(&ncls);
    g.num_voronoi_ = ncls;
    g.verts_.assign(ncls, {});
    std::vector<char> seen(ncls, 0);
    for (int t = 0; t < int(T.size()); ++t) {
        int c = g.tri_class_[t];
        if (c < 0) continue;
        auto& V = g.verts_[c];
        if (!seen[c]) {
            seen[c] = 1;
            V.pos = circumcircle(sites[T[t].v[0]], sites[T[t].v[1]], sites[T[t].v[2]]).center;
            V.kind = VorVertex::VORONOI;
        }
        for (int s : T[t].v) V.sites.push_back(s);
    }
    for (auto& V : g.verts_) {
        std::sort(V.sites.begin(), V.sites.end());
        V.sites.erase(std::unique(V.sites.begin(), V.sites.end()), V.sites.end());
        Point c = V.pos;
        std::sort(V.sites.begin(), V.sites.end(), [&](int a, int b) {
            return std::atan2(sites[a].y - c.y, sites[a].x - c.x) < std::atan2(sites[b].y - c.y, sites[b].x - c.x);
        });
        V.radius = dist(c, sites[V.sites[0]]);
    }

    // edges between classes, and one artificial vertex per hull edge
    std::vector<std::pair<int, int>> hull_edges;  // (a,b) ccw
    std::vector<int> hull_from;                   // class at the inner side
    for (int t = 0; t < int(T.size()); ++t) {
        if (g.tri_.is_ghost(t)) continue;
        for (int k = 0; k < 3; ++k) {
            int n = T[t].nb[k];
            int a = T[t].v[(k + 1) % 3], b = T[t].v[(k + 2) % 3];
            if (g.tri_.is_ghost(n)) {
                hull_edges.emplace_back(a, b);
                hull_from.push_back(g.tri_class_[t]);
                continue;
            }
            if (n < t || g.tri_class_[n] == g.tri_class_[t]) continue;
            VorEdge e;
            e.u = g.tri_class_[t];
            e.v = g.tri_class_[n];
            e.left = b;
            e.right = a;
            g.edges_.push_back(e);
        }
    }
    for (std::size_t h = 0; h < hull_edges.size(); ++h) {
        auto [a, b] = hull_edges[h];
        VorVertex A;
        A.kind = VorVertex::ARTIFICIAL;
        A.sites = {a, b};
        int id = int(g.verts_.size());
        g.verts_.push_back(A);
        VorEdge e;
        e.u = hull_from[h];
        e.v = id;
        e.left = b;
        e.right = a;
        g.edges_.push_back(e);
        VorEdge ray;
        ray.u = id;
        ray.v = -1;
        ray.left = b;
        ray.right = a;
        Point d = sites[b] - sites[a];
        ray.dir = unit(Point{d.y, -d.x});
        g.edges_.push_back(ray);
    }

    // hull cycle
    {
        std::vector<int> next(sites.size(), -1);
        for (auto [a, b] : hull_edges) next[a] = b;
        int s = hull_edges[0].first;
        int v = s;
        do {
            g.hull_.push_back(v);
            v = next[v];
        } while (v != s && g.hull_.size() <= sites.size());
    }

    // rotation system: at a Voronoi vertex the edge leaving between
    // consecutive ccw sites (right, left) comes in the order of `right`
    g.adj_.assign(g.verts_.size(), {});
    for (int e = 0; e < int(g.edges_.size()); ++e) {
        g.adj_[g.edges_[e].u].push_back(e);
        if (g.edges_[e].v >= 0) g.adj_[g.edges_[e].v].push_back(e);
    }
    for (int v = 0; v < ncls; ++v) {
        const auto& S = g.verts_[v].sites;
        auto rank = [&](int e) {
            const VorEdge& E = g.edges_[e];
            int right = E.u == v ? E.right : E.left;
            return int(std::find(S.begin(), S.end(), right) - S.begin());
        };
        std::sort(g.adj_[v].begin(), g.adj_[v].end(), [&](int a, int b) { return rank(a) < rank(b); });
    }

    double maxR = 0;
    for (int v = 0; v < ncls; ++v) maxR = std::max(maxR, g.verts_[v].radius);
    double x0 = sites[0].x, x1 = x0, y0 = sites[0].y, y1 = y0;
    for (auto p : sites) {
        x0 = std::min(x0, p.x);
        x1 = std::max(x1, p.x);
        y0 = std::min(y0, p.y);
        y1 = std::max(y1, p.y);
    }
    double D = 4.0 * (std::hypot(x1 - x0, y1 - y0) + maxR);
    for (int attempt = 0;; ++attempt) {
        g.place_artificial(D);
        if (g.artificial_conditions_hold()) break;
        if (attempt > 60) throw Error(ErrorCode::InternalError, "could not place artificial vertices");
        D *= 2;
    }
    return g;
}

void VoronoiGraph::place_artificial(double D) {
    art_dist_ = D;
    for (int v = num_voronoi_; v < int(verts_.size()); ++v) {
        auto& A = verts_[v];
        Point a = sites_[A.sites[0]], b = sites_[A.sites[1]];
        Point d = b - a;
        Point n = unit(Point{d.y, -d.x});
        A.pos = midpoint(a, b) + D * n;
        A.radius = dist(A.pos, a);
    }
}

bool VoronoiGraph::artificial_conditions_hold() const {
    double maxR = 0, minA = std::numeric_limits<double>::infinity();
    for (int v = 0; v < int(verts_.size()); ++v) {
        if (verts_[v].kind == VorVertex::VORONOI)
            maxR = std::max(maxR, verts_[v].radius);
        else
            minA = std::min(minA, verts_[v].radius);
    }
    if (!(minA > maxR)) return false;

    // each artificial cap inside the hull sits in the triangle cut by the
    // tangents at its two sites; those triangles must not overlap
    const int h = int(hull_.size());
    std::vector<int> art_of(sites_.size(), -1);  // hull edge starting at site -> artificial vertex
    for (int v = num_voronoi_; v < int(verts_.size()); ++v) art_of[verts_[v].sites[0]] = v;
    std::vector<double> phi(h);
    std::vector<std::array<Point, 3>> tri(h);
    for (int i = 0; i < h; ++i) {
        int a = hull_[i], b = hull_[(i + 1) % h];
        int v = art_of[a];
        if (v < 0 || verts_[v].sites[1] != b) return false;
        double L = dist(sites_[a], sites_[b]);
        double R = verts_[v].radius;
        phi[i] = std::asin(std::min(1.0, L / (2 * R)));
        Point d = sites_[b] - sites_[a];
        Point inward = unit(Point{-d.y, d.x});
        tri[i] = {sites_[a], sites_[b], midpoint(sites_[a], sites_[b]) + (0.5 * L * std::tan(phi[i])) * inward};
    }
    for (int i = 0; i < h; ++i) {
        int j = (i + 1) % h;
        Point a = sites_[hull_[i]], b = sites_[hull_[j]], c = sites_[hull_[(j + 1) % h]];
        double th = std::acos(std::clamp(dot(unit(a - b), unit(c - b)), -1.0, 1.0));
        if (h > 2 && !(phi[i] + phi[j] <= th)) return false;
    }
    if (h <= 3) return true;
    struct Box {
        double x0, x1, y0, y1;
        int i;
    };
    std::vector<Box> boxes(h);
    for (int i = 0; i < h; ++i) {
        Box B{tri[i][0].x, tri[i][0].x, tri[i][0].y, tri[i][0].y, i};
        for (auto p : tri[i]) {
            B.x0 = std::min(B.x0, p.x);
            B.x1 = std::max(B.x1, p.x);
            B.y0 = std::min(B.y0, p.y);
            B.y1 = std::max(B.y1, p.y);
        }
        boxes[i] = B;
    }
    std::sort(boxes.begin(), boxes.end(), [](const Box& a, const Box& b) { return a.x0 < b.x0; });
    for (int s = 0; s < h; ++s)
        for (int t = s + 1; t < h && boxes[t].x0 <= boxes[s].x1; ++t) {
            if (boxes[t].y0 > boxes[s].y1 || boxes[t].y1 < boxes[s].y0) continue;
            int i = boxes[s].i, j = boxes[t].i;
            if ((i + 1) % h == j || (j + 1) % h == i) continue;
            if (tri_overlap(tri[i].data(), tri[j].data())) return false;
        }
    return true;
}

Point VoronoiGraph::edge_point(int e, double t) const {
    const VorEdge& E = edges_[e];
    if (E.v < 0) return verts_[E.u].pos + t * E.dir;
    return lerp(verts_[E.u].pos, verts_[E.v].pos, t);
}

Point VoronoiGraph::point(const GraphPos& x) const {
    if (x.vertex >= 0) return verts_[x.vertex].pos;
    return edge_point(x.edge, x.t);
}

double VoronoiGraph::radius_at(const GraphPos& x) const {
    if (x.vertex >= 0) return verts_[x.vertex].radius;
    return dist(edge_point(x.edge, x.t), sites_[edges_[x.edge].left]);
}

double VoronoiGraph::project(int e, Point p) const {
    const VorEdge& E = edges_[e];
    Point a = verts_[E.u].pos;
    if (E.v < 0) return std::max(0.0, dot(p - a, E.dir));
    Point d = verts_[E.v].pos - a;
    double l2 = norm2(d);
    if (!(l2 > 0)) return 0.0;
    return std::clamp(dot(p - a, d) / l2, 0.0, 1.0);
}

int VoronoiGraph::nearest_site(Point p, int hint) const {
    const auto& T = tri_.tris();
    int s = hint;
    if (s < 0 || !tri_.is_vertex(s)) {
        int t = tri_.locate(p, -1);
        for (int v : T[t].v)
            if (v >= 0) {
                s = v;
                break;
            }
    }
    double best = dist2(p, sites_[s]);
    for (;;) {
        int moved = -1;
        for (int t : tri_.star(s))
            for (int v : T[t].v)
                if (v >= 0 && v != s) {
                    double d = dist2(p, sites_[v]);
                    if (d < best) {
                        best = d;
                        moved = v;
                    }
                }
        if (moved < 0) return s;
        s = moved;
    }
}

Circle VoronoiGraph::mec_at(Point x) const {
    if (!finite(x)) throw Error(ErrorCode::PointNotOnGraph, "non-finite point");
    int s = nearest_site(x);
    double d1 = dist(x, sites_[s]);
    double d2 = std::numeric_limits<double>::infinity();
    const auto& T = tri_.tris();
    for (int t : tri_.star(s))
        for (int v : T[t].v)
            if (v >= 0 && v != s) d2 = std::min(d2, dist(x, sites_[v]));
    if (!(d2 - d1 <= 1e-9 * std::max(1.0, d1))) throw Error(ErrorCode::PointNotOnGraph, "point is not on the Voronoi graph");
    return {x, d1};
}

namespace {

struct Branch {
    int edge;
    int target;  // vertex reached by following the branch, -1 for a ray
    int right, left;
};

}  // namespace

static std::vector<Branch> branches(const VoronoiGraph& g, const GraphPos& c) {
    std::vector<Branch> out;
    const auto& E = g.edges();
    if (c.vertex >= 0) {
        for (int e : g.incident(c.vertex)) {
            const VorEdge& x = E[e];
            if (x.u == c.vertex)
                out.push_back({e, x.v, x.right, x.left});
            else
                out.push_back({e, x.u, x.left, x.right});
        }
    } else {
        const VorEdge& x = E[c.edge];
        out.push_back({c.edge, x.v, x.right, x.left});
        out.push_back({c.edge, x.u, x.left, x.right});
    }
    return out;
}

static Branch pick_branch(const VoronoiGraph& g, const GraphPos& c, const GraphPos& cp) {
    Point pc = g.point(c), pp = g.point(cp);
    double rc = g.radius_at(c), rp = g.radius_at(cp);
    double d = dist(pc, pp);
    if (!(d > 0)) throw Error(ErrorCode::ValidationError, "next_step needs two distinct points");
    if (!(d < rc + rp)) throw Error(ErrorCode::NonOverlappingMecs, "MECs do not overlap");
    double a = (rc * rc - rp * rp + d * d) / (2 * d);
    double h = std::sqrt(std::max(0.0, rc * rc - a * a));
    Point u = (1.0 / d) * (pp - pc);
    Point base = pc + a * u;
    Point t1 = base + h * perp(u), t2 = base - h * perp(u);
    double a1 = std::atan2(t1.y - pc.y, t1.x - pc.x);
    double a2 = std::atan2(t2.y - pc.y, t2.x - pc.x);
    const auto& S = g.sites();
    auto bs = branches(g, c);
    const double tol = 1e-12;
    int best = -1;
    double best_margin = -1e300;
    int chosen = -1;
    for (int i = 0; i < int(bs.size()); ++i) {
        double ar = std::atan2(S[bs[i].right].y - pc.y, S[bs[i].right].x - pc.x);
        double al = std::atan2(S[bs[i].left].y - pc.y, S[bs[i].left].x - pc.x);
        double m = std::min(arc_margin(ar, al, a1), arc_margin(ar, al, a2));
        if (m >= -tol) {
            if (chosen < 0 || bs[i].edge < bs[chosen].edge) chosen = i;
        }
        if (m > best_margin) {
            best_margin = m;
            best = i;
        }
    }
    if (chosen < 0) chosen = best;
    // on an edge the two branches share an id; prefer the one that actually contains both
    if (c.vertex < 0) {
        double ar0 = std::atan2(S[bs[0].right].y - pc.y, S[bs[0].right].x - pc.x);
        double al0 = std::atan2(S[bs[0].left].y - pc.y, S[bs[0].left].x - pc.x);
        double m0 = std::min(arc_margin(ar0, al0, a1), arc_margin(ar0, al0, a2));
        double ar1 = std::atan2(S[bs[1].right].y - pc.y, S[bs[1].right].x - pc.x);
        double al1 = std::atan2(S[bs[1].left].y - pc.y, S[bs[1].left].x - pc.x);
        double m1 = std::min(arc_margin(ar1, al1, a1), arc_margin(ar1, al1, a2));
        chosen = m0 >= m1 ? 0 : 1;
    }
    return bs[chosen];
}

namespace {

// Two circles centred on one edge share its two sites, and every circle of
// that pencil between them contains their lens, so the edge itself is the
// path. Checked before the angular test, which is ill-conditioned here.
int shared_edge(const VoronoiGraph& g, int v, const GraphPos& cp) {
    if (cp.vertex < 0) {
        const VorEdge& E = g.edges()[cp.edge];
        return (E.u == v || E.v == v) ? cp.edge : -1;
    }
    for (int e : g.incident(v))
        if (g.other(e, v) == cp.vertex) return e;
    return -1;
}

}  // namespace

int VoronoiGraph::next_step(const GraphPos& c, const GraphPos& cp) const {
    if (c.vertex >= 0) {
        int e = shared_edge(*this, c.vertex, cp);
        if (e >= 0) return e;
    }
    return pick_branch(*this, c, cp).edge;
}

bool VoronoiGraph::walk_path(const GraphPos& c, const GraphPos& cp, const std::function<bool(int)>& visit) const {
    if (c.vertex >= 0 && !visit(c.vertex)) return false;
    if (c.vertex >= 0 && c.vertex == cp.vertex) return true;
    if (c.vertex < 0 && cp.vertex < 0 && c.edge == cp.edge) return true;
    if (tl_stamp.size() < verts_.size()) tl_stamp.assign(verts_.size(), 0);
    if (++tl_clock == 0) {
        std::fill(tl_stamp.begin(), tl_stamp.end(), 0);
        tl_clock = 1;
    }
    if (c.vertex >= 0) tl_stamp[c.vertex] = tl_clock;
    GraphPos cur = c;
    for (std::size_t step = 0; step <= verts_.size() + 1; ++step) {
        int w;
        if (int e = cur.vertex >= 0 ? shared_edge(*this, cur.vertex, cp) : -1; e >= 0) {
            if (cp.vertex < 0) return true;
            w = cp.vertex;
        } else {
            Branch b = pick_branch(*this, cur, cp);
            if (cp.vertex < 0 && cp.edge == b.edge) return true;
            w = b.target;
        }
        if (w < 0) throw Error(ErrorCode::InternalError, "unique path left the graph");
        if (tl_stamp[w] == tl_clock) throw Error(ErrorCode::InternalError, "unique path revisited a vertex");
        tl_stamp[w] = tl_clock;
        if (!visit(w)) return false;
        if (w == cp.vertex) return true;
        cur = GraphPos::at_vertex(w);
    }
    throw Error(ErrorCode::InternalError, "unique path did not terminate");
}

UniquePath VoronoiGraph::unique_path(const GraphPos& c, const GraphPos& cp) const {
    UniquePath P;
    int prev = c.vertex;
    GraphPos start = c;
    walk_path(c, cp, [&](int v) {
        if (!P.vertices.empty() || start.vertex < 0) {
            // edge between the previous position and v
            if (prev >= 0) {
                for (int e : adj_[prev])
                    if (other(e, prev) == v) {
                        P.edges.push_back(e);
                        break;
                    }
            } else {
                P.edges.push_back(start.edge);
            }
        }
        P.vertices.push_back(v);
        prev = v;
        return true;
    });
    if (cp.vertex < 0) P.edges.push_back(cp.edge);
    return P;
}

bool VoronoiGraph::inside_hull(Point q) const {
    int t = tri_.locate(q, -1);
    if (tri_.is_ghost(t)) return false;
    const auto& T = tri_.tris()[t];
    for (int k = 0; k < 3; ++k) {
        if (!tri_.is_ghost(T.nb[k])) continue;
        if (orient_sign(sites_[T.v[(k + 1) % 3]], sites_[T.v[(k + 2) % 3]], q) <= 0) return false;
    }
    return true;
}

Point VoronoiGraph::outward_witness(Point q) const {
    const int h = int(hull_.size());
    double best = std::numeric_limits<double>::infinity();
    Point dir{1, 0};
    for (int i = 0; i < h; ++i) {
        Point a = sites_[hull_[i]], b = sites_[hull_[(i + 1) % h]];
        Point d = b - a;
        double l2 = norm2(d);
        double t = std::clamp(dot(q - a, d) / l2, 0.0, 1.0);
        double dd = dist(q, lerp(a, b, t));
        if (dd < best) {
            best = dd;
            Point n = unit(Point{d.y, -d.x});
            if (t > 0 && t < 1) {
                dir = n;
            } else {
                int j = t <= 0 ? (i + h - 1) % h : (i + 1) % h;
                Point a2 = sites_[hull_[j]], b2 = sites_[hull_[(j + 1) % h]];
                Point d2 = b2 - a2;
                Point n2 = unit(Point{d2.y, -d2.x});
                dir = unit(n + n2);
            }
        }
    }
    return dir;
}

}  // namespace qmec
