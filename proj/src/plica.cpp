#include "qmec/plica.hpp"

#include <algorithm>
#include <numeric>
#include <random>

namespace qmec {

// ---------------------------------------------------------------- trapezoids

int TrapezoidalMap::seg_side(int s, int t) const {
    const Segment& S = segs_[s];
    const Segment& T = segs_[t];
    if (S.p == T.p) return orient_sign(T.p, T.q, S.q);
    if (lex_less(T.p, S.p)) {
        int o = orient_sign(T.p, T.q, S.p);
        return o != 0 ? o : orient_sign(T.p, T.q, S.q);
    }
    int o = orient_sign(S.p, S.q, T.p);
    return o != 0 ? -o : -orient_sign(S.p, S.q, T.q);
}

// trapezoid containing the point just after r along segment s
Point TrapezoidalMap::endpoint(int code) const {
    int c = -code - 1, s = c >> 1;
    if (collapsed_) return lines_[s][c & 1];
    return (c & 1) ? segs_[s].q : segs_[s].p;
}

int TrapezoidalMap::locate_on(int s, Point r) const {
    int v = 0;
    while (nodes_[v].left >= 0) {
        const Node& N = nodes_[v];
        if (N.idx < 0)
            v = lex_less(r, endpoint(N.idx)) ? N.left : N.right;
        else
            v = seg_side(s, N.idx) > 0 ? N.left : N.right;
    }
    return nodes_[v].idx;
}

int TrapezoidalMap::locate(Point q) const {
    if (nodes_.empty()) return -1;
    int v = 0;
    while (nodes_[v].left >= 0) {
        const Node& N = nodes_[v];
        if (N.idx < 0) {
            v = lex_less(q, endpoint(N.idx)) ? N.left : N.right;
        } else {
            Point a = collapsed_ ? lines_[N.idx][0] : segs_[N.idx].p;
            Point b = collapsed_ ? lines_[N.idx][1] : segs_[N.idx].q;
            v = orient_sign(a, b, q) >= 0 ? N.left : N.right;
        }
    }
    return collapsed_ ? nodes_[v].idx : traps_[nodes_[v].idx].face;
}

void TrapezoidalMap::collapse() {
    for (auto& N : nodes_)
        if (N.left < 0) N.idx = traps_[N.idx].face;
    traps_.clear();
    traps_.shrink_to_fit();
    nodes_.shrink_to_fit();
    lines_.reserve(segs_.size());
    for (const auto& S : segs_) lines_.push_back({S.p, S.q});
    segs_.clear();
    segs_.shrink_to_fit();
    collapsed_ = true;
}

std::size_t TrapezoidalMap::num_leaves() const {
    return std::count_if(nodes_.begin(), nodes_.end(), [](const Node& N) { return N.left < 0; });
}

Point TrapezoidalMap::sample(const Trap& t) const {
    double x0 = t.lp_inf ? frame_x0_ : t.lp.x;
    double x1 = t.rp_inf ? frame_x1_ : t.rp.x;
    return {0.5 * (x0 + x1), 0.5 * (frame_lo_ + frame_hi_)};
}

std::size_t TrapezoidalMap::memory_bytes() const {
    return segs_.capacity() * sizeof(Segment) + lines_.capacity() * sizeof(lines_[0]) + traps_.capacity() * sizeof(Trap) + nodes_.capacity() * sizeof(Node) +
           leaf_of_.capacity() * sizeof(int);
}

bool TrapezoidalMap::build(std::vector<Segment> segs, std::uint64_t seed) {
    segs_ = std::move(segs);
    lines_.clear();
    traps_.clear();
    nodes_.clear();
    leaf_of_.clear();
    collapsed_ = false;
    if (segs_.empty()) return false;
    frame_x0_ = frame_x1_ = segs_[0].p.x;
    frame_lo_ = frame_hi_ = segs_[0].p.y;
    for (const auto& s : segs_)
        for (Point p : {s.p, s.q}) {
            frame_x0_ = std::min(frame_x0_, p.x);
            frame_x1_ = std::max(frame_x1_, p.x);
            frame_lo_ = std::min(frame_lo_, p.y);
            frame_hi_ = std::max(frame_hi_, p.y);
        }
    traps_.push_back(Trap{});
    nodes_.push_back({0, -1, -1});
    leaf_of_.push_back(0);

    std::vector<int> order(segs_.size());
    std::iota(order.begin(), order.end(), 0);
    std::mt19937_64 rng(seed);
    std::shuffle(order.begin(), order.end(), rng);

    auto new_trap = [&](const Trap& t) {
        traps_.push_back(t);
        nodes_.push_back({int(traps_.size()) - 1, -1, -1});
        leaf_of_.push_back(int(nodes_.size()) - 1);
        return int(traps_.size()) - 1;
    };

    std::vector<int> D, up, lo;
    for (int s : order) {
        const Point P = segs_[s].p, Q = segs_[s].q;
        D.clear();
        int t = locate_on(s, P);
        D.push_back(t);
        while (!traps_[t].rp_inf && lex_less(traps_[t].rp, Q)) {
            Point r = traps_[t].rp;
            int nt = locate_on(s, r);
            if (nt == t || !(traps_[nt].rp_inf || lex_less(r, traps_[nt].rp))) return false;
            if (D.size() > traps_.size()) return false;
            D.push_back(nt);
            t = nt;
        }
        const int k = int(D.size()) - 1;
        const Trap first = traps_[D[0]];
        const Trap last = traps_[D[k]];
        bool hasA = first.lp_inf || first.lp != P;
        bool hasB = last.rp_inf || last.rp != Q;

        up.assign(k + 1, -1);
        lo.assign(k + 1, -1);
        {
            Trap u;
            u.top = first.top;
            u.bot = s;
            u.lp = P;
            u.lp_inf = false;
            int cu = new_trap(u);
            up[0] = cu;
            Trap l;
            l.top = s;
            l.bot = first.bot;
            l.lp = P;
            l.lp_inf = false;
            int cl = new_trap(l);
            lo[0] = cl;
            for (int j = 1; j <= k; ++j) {
                Point r = traps_[D[j - 1]].rp;
                int o = orient_sign(P, Q, r);
                if (o <= 0) {
                    up[j] = cu;
                } else {
                    traps_[cu].rp = r;
                    traps_[cu].rp_inf = false;
                    Trap nu;
                    nu.top = traps_[D[j]].top;
                    nu.bot = s;
                    nu.lp = r;
                    nu.lp_inf = false;
                    cu = new_trap(nu);
                    up[j] = cu;
                }
                if (o > 0) {
                    lo[j] = cl;
                } else {
                    traps_[cl].rp = r;
                    traps_[cl].rp_inf = false;
                    Trap nl;
                    nl.top = s;
                    nl.bot = traps_[D[j]].bot;
                    nl.lp = r;
                    nl.lp_inf = false;
                    cl = new_trap(nl);
                    lo[j] = cl;
                }
            }
            traps_[cu].rp = Q;
            traps_[cu].rp_inf = false;
            traps_[cl].rp = Q;
            traps_[cl].rp_inf = false;
        }
        int A = -1, B = -1;
        if (hasA) {
            Trap a;
            a.top = first.top;
            a.bot = first.bot;
            a.lp = first.lp;
            a.lp_inf = first.lp_inf;
            a.rp = P;
            a.rp_inf = false;
            A = new_trap(a);
        }
        if (hasB) {
            Trap b;
            b.top = last.top;
            b.bot = last.bot;
            b.lp = Q;
            b.lp_inf = false;
            b.rp = last.rp;
            b.rp_inf = last.rp_inf;
            B = new_trap(b);
        }
        const int pi = -(2 * s) - 1, qi = -(2 * s + 1) - 1;
        for (int j = 0; j <= k; ++j) {
            int n = leaf_of_[D[j]];
            nodes_.push_back({s, leaf_of_[up[j]], leaf_of_[lo[j]]});
            int root = int(nodes_.size()) - 1;
            if (j == k && hasB) {
                nodes_.push_back({qi, root, leaf_of_[B]});
                root = int(nodes_.size()) - 1;
            }
            if (j == 0 && hasA) {
                nodes_.push_back({pi, leaf_of_[A], root});
                root = int(nodes_.size()) - 1;
            }
            nodes_[n] = nodes_[root];
            leaf_of_[D[j]] = -1;
        }
    }

    // drop dead trapezoids
    std::vector<int> remap(traps_.size(), -1);
    std::vector<Trap> live;
    for (int t = 0; t < int(traps_.size()); ++t)
        if (leaf_of_[t] >= 0) {
            remap[t] = int(live.size());
            live.push_back(traps_[t]);
        }
    for (auto& N : nodes_)
        if (N.left < 0) N.idx = remap[N.idx];
    traps_ = std::move(live);
    leaf_of_.clear();
    leaf_of_.shrink_to_fit();
    for (auto& t : traps_) {
        if (t.top >= 0)
            t.face = segs_[t.top].below;
        else if (t.bot >= 0)
            t.face = segs_[t.bot].above;
        else
            t.face = -1;
    }
    return true;
}

// ---------------------------------------------------------------- PLiCA

double PlicaIndex::power(int site, Point q) const { return dist2(q, centers_[site]) - weights_[site]; }

int PlicaIndex::descend(int s, Point q) const {
    double best = power(s, q);
    for (;;) {
        int next = -1;
        for (int k = nb_off_[s]; k < nb_off_[s + 1]; ++k) {
            double p = power(nb_[k], q);
            if (p < best) {
                best = p;
                next = nb_[k];
            }
        }
        if (next < 0) return s;
        s = next;
    }
}

// index into env_
int PlicaIndex::line_argmin(Point q) const {
    if (env_.size() == 1) return 0;
    double s = dot(q - origin_, axis_);
    int k = int(std::upper_bound(breaks_.begin(), breaks_.end(), s) - breaks_.begin());
    int best = k;
    double bp = power(env_[k], q);
    for (int j : {k - 1, k + 1})
        if (j >= 0 && j < int(env_.size()) && power(env_[j], q) < bp) {
            bp = power(env_[j], q);
            best = j;
        }
    return best;
}

PlicaIndex PlicaIndex::build(const std::vector<Circle>& circles, std::uint64_t seed) {
    if (circles.empty()) throw Error(ErrorCode::EmptyInput, "PLiCA needs at least one circle");
    PlicaIndex X;
    X.circles_ = circles;
    if (circles.size() <= kScanLimit) {
        X.scan_mode_ = true;
        return X;
    }
    std::vector<int> ids(circles.size());
    std::iota(ids.begin(), ids.end(), 0);
    std::sort(ids.begin(), ids.end(), [&](int a, int b) {
        if (circles[a].center != circles[b].center) return lex_less(circles[a].center, circles[b].center);
        if (circles[a].radius != circles[b].radius) return circles[a].radius > circles[b].radius;
        return a < b;
    });
    for (std::size_t i = 0; i < ids.size(); ++i) {
        if (i > 0 && circles[ids[i]].center == circles[ids[i - 1]].center) continue;
        X.rep_.push_back(ids[i]);
        X.centers_.push_back(circles[ids[i]].center);
        X.weights_.push_back(circles[ids[i]].radius * circles[ids[i]].radius);
    }
    const int m = int(X.rep_.size());

    bool collinear = true;
    for (int i = 2; i < m && collinear; ++i)
        if (orient_sign(X.centers_[0], X.centers_[1], X.centers_[i]) != 0) collinear = false;
    if (m <= 2 || collinear) {
        X.line_mode_ = true;
        X.origin_ = X.centers_[0];  // lexicographically smallest
        if (m == 1) {
            X.env_ = {0};
            return X;
        }
        X.axis_ = unit(X.centers_[m - 1] - X.centers_[0]);
        std::vector<double> s(m);
        for (int i = 0; i < m; ++i) s[i] = dot(X.centers_[i] - X.origin_, X.axis_);
        std::vector<int> by(m);
        std::iota(by.begin(), by.end(), 0);
        std::sort(by.begin(), by.end(), [&](int a, int b) { return s[a] < s[b]; });
        // lines f(x) = -2 s_i x + s_i^2 - w_i, slopes decreasing along `by`
        auto slope = [&](int i) { return -2.0 * s[i]; };
        auto icpt = [&](int i) { return s[i] * s[i] - X.weights_[i]; };
        auto cross_x = [&](int a, int b) { return (icpt(b) - icpt(a)) / (slope(a) - slope(b)); };
        std::vector<int> st;
        for (int i : by) {
            while (st.size() >= 2 && cross_x(st[st.size() - 2], i) <= cross_x(st[st.size() - 2], st.back())) st.pop_back();
            st.push_back(i);
        }
        X.env_ = st;
        for (std::size_t k = 0; k + 1 < st.size(); ++k) X.breaks_.push_back(cross_x(st[k], st[k + 1]));
        return X;
    }

    const Triangulation tri = Triangulation::regular(X.centers_, X.weights_, seed);
    const auto& T = tri.tris();
    {
        std::vector<std::vector<int>> adj(m);
        for (int t = 0; t < int(T.size()); ++t) {
            if (tri.is_ghost(t)) {
                for (int k = 0; k < 3; ++k)
                    if (T[t].v[k] >= 0) X.hull_sites_.push_back(T[t].v[k]);
                continue;
            }
            for (int k = 0; k < 3; ++k) adj[T[t].v[k]].push_back(T[t].v[(k + 1) % 3]);
        }
        std::sort(X.hull_sites_.begin(), X.hull_sites_.end());
        X.hull_sites_.erase(std::unique(X.hull_sites_.begin(), X.hull_sites_.end()), X.hull_sites_.end());
        X.nb_off_.assign(m + 1, 0);
        for (int i = 0; i < m; ++i) {
            std::sort(adj[i].begin(), adj[i].end());
            adj[i].erase(std::unique(adj[i].begin(), adj[i].end()), adj[i].end());
            X.nb_off_[i + 1] = X.nb_off_[i] + int(adj[i].size());
        }
        X.nb_.reserve(X.nb_off_[m]);
        for (int i = 0; i < m; ++i) X.nb_.insert(X.nb_.end(), adj[i].begin(), adj[i].end());
    }

    int ncls = 0;
    auto cls = tri.triangle_classes(&ncls);
    std::vector<Point> pv(ncls);
    std::vector<char> done(ncls, 0);
    const auto& C = X.centers_;
    const auto& W = X.weights_;
    for (int t = 0; t < int(T.size()); ++t) {
        int c = cls[t];
        if (c < 0 || done[c]) continue;
        done[c] = 1;
        int a = T[t].v[0], b = T[t].v[1], d = T[t].v[2];
        Point B = C[b] - C[a], D = C[d] - C[a];
        double rb = 0.5 * (norm2(B) - W[b] + W[a]);
        double rd = 0.5 * (norm2(D) - W[d] + W[a]);
        double det = B.x * D.y - B.y * D.x;
        pv[c] = C[a] + Point{(rb * D.y - rd * B.y) / det, (B.x * rd - D.x * rb) / det};
    }

    // frame: twice the circles' box, grown to hold every power vertex
    double x0 = 1e300, x1 = -1e300, y0 = 1e300, y1 = -1e300;
    for (const auto& c : circles) {
        x0 = std::min(x0, c.center.x - c.radius);
        x1 = std::max(x1, c.center.x + c.radius);
        y0 = std::min(y0, c.center.y - c.radius);
        y1 = std::max(y1, c.center.y + c.radius);
    }
    {
        double cx = 0.5 * (x0 + x1), cy = 0.5 * (y0 + y1), hx = x1 - x0, hy = y1 - y0;
        x0 = cx - hx;
        x1 = cx + hx;
        y0 = cy - hy;
        y1 = cy + hy;
    }
    if (ncls > 0) {
        double px0 = 1e300, px1 = -1e300, py0 = 1e300, py1 = -1e300;
        for (auto p : pv) {
            px0 = std::min(px0, p.x);
            px1 = std::max(px1, p.x);
            py0 = std::min(py0, p.y);
            py1 = std::max(py1, p.y);
        }
        double cx = 0.5 * (px0 + px1), cy = 0.5 * (py0 + py1);
        double hx = 0.55 * (px1 - px0) + 1e-9 * (1 + std::fabs(cx)), hy = 0.55 * (py1 - py0) + 1e-9 * (1 + std::fabs(cy));
        x0 = std::min(x0, cx - hx);
        x1 = std::max(x1, cx + hx);
        y0 = std::min(y0, cy - hy);
        y1 = std::max(y1, cy + hy);
    }
    X.bx0_ = x0;
    X.bx1_ = x1;
    X.by0_ = y0;
    X.by1_ = y1;

    std::vector<TrapezoidalMap::Segment> segs;
    auto add = [&](Point u, Point w, int left, int right) {
        if (u == w) return;
        TrapezoidalMap::Segment s;
        if (lex_less(u, w)) {
            s.p = u;
            s.q = w;
            s.above = left;
            s.below = right;
        } else {
            s.p = w;
            s.q = u;
            s.above = right;
            s.below = left;
        }
        segs.push_back(s);
    };
    for (int t = 0; t < int(T.size()); ++t) {
        if (tri.is_ghost(t)) continue;
        for (int k = 0; k < 3; ++k) {
            int n = T[t].nb[k];
            int a = T[t].v[(k + 1) % 3], b = T[t].v[(k + 2) % 3];
            Point u = pv[cls[t]];
            if (tri.is_ghost(n)) {
                Point d = C[b] - C[a];
                Point dir = unit(Point{d.y, -d.x});
                double te = 1e300;
                if (dir.x > 0) te = std::min(te, (x1 - u.x) / dir.x);
                if (dir.x < 0) te = std::min(te, (x0 - u.x) / dir.x);
                if (dir.y > 0) te = std::min(te, (y1 - u.y) / dir.y);
                if (dir.y < 0) te = std::min(te, (y0 - u.y) / dir.y);
                Point w = u + te * dir;
                w.x = std::clamp(w.x, x0, x1);
                w.y = std::clamp(w.y, y0, y1);
                add(u, w, b, a);
            } else if (n > t && cls[n] != cls[t]) {
                add(u, pv[cls[n]], b, a);
            }
        }
    }
    if (!X.trap_.build(std::move(segs), seed ^ 0x9e3779b97f4a7c15ull)) X.trap_ = TrapezoidalMap{};
    if (!X.trap_.empty()) {
        int start = X.hull_sites_[0];
        X.trap_.label_open([&](Point p) { return X.descend(start, p); });
    }
    return X;
}

int PlicaIndex::argmin_site(Point q) const {
    if (line_mode_) return env_[line_argmin(q)];
    int s = -1;
    bool in_box = q.x >= bx0_ && q.x <= bx1_ && q.y >= by0_ && q.y <= by1_;
    if (in_box && !trap_.empty()) s = trap_.locate(q);
    if (s < 0) {
        double best = 1e300;
        for (int h : hull_sites_) {
            double p = power(h, q);
            if (p < best) {
                best = p;
                s = h;
            }
        }
    }
    return descend(s, q);
}

int PlicaIndex::raw_locate(Point q) const {
    if (trap_.empty()) return -1;
    if (!(q.x >= bx0_ && q.x <= bx1_ && q.y >= by0_ && q.y <= by1_)) return -1;
    int s = trap_.locate(q);
    return s < 0 ? -1 : rep_[s];
}

int PlicaIndex::nearest_power(Point q) const {
    if (scan_mode_) {
        int best = 0;
        for (int i = 1; i < int(circles_.size()); ++i)
            if (dist2(q, circles_[i].center) - circles_[i].radius * circles_[i].radius <
                dist2(q, circles_[best].center) - circles_[best].radius * circles_[best].radius)
                best = i;
        return best;
    }
    return rep_[argmin_site(q)];
}

std::optional<int> PlicaIndex::query(Point q) const {
    if (scan_mode_) {
        int w = nearest_power(q);
        if (contains(circles_[w], q)) return w;
        for (int i = 0; i < int(circles_.size()); ++i)
            if (contains(circles_[i], q)) return i;
        return std::nullopt;
    }
    if (line_mode_) {
        int k = line_argmin(q);
        for (int j : {k, k - 1, k + 1})
            if (j >= 0 && j < int(env_.size()) && contains(circles_[rep_[env_[j]]], q)) return rep_[env_[j]];
        return std::nullopt;
    }
    int s = argmin_site(q);
    if (contains(circles_[rep_[s]], q)) return rep_[s];
    // boundary cases within tolerance: look at the neighbouring cells too
    for (int k = nb_off_[s]; k < nb_off_[s + 1]; ++k)
        if (contains(circles_[rep_[nb_[k]]], q)) return rep_[nb_[k]];
    return std::nullopt;
}

std::size_t PlicaIndex::memory_bytes() const {
    std::size_t b = circles_.capacity() * sizeof(Circle) + rep_.capacity() * sizeof(int) +
                    centers_.capacity() * sizeof(Point) + weights_.capacity() * sizeof(double) +
                    env_.capacity() * sizeof(int) + breaks_.capacity() * sizeof(double) +
                    nb_off_.capacity() * sizeof(int) + nb_.capacity() * sizeof(int) +
                    hull_sites_.capacity() * sizeof(int) + trap_.memory_bytes();
    return b;
}

}  // namespace qmec
