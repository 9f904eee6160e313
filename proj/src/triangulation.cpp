#include "qmec/triangulation.hpp"

#include <algorithm>
#include <numeric>
#include <random>

namespace qmec {

namespace {

std::uint64_t hilbert_d(std::uint32_t x, std::uint32_t y, int order) {
    std::uint64_t d = 0;
    for (std::uint32_t s = 1u << (order - 1); s > 0; s >>= 1) {
        std::uint32_t rx = (x & s) ? 1 : 0;
        std::uint32_t ry = (y & s) ? 1 : 0;
        d += std::uint64_t(s) * s * ((3 * rx) ^ ry);
        if (ry == 0) {
            if (rx == 1) {
                x = s - 1 - x;
                y = s - 1 - y;
            }
            std::swap(x, y);
        }
    }
    return d;
}

int dup_check(const std::vector<Point>& pts) {
    std::vector<int> idx(pts.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::sort(idx.begin(), idx.end(), [&](int a, int b) { return lex_less(pts[a], pts[b]); });
    for (std::size_t i = 1; i < idx.size(); ++i)
        if (pts[idx[i]] == pts[idx[i - 1]]) return idx[i];
    return -1;
}

}  // namespace

void hilbert_sort(const std::vector<Point>& pts, std::vector<int>& idx) {
    if (idx.size() < 2) return;
    double x0 = pts[idx[0]].x, x1 = x0, y0 = pts[idx[0]].y, y1 = y0;
    for (int i : idx) {
        x0 = std::min(x0, pts[i].x);
        x1 = std::max(x1, pts[i].x);
        y0 = std::min(y0, pts[i].y);
        y1 = std::max(y1, pts[i].y);
    }
    double span = std::max(x1 - x0, y1 - y0);
    if (!(span > 0)) return;
    const int order = 16;
    const double scale = double((1u << order) - 1) / span;
    std::vector<std::pair<std::uint64_t, int>> keys;
    keys.reserve(idx.size());
    for (int i : idx) {
        auto gx = std::uint32_t((pts[i].x - x0) * scale);
        auto gy = std::uint32_t((pts[i].y - y0) * scale);
        keys.emplace_back(hilbert_d(gx, gy, order), i);
    }
    std::stable_sort(keys.begin(), keys.end(), [](auto& a, auto& b) { return a.first < b.first; });
    for (std::size_t k = 0; k < idx.size(); ++k) idx[k] = keys[k].second;
}

Triangulation Triangulation::delaunay(const std::vector<Point>& pts, std::uint64_t seed) {
    Triangulation t;
    t.pts_ = pts;
    t.w_.assign(pts.size(), 0.0);
    t.weighted_ = false;
    t.run(seed);
    return t;
}

Triangulation Triangulation::regular(const std::vector<Point>& pts, const std::vector<double>& w,
                                     std::uint64_t seed) {
    Triangulation t;
    t.pts_ = pts;
    t.w_ = w;
    t.weighted_ = true;
    t.run(seed);
    return t;
}

bool Triangulation::is_ghost(int t) const {
    const auto& v = tris_[t].v;
    return v[0] == kGhost || v[1] == kGhost || v[2] == kGhost;
}

// finite edge (v,u) of a ghost triangle; outside lies to the left of v->u
static inline std::pair<int, int> ghost_edge(const Triangulation::Tri& T) {
    if (T.v[2] == Triangulation::kGhost) return {T.v[0], T.v[1]};
    if (T.v[1] == Triangulation::kGhost) return {T.v[2], T.v[0]};
    return {T.v[1], T.v[2]};
}

int Triangulation::side_test(int t, int p) const {
    const Tri& T = tris_[t];
    const Point& q = pts_[p];
    if (is_ghost(t)) {
        auto [a, b] = ghost_edge(T);
        int o = orient_sign(pts_[a], pts_[b], q);
        if (o != 0) return o;
        Point lo = pts_[a], hi = pts_[b];
        if (lex_less(hi, lo)) std::swap(lo, hi);
        if (!(lex_less(lo, q) && lex_less(q, hi))) return -1;
        if (!weighted_) return 1;
        return power_sign_collinear(pts_[a], w_[a], pts_[b], w_[b], q, w_[p]);
    }
    int a = T.v[0], b = T.v[1], c = T.v[2];
    if (!weighted_) return incircle_sign(pts_[a], pts_[b], pts_[c], q);
    return power_sign(pts_[a], w_[a], pts_[b], w_[b], pts_[c], w_[c], q, w_[p]);
}

bool Triangulation::conflicts(int t, int p) const { return side_test(t, p) > 0; }

bool Triangulation::on_circle(int t, int p) const { return side_test(t, p) == 0; }

int Triangulation::locate(Point p, int hint) const {
    int t = hint;
    if (t < 0 || t >= int(tris_.size())) t = 0;
    if (is_ghost(t)) {
        const Tri& T = tris_[t];
        for (int k = 0; k < 3; ++k)
            if (T.v[k] == kGhost) t = T.nb[k];
    }
    std::uint32_t rnd = 2463534242u;
    const std::size_t limit = 4 * tris_.size() + 64;
    for (std::size_t step = 0; step < limit; ++step) {
        if (is_ghost(t)) return t;
        const Tri& T = tris_[t];
        rnd ^= rnd << 13;
        rnd ^= rnd >> 17;
        rnd ^= rnd << 5;
        int k0 = int(rnd % 3);
        bool moved = false;
        for (int i = 0; i < 3; ++i) {
            int k = (k0 + i) % 3;
            int a = T.v[(k + 1) % 3], b = T.v[(k + 2) % 3];
            if (orient_sign(pts_[a], pts_[b], p) < 0) {
                t = T.nb[k];
                moved = true;
                break;
            }
        }
        if (!moved) return t;
    }
    // walk did not settle; fall back to a scan
    for (int s = 0; s < int(tris_.size()); ++s) {
        if (is_ghost(s)) continue;
        const Tri& T = tris_[s];
        bool inside = true;
        for (int k = 0; k < 3 && inside; ++k)
            if (orient_sign(pts_[T.v[(k + 1) % 3]], pts_[T.v[(k + 2) % 3]], p) < 0) inside = false;
        if (inside) return s;
    }
    for (int s = 0; s < int(tris_.size()); ++s) {
        if (!is_ghost(s)) continue;
        auto [a, b] = ghost_edge(tris_[s]);
        if (orient_sign(pts_[a], pts_[b], p) > 0) return s;
    }
    throw Error(ErrorCode::InternalError, "triangulation: point location failed");
}

void Triangulation::run(std::uint64_t seed) {
    const int n = int(pts_.size());
    if (n < 3) throw Error(ErrorCode::TooFewSites, "need at least 3 points");
    for (const auto& p : pts_)
        if (!finite(p)) throw Error(ErrorCode::ValidationError, "non-finite coordinate");
    if (int d = dup_check(pts_); d >= 0) throw Error(ErrorCode::DuplicateSites, "duplicate point");

    // biased randomized insertion order: random rounds, each Hilbert-sorted
    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::mt19937_64 rng(seed);
    std::shuffle(order.begin(), order.end(), rng);
    {
        std::size_t end = order.size();
        while (end > 0) {
            std::size_t begin = end > 64 ? end / 2 : 0;
            std::vector<int> chunk(order.begin() + begin, order.begin() + end);
            hilbert_sort(pts_, chunk);
            std::copy(chunk.begin(), chunk.end(), order.begin() + begin);
            end = begin;
        }
    }

    int a = order[0], b = order[1], c = -1;
    int ci = -1;
    for (int i = 2; i < n; ++i)
        if (orient_sign(pts_[a], pts_[b], pts_[order[i]]) != 0) {
            c = order[i];
            ci = i;
            break;
        }
    if (c < 0) throw Error(ErrorCode::AllCollinear, "all points are collinear");
    order.erase(order.begin() + ci);
    order.erase(order.begin(), order.begin() + 2);
    if (orient_sign(pts_[a], pts_[b], pts_[c]) < 0) std::swap(b, c);

    vertex_tri_.assign(n, -1);
    tris_.clear();
    tris_.push_back({{a, b, c}, {1, 2, 3}});
    tris_.push_back({{c, b, kGhost}, {3, 2, 0}});
    tris_.push_back({{a, c, kGhost}, {1, 3, 0}});
    tris_.push_back({{b, a, kGhost}, {2, 1, 0}});
    vertex_tri_[a] = vertex_tri_[b] = vertex_tri_[c] = 0;

    std::vector<int> free_slots;
    std::vector<int> mark;  // stamp per triangle
    std::vector<int> start_tri(n + 1, -1);
    std::vector<int> cavity, stack, created;
    struct BEdge {
        int a, b, out, out_k;
    };
    std::vector<BEdge> boundary;
    std::vector<int> touched;
    int stamp = 0;
    int hint = 0;

    for (int p : order) {
        int t = locate(pts_[p], hint);
        if (!conflicts(t, p)) continue;  // redundant under weights
        ++stamp;
        mark.resize(tris_.size(), 0);
        cavity.clear();
        boundary.clear();
        stack.assign(1, t);
        mark[t] = stamp;
        while (!stack.empty()) {
            int s = stack.back();
            stack.pop_back();
            cavity.push_back(s);
            for (int k = 0; k < 3; ++k) {
                int nb = tris_[s].nb[k];
                if (mark[nb] == stamp) continue;
                if (conflicts(nb, p)) {
                    mark[nb] = stamp;
                    stack.push_back(nb);
                } else {
                    int back = 0;
                    while (tris_[nb].nb[back] != s) ++back;
                    boundary.push_back({tris_[s].v[(k + 1) % 3], tris_[s].v[(k + 2) % 3], nb, back});
                }
            }
        }
        touched.clear();
        for (int s : cavity)
            for (int v : tris_[s].v)
                if (v != kGhost) {
                    vertex_tri_[v] = -1;
                    touched.push_back(v);
                }
        for (int s : cavity) {
            tris_[s].v = {-2, -2, -2};
            free_slots.push_back(s);
        }
        created.clear();
        for (const auto& e : boundary) {
            int id;
            if (!free_slots.empty()) {
                id = free_slots.back();
                free_slots.pop_back();
            } else {
                id = int(tris_.size());
                tris_.push_back({});
            }
            tris_[id].v = {e.a, e.b, p};
            tris_[id].nb = {-1, -1, e.out};
            tris_[e.out].nb[e.out_k] = id;
            start_tri[e.a + 1] = id;
            created.push_back(id);
        }
        for (int id : created) {
            int b2 = tris_[id].v[1];
            int m = start_tri[b2 + 1];
            tris_[id].nb[0] = m;
            tris_[m].nb[1] = id;
        }
        for (int id : created) {
            start_tri[tris_[id].v[0] + 1] = -1;
            for (int v : tris_[id].v)
                if (v != kGhost) vertex_tri_[v] = id;
            if (!is_ghost(id)) hint = id;
        }
        (void)touched;  // vertices left at -1 are now hidden
    }

    // compact
    std::vector<int> remap(tris_.size(), -1);
    std::vector<Tri> out;
    out.reserve(tris_.size());
    for (int s = 0; s < int(tris_.size()); ++s)
        if (tris_[s].v[0] != -2) {
            remap[s] = int(out.size());
            out.push_back(tris_[s]);
        }
    for (auto& T : out)
        for (auto& x : T.nb) x = remap[x];
    tris_ = std::move(out);
    vertex_tri_.assign(n, -1);
    for (int s = 0; s < int(tris_.size()); ++s)
        for (int v : tris_[s].v)
            if (v != kGhost && (vertex_tri_[v] < 0 || is_ghost(vertex_tri_[v]))) vertex_tri_[v] = s;
}

std::vector<int> Triangulation::star(int i) const {
    std::vector<int> out;
    int t0 = vertex_tri_[i];
    if (t0 < 0) return out;
    int t = t0;
    do {
        out.push_back(t);
        const Tri& T = tris_[t];
        int k = 0;
        while (T.v[k] != i) ++k;
        t = T.nb[(k + 1) % 3];
    } while (t != t0 && out.size() <= tris_.size());
    return out;
}

std::vector<int> Triangulation::triangle_classes(int* num_classes) const {
    const int m = int(tris_.size());
    std::vector<int> parent(m);
    std::iota(parent.begin(), parent.end(), 0);
    auto find = [&](int x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    };
    for (int t = 0; t < m; ++t) {
        if (is_ghost(t)) continue;
        for (int k = 0; k < 3; ++k) {
            int n = tris_[t].nb[k];
            if (n < t || is_ghost(n)) continue;
            int j = 0;
            while (tris_[n].nb[j] != t) ++j;
            if (on_circle(t, tris_[n].v[j])) parent[find(t)] = find(n);
        }
    }
    std::vector<int> cls(m, -1), id(m, -1);
    int cnt = 0;
    for (int t = 0; t < m; ++t) {
        if (is_ghost(t)) continue;
        int r = find(t);
        if (id[r] < 0) id[r] = cnt++;
        cls[t] = id[r];
    }
    if (num_classes) *num_classes = cnt;
    return cls;
}

}  // namespace qmec
