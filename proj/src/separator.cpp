#include "qmec/separator.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "qmec/voronoi_graph.hpp"

namespace qmec {

PlaneGraph induced_subgraph(const VoronoiGraph& g, const std::vector<int>& verts) {
    std::vector<int> local(g.vertices().size(), -1);
    for (int i = 0; i < int(verts.size()); ++i) local[verts[i]] = i;
    PlaneGraph pg;
    pg.adj.resize(verts.size());
    for (int i = 0; i < int(verts.size()); ++i) {
        auto& out = pg.adj[i];
        for (int e : g.incident(verts[i])) {
            if (g.edges()[e].is_ray()) continue;
            int j = local[g.other(e, verts[i])];
            // parallel edges are dropped, which keeps the rotation planar
            if (j < 0 || j == i || std::find(out.begin(), out.end(), j) != out.end()) continue;
            out.push_back(j);
        }
    }
    return pg;
}

namespace {

struct Bfs {
    std::vector<int> level, parent, order;
};

// BFS over the vertices with alive != 0 (all when alive is empty)
void bfs(const PlaneGraph& g, int src, Bfs& b) {
    int n = g.size();
    b.level.assign(n, -1);
    b.parent.assign(n, -1);
    b.order.clear();
    b.level[src] = 0;
    b.order.push_back(src);
    for (std::size_t h = 0; h < b.order.size(); ++h) {
        int x = b.order[h];
        for (int y : g.adj[x])
            if (b.level[y] < 0) {
                b.level[y] = b.level[x] + 1;
                b.parent[y] = x;
                b.order.push_back(y);
            }
    }
}

// Darts of the contracted, triangulated middle graph.
struct Darts {
    std::vector<int> from, to0, twin, rnext, rprev, face;
    std::vector<char> alive, tree;
    std::vector<int> first;  // per vertex, -1 when none

    int add(int o, int t) {
        int d = int(from.size());
        from.push_back(o);
        to0.push_back(t);
        twin.push_back(-1);
        rnext.push_back(d);
        rprev.push_back(d);
        face.push_back(-1);
        alive.push_back(1);
        tree.push_back(0);
        return d;
    }
    void unlink(int d) {
        int o = from[d];
        if (rnext[d] == d) {
            first[o] = -1;
        } else {
            rnext[rprev[d]] = rnext[d];
            rprev[rnext[d]] = rprev[d];
            if (first[o] == d) first[o] = rnext[d];
        }
        alive[d] = 0;
    }
    void insert_after(int d, int a) {
        rnext[a] = rnext[d];
        rprev[rnext[d]] = a;
        rnext[d] = a;
        rprev[a] = d;
    }
    int fnext(int d) const { return rprev[twin[d]]; }
};

std::vector<int> lt_component(const PlaneGraph& g, int start, int k, SeparatorStats* st) {
    const double bound = 2.0 * std::sqrt(2.0 * k);
    Bfs b;
    // root near the middle of a long BFS path keeps the level count low
    bfs(g, start, b);
    int a = b.order.back();
    bfs(g, a, b);
    int far = b.order.back();
    int root = far;
    for (int s = b.level[far] / 2; s > 0; --s) root = b.parent[root];
    bfs(g, root, b);
    const int r = b.level[b.order.back()];
    if (st) st->levels = r + 1;

    std::vector<std::vector<int>> L(r + 1);
    for (int x : b.order) L[b.level[x]].push_back(x);
    std::vector<long> pre(r + 2, 0);
    for (int l = 0; l <= r; ++l) pre[l + 1] = pre[l] + long(L[l].size());
    auto lsize = [&](int l) { return (l < 0 || l > r) ? 0L : long(L[l].size()); };

    int best = -1;
    for (int l = 0; l <= r; ++l) {
        long below = pre[l], above = k - pre[l + 1];
        if (3 * below <= 2L * k && 3 * above <= 2L * k && (best < 0 || L[l].size() < L[best].size())) best = l;
    }
    if (best >= 0 && double(L[best].size()) <= bound) return L[best];

    int l1 = 0;
    while (2 * pre[l1 + 1] < k) ++l1;
    int l0 = l1, l2 = l1 + 1;
    for (int l = l1; l >= -1; --l)
        if (lsize(l) + 2L * (l1 - l) < lsize(l0) + 2L * (l1 - l0)) l0 = l;
    for (int l = l1 + 1; l <= r + 1; ++l)
        if (lsize(l) + 2L * (l - l1 - 1) < lsize(l2) + 2L * (l2 - l1 - 1)) l2 = l;
    std::vector<int> W;
    if (l0 >= 0) W.insert(W.end(), L[l0].begin(), L[l0].end());
    if (l2 <= r) W.insert(W.end(), L[l2].begin(), L[l2].end());
    long middle = pre[std::min(l2, r + 1)] - pre[l0 + 1];
    if (3 * middle <= 2L * k) return W;
    if (st) st->used_cycle = true;

    // --- fundamental cycle in the contracted, triangulated middle graph
    const int n = g.size();
    auto keep = [&](int x) { return b.level[x] >= 0 && b.level[x] < l2; };
    Darts D;
    D.first.assign(n, -1);
    std::vector<std::vector<int>> at(n);
    for (int lv = 0; lv < std::min(l2, r + 1); ++lv)
        for (int x : L[lv]) {
            int prev = -1;
            for (int y : g.adj[x]) {
                if (!keep(y)) continue;
                int d = D.add(x, y);
                at[x].push_back(d);
                if (prev < 0) {
                    D.first[x] = d;
                } else {
                    D.insert_after(prev, d);
                }
                prev = d;
            }
        }
    for (int lv = 0; lv < std::min(l2, r + 1); ++lv)
        for (int x : L[lv])
            for (int d : at[x]) {
                int y = D.to0[d];
                for (int e : at[y])
                    if (D.to0[e] == x) D.twin[d] = e;
            }
    auto dart_to = [&](int x, int y) {
        for (int d : at[x])
            if (D.to0[d] == y) return d;
        return -1;
    };

    if (l0 >= 0) {
        for (int lv = 1; lv <= l0; ++lv)
            for (int x : L[lv]) {
                int dxp = dart_to(x, b.parent[x]);
                int dpx = D.twin[dxp];
                int a0 = D.rprev[dpx], b0 = D.rnext[dpx];
                bool lone_p = a0 == dpx;
                if (D.rnext[dxp] == dxp) {
                    D.unlink(dpx);
                } else {
                    int xs = D.rnext[dxp], ys = D.rprev[dxp];
                    for (int d = xs;; d = D.rnext[d]) {
                        D.from[d] = root;
                        if (d == ys) break;
                    }
                    if (lone_p) {
                        D.rnext[ys] = xs;
                        D.rprev[xs] = ys;
                    } else {
                        D.rnext[a0] = xs;
                        D.rprev[xs] = a0;
                        D.rnext[ys] = b0;
                        D.rprev[b0] = ys;
                    }
                    D.first[root] = xs;
                    D.alive[dpx] = 0;
                }
                D.alive[dxp] = 0;
                D.first[x] = -1;
            }
        std::vector<int> loops;
        if (D.first[root] >= 0)
            for (int d = D.first[root];;) {
                if (D.from[D.twin[d]] == root) loops.push_back(d);
                d = D.rnext[d];
                if (d == D.first[root]) break;
            }
        for (int d : loops) D.unlink(d);
    }

    // tree edges and depths
    std::vector<int> tpar(n, -1), depth(n, -1), weight(n, 0);
    depth[root] = 0;
    weight[root] = l0 < 0 ? 1 : 0;
    for (int lv = l0 + 1; lv < std::min(l2, r + 1); ++lv)
        for (int x : L[lv]) {
            if (x == root) continue;
            int p = b.parent[x];
            tpar[x] = b.level[p] <= l0 ? root : p;
            depth[x] = lv - std::max(l0, 0);
            weight[x] = 1;
            int d = dart_to(x, p);
            D.tree[d] = D.tree[D.twin[d]] = 1;
        }

    auto trace_faces = [&](std::vector<std::vector<int>>* faces) {
        std::fill(D.face.begin(), D.face.end(), -1);
        int F = 0;
        for (int d = 0; d < int(D.from.size()); ++d) {
            if (!D.alive[d] || D.face[d] >= 0) continue;
            if (faces) faces->emplace_back();
            for (int e = d; D.face[e] < 0; e = D.fnext(e)) {
                D.face[e] = F;
                if (faces) faces->back().push_back(e);
            }
            ++F;
        }
        return F;
    };
    std::vector<std::vector<int>> faces;
    trace_faces(&faces);
    for (auto& f : faces) {
        if (f.size() <= 3) continue;
        int z = int(tpar.size());
        tpar.push_back(-1);
        depth.push_back(-1);
        weight.push_back(0);
        D.first.push_back(-1);
        int prevz = -1;
        for (int d : f) {
            int o = D.from[d];
            int a0 = D.add(o, z), b0 = D.add(z, o);
            D.twin[a0] = b0;
            D.twin[b0] = a0;
            D.insert_after(d, a0);
            if (prevz < 0) {
                D.first[z] = b0;
                D.tree[a0] = D.tree[b0] = 1;
                tpar[z] = o;
                depth[z] = depth[o] + 1;
            } else {
                D.insert_after(prevz, b0);
            }
            prevz = b0;
        }
    }
    const int F = trace_faces(nullptr);

    int V = 0;
    long E2 = 0;
    for (int x = 0; x < int(tpar.size()); ++x)
        if (depth[x] >= 0) ++V;
    for (int d = 0; d < int(D.from.size()); ++d) E2 += D.alive[d];
    // dual tree over non-tree edges
    std::vector<std::vector<std::pair<int, int>>> dual(F);
    long dual_edges = 0;
    for (int d = 0; d < int(D.from.size()); ++d) {
        if (!D.alive[d] || D.tree[d] || d > D.twin[d]) continue;
        dual[D.face[d]].push_back({D.face[D.twin[d]], d});
        dual[D.face[D.twin[d]]].push_back({D.face[d], d});
        ++dual_edges;
    }
    bool ok = V - E2 / 2 + F == 2 && dual_edges == F - 1;
    std::vector<int> fpar_edge(F, -1), tin(F, -1), tout(F, -1);
    std::vector<long> sub(F, 0);
    if (ok) {
        std::vector<int> stack{0}, order;
        std::vector<std::size_t> it(F, 0);
        int clock = 0;
        tin[0] = clock++;
        while (!stack.empty()) {
            int f = stack.back();
            if (it[f] < dual[f].size()) {
                auto [h, d] = dual[f][it[f]++];
                if (tin[h] >= 0) continue;
                tin[h] = clock++;
                fpar_edge[h] = d;
                stack.push_back(h);
            } else {
                tout[f] = clock;
                order.push_back(f);
                stack.pop_back();
            }
        }
        ok = int(order.size()) == F;
        if (ok) {
            std::vector<int> wface(tpar.size(), -1);
            for (int x = 0; x < int(tpar.size()); ++x)
                if (weight[x] > 0 && D.first[x] >= 0) {
                    wface[x] = D.face[D.first[x]];
                    sub[wface[x]] += weight[x];
                }
            std::vector<int> fparent(F, -1);
            for (int f = 0; f < F; ++f)
                if (fpar_edge[f] >= 0) {
                    int d = fpar_edge[f];
                    fparent[f] = D.face[d] == f ? D.face[D.twin[d]] : D.face[d];
                }
            for (int f : order)
                if (fparent[f] >= 0) sub[fparent[f]] += sub[f];
            const long total = sub[0];

            long best_score = -1, best_cyc = 0;
            int best_d = -1;
            for (int f = 0; f < F; ++f) {
                int d = fpar_edge[f];
                if (d < 0) continue;
                long inside = sub[f], cyc = 0;
                int u = D.from[d], w = D.from[D.twin[d]];
                auto account = [&](int x) {
                    if (weight[x] == 0) return;
                    cyc += weight[x];
                    if (wface[x] >= 0 && tin[wface[x]] >= tin[f] && tin[wface[x]] < tout[f]) inside -= weight[x];
                };
                while (u != w) {
                    if (depth[u] >= depth[w]) {
                        account(u);
                        u = tpar[u];
                    } else {
                        account(w);
                        w = tpar[w];
                    }
                }
                account(u);
                long outside = total - inside - cyc;
                long score = std::max(inside, outside);
                if (best_d < 0 || score < best_score || (score == best_score && cyc < best_cyc)) {
                    best_score = score;
                    best_cyc = cyc;
                    best_d = d;
                }
            }
            if (best_d >= 0) {
                int u = D.from[best_d], w = D.from[D.twin[best_d]];
                auto take = [&](int x) {
                    if (weight[x] > 0) W.push_back(x);
                };
                while (u != w) {
                    if (depth[u] >= depth[w]) {
                        take(u);
                        u = tpar[u];
                    } else {
                        take(w);
                        w = tpar[w];
                    }
                }
                take(u);
            }
        }
    }
    if (st) st->euler_ok = ok;
    if (!ok && best >= 0) return L[best];
    return W;
}

}  // namespace

Separation planar_separator(const PlaneGraph& g, SeparatorStats* st) {
    const int n = g.size();
    Separation out;
    if (n == 0) return out;
    if (n == 1) {
        out.W = {0};
        return out;
    }
    auto components = [&](const std::vector<char>& removed) {
        std::vector<int> comp(n, -1);
        std::vector<std::vector<int>> list;
        for (int s = 0; s < n; ++s) {
            if (removed[s] || comp[s] >= 0) continue;
            int id = int(list.size());
            list.emplace_back();
            comp[s] = id;
            list.back().push_back(s);
            for (std::size_t h = 0; h < list.back().size(); ++h)
                for (int y : g.adj[list.back()[h]])
                    if (!removed[y] && comp[y] < 0) {
                        comp[y] = id;
                        list.back().push_back(y);
                    }
        }
        return list;
    };
    std::vector<char> inW(n, 0);
    auto comps = components(inW);
    std::size_t big = 0;
    for (std::size_t i = 1; i < comps.size(); ++i)
        if (comps[i].size() > comps[big].size()) big = i;
    if (3 * comps[big].size() > 2 * std::size_t(n)) {
        // lt_component runs on the whole graph but only reaches this component
        for (int w : lt_component(g, comps[big][0], int(comps[big].size()), st)) inW[w] = 1;
        comps = components(inW);
    }
    for (int v = 0; v < n; ++v)
        if (inW[v]) out.W.push_back(v);
    std::sort(comps.begin(), comps.end(), [](auto& a, auto& b) { return a.size() > b.size(); });
    for (auto& c : comps) {
        auto& dst = out.A.size() <= out.B.size() ? out.A : out.B;
        dst.insert(dst.end(), c.begin(), c.end());
    }
    std::sort(out.A.begin(), out.A.end());
    std::sort(out.B.begin(), out.B.end());
    return out;
}

}  // namespace qmec
