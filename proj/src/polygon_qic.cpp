#include <algorithm>
#include <cmath>

#include "qmec/polygon.hpp"

namespace qmec {

void PolygonQicStats::merge(const PolygonQicStats& o) {
    sets += o.sets;
    entries += o.entries;
    max_bucket = std::max(max_bucket, o.max_bucket);
}

namespace {

bool overlaps(const Circle& a, const Circle& b) { return dist(a.center, b.center) < a.radius + b.radius; }

}  // namespace

GuidingSet GuidingSet::build(const MedialAxisTree& m, const MountainForest& f, const std::vector<int>& mark, int tag,
                             int anchor, PolygonQicStats* stats) {
    GuidingSet G;
    G.anchor_ = anchor;
    G.anchor_mec_ = m.mec(anchor);
    const Circle V = G.anchor_mec_;

    // radii of scope nodes from the anchor's upward; smaller ones never hold a guide
    {
        std::vector<std::pair<int, int>> st{{anchor, -1}};
        while (!st.empty()) {
            auto [w, from] = st.back();
            st.pop_back();
            if (m.nodes()[w].clearance >= V.radius) G.R_.push_back(m.nodes()[w].clearance);
            for (int e : m.incident(w)) {
                int o = m.other(e, w);
                if (e != from && mark[o] == tag) st.push_back({o, e});
            }
        }
        std::sort(G.R_.begin(), G.R_.end());
        G.R_.erase(std::unique(G.R_.begin(), G.R_.end()), G.R_.end());
    }
    const double rtop = G.R_.back();
    const double slack = 1e-12 * rtop;
    auto level = [&](double r) { return int(std::lower_bound(G.R_.begin(), G.R_.end(), r) - G.R_.begin()); };

    std::vector<std::pair<int, GuideEntry>> found;
    auto add_node = [&](int w, int via_edge) {
        Circle c = m.mec(w);
        if (!overlaps(c, V)) return;
        std::vector<int> mts = f.node_mountains(m, w);
        for (int mt : mts) {
            AxisPos pos = m.node_pos(w, via_edge);
            if (f.segs()[f.seg_at(pos, mt)].mountain != mt)
                for (int e : m.incident(w))
                    if (f.segs()[f.seg_at(m.node_pos(w, e), mt)].mountain == mt) pos = m.node_pos(w, e);
            found.push_back({level(c.radius), {pos, c, mt}});
        }
    };
    add_node(anchor, m.incident(anchor)[0]);

    // depth-first walk carrying the largest clearance seen so far
    struct Item {
        int node, from;
        double top;
    };
    std::vector<Item> st{{anchor, -1, V.radius}};
    while (!st.empty()) {
        Item it = st.back();
        st.pop_back();
        for (int e : m.incident(it.node)) {
            if (e == it.from) continue;
            const MAEdge& E = m.edges()[e];
            const bool fwd = E.u == it.node;
            const int o = fwd ? E.v : E.u;
            const int k = int(E.pieces.size());
            double top = it.top;
            for (int j = 0; j < k && top <= rtop + slack; ++j) {
                int pi = fwd ? j : k - 1 - j;
                const AxisPiece& pc = E.pieces[pi];
                auto U = [&](double lam) { return fwd ? lam : 1 - lam; };
                auto C = [&](double lam) { return pc.clearance(U(lam)); };
                double c0 = C(0), c1 = C(1);
                double us = pc.min_param();
                double la = us >= 0 ? (fwd ? us : 1 - us) : (c1 > c0 ? 0.0 : 1.0);
                double ca = C(la);
                bool last = j == k - 1;
                if (la < 1 && c1 > ca) {
                    // piece ends recompute node clearances with rounding; a level
                    // equal to the running max still counts
                    int b0 = level(std::max(top - slack, std::nextafter(ca, 1e300)));
                    for (int b = b0; b < int(G.R_.size()) && G.R_[b] <= c1; ++b) {
                        double r = G.R_[b];
                        if (last && mark[o] == tag && r == m.nodes()[o].clearance) break;
                        double lo = la, hi = 1;
                        for (int t = 0; t < 60; ++t) {
                            double mid = 0.5 * (lo + hi);
                            (C(mid) < r ? lo : hi) = mid;
                        }
                        double lam = 0.5 * (lo + hi);
                        AxisPos pos{e, pi + U(lam)};
                        Circle c{pc.at(U(lam)), r};
                        if (overlaps(c, V)) found.push_back({b, {pos, c, f.mountain_at(pos)}});
                    }
                }
                // the far end of the last piece is the node itself; use its exact value
                top = std::max({top, c0, last ? std::min(c1, m.nodes()[o].clearance) : c1});
            }
            if (mark[o] != tag) continue;
            double ro = m.nodes()[o].clearance;
            if (ro >= top - slack) add_node(o, e);
            top = std::max(top, ro);
            // beyond a node that misses the anchor's MEC nothing relevant remains
            if (top <= rtop + slack && overlaps(m.mec(o), V)) st.push_back({o, e, top});
        }
    }

    std::stable_sort(found.begin(), found.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
    G.off_.assign(G.R_.size() + 1, 0);
    for (auto& [b, g] : found) {
        ++G.off_[b + 1];
        G.ent_.push_back(g);
    }
    for (std::size_t b = 0; b < G.R_.size(); ++b) G.off_[b + 1] += G.off_[b];
    if (stats) {
        ++stats->sets;
        stats->entries += long(G.ent_.size());
        stats->max_bucket = std::max(stats->max_bucket, G.max_bucket());
    }
    return G;
}

int GuidingSet::max_bucket() const {
    int b = 0;
    for (std::size_t i = 0; i + 1 < off_.size(); ++i) b = std::max(b, off_[i + 1] - off_[i]);
    return b;
}

std::size_t GuidingSet::memory_bytes() const {
    return sizeof(*this) + R_.size() * sizeof(double) + off_.size() * sizeof(int) + ent_.size() * sizeof(GuideEntry);
}

Circle GuidingSet::query(const MedialAxisTree& m, const MountainForest& f, Point q, int* probes) const {
    int cnt = 1;
    if (!contains(anchor_mec_, q)) {
        if (probes) *probes += cnt;
        throw Error(ErrorCode::PromiseViolated, "query point is not in the anchor's MEC");
    }
    auto hit = [&](int b) {
        for (int i = off_[b]; i < off_[b + 1]; ++i) {
            ++cnt;
            if (contains(ent_[i].circle, q)) return true;
        }
        return false;
    };
    int lo = 0, hi = num_buckets() - 1;
    while (lo < hi) {
        int mid = (lo + hi + 1) / 2;
        if (hit(mid)) lo = mid;
        else hi = mid - 1;
    }
    Circle best = anchor_mec_;
    for (int i = off_[lo]; i < off_[lo + 1]; ++i) {
        ++cnt;
        if (!contains(ent_[i].circle, q)) continue;
        Circle c = f.qim(m, ent_[i].mountain, ent_[i].pos, q, &cnt);
        if (c.radius > best.radius) best = c;
    }
    if (probes) *probes += cnt;
    return best;
}

// ---- centroid decomposition ----

CentroidTree CentroidTree::build(const MedialAxisTree& m, const MountainForest& f, PolygonQicStats* stats) {
    CentroidTree T;
    const int N = int(m.nodes().size());
    T.ct_of_.assign(N, -1);
    std::vector<int> mark(N, -1);
    std::vector<char> removed(N, 0);
    std::vector<int> sub(N, 0), par(N, -1);

    struct Job {
        int start, parent, depth;
    };
    std::vector<Job> jobs{{0, -1, 0}};
    while (!jobs.empty()) {
        Job jb = jobs.back();
        jobs.pop_back();
        // the component, in BFS order
        std::vector<int> comp{jb.start};
        par[jb.start] = -1;
        for (std::size_t i = 0; i < comp.size(); ++i)
            for (int e : m.incident(comp[i])) {
                int o = m.other(e, comp[i]);
                if (!removed[o] && o != par[comp[i]]) par[o] = comp[i], comp.push_back(o);
            }
        const int S = int(comp.size());
        for (int i = S - 1; i >= 0; --i) {
            int w = comp[i];
            sub[w] = 1;
            for (int e : m.incident(w)) {
                int o = m.other(e, w);
                if (!removed[o] && o != par[w]) sub[w] += sub[o];
            }
        }
        int c = comp[0];
        for (int w : comp) {
            int big = S - sub[w];
            for (int e : m.incident(w)) {
                int o = m.other(e, w);
                if (!removed[o] && o != par[w]) big = std::max(big, sub[o]);
            }
            if (2 * big <= S) {
                c = w;
                break;
            }
        }
        int id = int(T.nodes_.size());
        for (int w : comp) mark[w] = id;
        Node nd;
        nd.centroid = c;
        nd.parent = jb.parent;
        nd.depth = jb.depth;
        nd.size = S;
        nd.qic = GuidingSet::build(m, f, mark, id, c, stats);
        T.nodes_.push_back(std::move(nd));
        T.ct_of_[c] = id;
        if (jb.parent >= 0) T.nodes_[jb.parent].children.push_back(id);
        else T.root_ = id;
        removed[c] = 1;
        for (int e : m.incident(c)) {
            int o = m.other(e, c);
            if (!removed[o]) jobs.push_back({o, id, jb.depth + 1});
        }
    }
    return T;
}

int CentroidTree::depth() const {
    int d = 0;
    for (const Node& n : nodes_) d = std::max(d, n.depth + 1);
    return d;
}

int CentroidTree::choose(const MedialAxisTree& m, int v, Point q, int* probes) const {
    std::vector<int> chain;
    for (int t = ct_of_[v]; t >= 0; t = nodes_[t].parent) chain.push_back(t);
    int cnt = 0, pick = chain.front();
    for (auto it = chain.rbegin(); it != chain.rend(); ++it) {
        ++cnt;
        if (contains(m.mec(nodes_[*it].centroid), q)) {
            pick = *it;
            break;
        }
    }
    if (probes) *probes += cnt;
    return pick;
}

std::size_t CentroidTree::memory_bytes() const {
    std::size_t b = sizeof(*this) + ct_of_.size() * sizeof(int);
    for (const Node& n : nodes_) b += sizeof(Node) + n.children.size() * sizeof(int) + n.qic.memory_bytes();
    return b;
}

}  // namespace qmec
