#include <algorithm>
#include <cmath>
#include <iterator>

#include <boost/geometry.hpp>
#include <boost/geometry/geometries/point.hpp>
#include <boost/geometry/geometries/segment.hpp>
#include <boost/geometry/index/rtree.hpp>

#include "qmec/polygon.hpp"

namespace qmec {

namespace bg = boost::geometry;
namespace bgi = boost::geometry::index;

using BPoint = bg::model::point<double, 2, bg::cs::cartesian>;
using BSeg = bg::model::segment<BPoint>;
using RValue = std::pair<BSeg, int>;

struct FaceLocator::Impl {
    bgi::rtree<RValue, bgi::quadratic<16>> tree;
};

namespace {

// inward bisector of the cell wedge at a reflex corner
Point corner_ref(const std::vector<Point>& P, int v) {
    int n = int(P.size());
    Point a = unit(P[v] - P[(v + n - 1) % n]), b = unit(P[(v + 1) % n] - P[v]);
    return unit(perp(a) + perp(b));
}

double corner_key(Point ref, Point v, Point p) {
    Point w = p - v;
    return std::atan2(cross(ref, w), dot(ref, w));
}

}  // namespace

FaceLocator FaceLocator::build(const MedialAxisTree& m) {
    FaceLocator L;
    const auto& P = m.polygon().pts;
    const int n = int(P.size());
    double ext = 0;
    for (Point p : P) ext = std::max({ext, std::fabs(p.x), std::fabs(p.y)});
    L.tol_ = 1e-12 * std::max(ext, 1e-300);

    L.corner_face_.assign(n, -1);
    int faces = n;
    for (int i = 0; i < n; ++i)
        if (orient_sign(P[(i + n - 1) % n], P[i], P[(i + 1) % n]) < 0) L.corner_face_[i] = faces++;
    L.chain_.assign(faces, {});

    for (int e = 0; e < int(m.edges().size()); ++e) {
        const auto& pcs = m.edges()[e].pieces;
        for (int i = 0; i < int(pcs.size()); ++i) {
            const AxisPiece& pc = pcs[i];
            for (const Feature* f : {&pc.f1, &pc.f2}) {
                double k0, k1;
                int face;
                if (f->kind == Feature::EDGE) {
                    Point d = unit(f->b - f->a);
                    k0 = dot(pc.p0 - f->a, d);
                    k1 = dot(pc.p1 - f->a, d);
                    face = f->index;
                } else {
                    face = L.corner_face_[f->index];
                    if (face < 0) continue;
                    Point ref = corner_ref(P, f->index);
                    k0 = corner_key(ref, f->a, pc.p0);
                    k1 = corner_key(ref, f->a, pc.p1);
                }
                if (k0 == k1) continue;
                L.chain_[face].push_back({std::max(k0, k1), e, i});
            }
        }
    }
    for (auto& c : L.chain_) std::sort(c.begin(), c.end(), [](const Slot& a, const Slot& b) { return a.key_hi < b.key_hi; });

    std::vector<RValue> vals;
    for (int i = 0; i < n; ++i) {
        Point a = P[i], b = P[(i + 1) % n];
        vals.push_back({BSeg(BPoint(a.x, a.y), BPoint(b.x, b.y)), i});
    }
    auto impl = std::make_shared<Impl>();
    impl->tree = bgi::rtree<RValue, bgi::quadratic<16>>(vals);
    L.rt_ = impl;
    return L;
}

int FaceLocator::num_faces() const { return int(chain_.size()); }

std::size_t FaceLocator::memory_bytes() const {
    std::size_t b = sizeof(*this) + corner_face_.size() * sizeof(int);
    for (const auto& c : chain_) b += sizeof(c) + c.size() * sizeof(Slot);
    // r-tree: the values plus roughly one node entry per value
    if (rt_) b += rt_->tree.size() * (sizeof(RValue) + 2 * sizeof(void*) + 4 * sizeof(double));
    return b;
}

FaceHit FaceLocator::locate(const MedialAxisTree& m, Point q) const {
    if (!finite(q)) throw Error(ErrorCode::QueryOutsidePolygon, "query point is not finite");
    const auto& P = m.polygon().pts;
    const int n = int(P.size());
    std::vector<RValue> near;
    rt_->tree.query(bgi::nearest(BPoint(q.x, q.y), 4), std::back_inserter(near));

    struct Cand {
        int edge;
        double t, d;
    };
    std::vector<Cand> cs;
    double best = 1e300;
    for (const RValue& v : near) {
        int j = v.second;
        Point a = P[j], b = P[(j + 1) % n], d = b - a;
        double t = std::clamp(dot(q - a, d) / norm2(d), 0.0, 1.0);
        double dd = dist(q, lerp(a, b, t));
        cs.push_back({j, t, dd});
        best = std::min(best, dd);
    }
    if (best <= tol_) throw Error(ErrorCode::QueryOutsidePolygon, "query point on the polygon boundary");

    const Cand* pick = nullptr;
    for (const Cand& c : cs)
        if (c.d <= best * (1 + 1e-12) && c.t > 0 && c.t < 1 && (!pick || c.d < pick->d)) pick = &c;

    FaceHit hit;
    if (pick) {
        int j = pick->edge;
        Point a = P[j], b = P[(j + 1) % n];
        if (orient_sign(a, b, q) <= 0) throw Error(ErrorCode::QueryOutsidePolygon, "query point outside the polygon");
        Point dir = unit(b - a), nrm = perp(dir);
        double key = dot(q - a, dir);
        const auto& ch = chain_[j];
        auto it = std::lower_bound(ch.begin(), ch.end(), key, [](const Slot& s, double k) { return s.key_hi < k; });
        if (it == ch.end()) --it;
        const AxisPiece& pc = m.edges()[it->edge].pieces[it->piece];
        double u;
        if (pc.curved) {
            u = (key - pc.arc.t0) / (pc.arc.t1 - pc.arc.t0);
        } else {
            Point D = pc.p1 - pc.p0, F = a + key * dir;
            double den = cross(D, nrm);
            u = den == 0 ? 0.0 : cross(F - pc.p0, nrm) / den;
        }
        hit.feature.kind = Feature::EDGE;
        hit.feature.a = a;
        hit.feature.b = b;
        hit.feature.index = j;
        hit.pos = {it->edge, it->piece + std::clamp(u, 0.0, 1.0)};
        return hit;
    }

    // nearest point is a corner
    const Cand& c = *std::min_element(cs.begin(), cs.end(), [](const Cand& x, const Cand& y) { return x.d < y.d; });
    int v = c.t <= 0 ? c.edge : (c.edge + 1) % n;
    int face = corner_face_[v];
    Point pv = P[v], prev = P[(v + n - 1) % n], next = P[(v + 1) % n];
    if (face < 0 || (orient_sign(prev, pv, q) <= 0 && orient_sign(pv, next, q) <= 0))
        throw Error(ErrorCode::QueryOutsidePolygon, "query point outside the polygon");
    Point ref = corner_ref(P, v);
    double key = corner_key(ref, pv, q);
    const auto& ch = chain_[face];
    auto it = std::lower_bound(ch.begin(), ch.end(), key, [](const Slot& s, double k) { return s.key_hi < k; });
    if (it == ch.end()) --it;
    const AxisPiece& pc = m.edges()[it->edge].pieces[it->piece];
    Point w = unit(q - pv);
    double u;
    if (pc.curved) {
        // ray from the focus meets the parabola where distance to focus equals distance to directrix
        Point nrm = perp(pc.arc.direction);
        double b = dot(pc.arc.focus - pc.arc.origin, nrm);
        if (b < 0) nrm = -1.0 * nrm, b = -b;
        double lam = b / (1 - dot(w, nrm));
        Point x = pv + lam * w;
        u = (dot(x - pc.arc.origin, pc.arc.direction) - pc.arc.t0) / (pc.arc.t1 - pc.arc.t0);
    } else {
        Point D = pc.p1 - pc.p0;
        double den = cross(D, w);
        u = den == 0 ? 0.0 : cross(pv - pc.p0, w) / den;
    }
    Feature f;
    f.kind = Feature::VERTEX;
    f.a = pv;
    f.index = v;
    hit.feature = f;
    hit.pos = {it->edge, it->piece + std::clamp(u, 0.0, 1.0)};
    return hit;
}

}  // namespace qmec
