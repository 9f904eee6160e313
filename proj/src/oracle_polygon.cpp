#include <algorithm>
#include <cmath>

#include "qmec/medial_axis.hpp"
#include "qmec/oracle.hpp"

namespace qmec {

namespace {

bool inside_by_crossings(const std::vector<Point>& P, Point q) {
    bool in = false;
    for (std::size_t i = 0, j = P.size() - 1; i < P.size(); j = i++) {
        const Point &a = P[i], &b = P[j];
        if ((a.y > q.y) != (b.y > q.y) && q.x < (b.x - a.x) * (q.y - a.y) / (b.y - a.y) + a.x) in = !in;
    }
    return in;
}

int witness_code(const Feature& f) { return f.kind == Feature::EDGE ? f.index : -1 - f.index; }

}  // namespace

PolygonOracle::PolygonOracle(const std::vector<Point>& polygon)
    : m_(std::make_shared<MedialAxisTree>(MedialAxisTree::build(polygon))) {}

OracleReport PolygonOracle::query(Point q) const {
    const MedialAxisTree& m = *m_;
    const auto& P = m.polygon().pts;
    double ext = 0, bd = 1e300;
    for (Point p : P) ext = std::max({ext, std::fabs(p.x), std::fabs(p.y)});
    for (const Feature& f : m.features()) bd = std::min(bd, f.distance(q));
    if (!finite(q) || bd <= 1e-12 * ext || !inside_by_crossings(P, q))
        throw Error(ErrorCode::QueryOutsidePolygon, "query point is not strictly inside the polygon");

    OracleReport rep;
    Circle best{q, -1};
    std::vector<int> wit;
    auto offer = [&](Circle c, std::vector<int> w) {
        ++rep.candidates;
        if (c.radius > best.radius) best = c, wit = std::move(w);
    };

    for (int w = 0; w < int(m.nodes().size()); ++w) {
        Circle c = m.mec(w);
        if (m.nodes()[w].kind != MANode::INTERNAL || dist(c.center, q) > c.radius) continue;
        std::vector<int> touch;
        for (int e : m.incident(w)) {
            const MAEdge& E = m.edges()[e];
            const AxisPiece& pc = E.u == w ? E.pieces.front() : E.pieces.back();
            for (const Feature* f : {&pc.f1, &pc.f2}) {
                int code = witness_code(*f);
                if (std::find(touch.begin(), touch.end(), code) == touch.end()) touch.push_back(code);
            }
        }
        offer(c, touch);
    }

    const int K = 256;
    for (const MAEdge& E : m.edges())
        for (const AxisPiece& pc : E.pieces) {
            std::vector<int> touch{witness_code(pc.f1), witness_code(pc.f2)};
            auto H = [&](double u) {
                double r = pc.clearance(u);
                return dist2(pc.at(u), q) - r * r;
            };
            // feasible end between a feasible u0 and an infeasible u1
            auto edge_of = [&](double u0, double u1) {
                for (int it = 0; it < 200; ++it) {
                    double mid = 0.5 * (u0 + u1);
                    if (mid == u0 || mid == u1) break;
                    (H(mid) <= 0 ? u0 : u1) = mid;
                }
                return u0;
            };
            std::vector<double> hs(K + 1);
            int kmin = 0;
            for (int k = 0; k <= K; ++k) {
                hs[k] = H(double(k) / K);
                if (hs[k] < hs[kmin]) kmin = k;
            }
            for (int k = 0; k <= K; ++k) {
                double u = double(k) / K;
                if (hs[k] > 0) continue;
                offer(pc.mec(u), touch);
                if (k > 0 && hs[k - 1] > 0) offer(pc.mec(edge_of(u, double(k - 1) / K)), touch);
                if (k < K && hs[k + 1] > 0) offer(pc.mec(edge_of(u, double(k + 1) / K)), touch);
            }
            if (hs[kmin] > 0) {
                // a feasible sliver between samples: golden-section search for the minimum of H
                double a = std::max(0.0, double(kmin - 1) / K), b = std::min(1.0, double(kmin + 1) / K);
                const double g = (std::sqrt(5.0) - 1) / 2;
                for (int it = 0; it < 200 && b - a > 1e-17; ++it) {
                    double x1 = b - g * (b - a), x2 = a + g * (b - a);
                    if (H(x1) < H(x2)) b = x2;
                    else a = x1;
                }
                double u = 0.5 * (a + b);
                if (H(u) <= 0) {
                    offer(pc.mec(edge_of(u, std::max(0.0, double(kmin - 1) / K))), touch);
                    offer(pc.mec(edge_of(u, std::min(1.0, double(kmin + 1) / K))), touch);
                }
            }
        }
    if (best.radius < 0) throw Error(ErrorCode::InternalError, "no axis circle contains the query point");
    rep.result = QueryResult::of(best);
    rep.witness = wit;
    return rep;
}

OracleReport oracle_polygon(const std::vector<Point>& polygon, Point q) { return PolygonOracle(polygon).query(q); }

}  // namespace qmec
