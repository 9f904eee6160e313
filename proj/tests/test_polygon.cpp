#include <cmath>
#include <functional>
#include <map>
#include <random>

#include "doctest.h"
#include "qmec/oracle.hpp"
#include "qmec/polygon.hpp"
#include "testutil.hpp"

using namespace qmec;

namespace {

std::vector<Point> regular(int n, double r = 1.0) {
    std::vector<Point> p;
    for (int i = 0; i < n; ++i) p.push_back({r * std::cos(2 * M_PI * i / n), r * std::sin(2 * M_PI * i / n)});
    return p;
}

ErrorCode code_of(const std::function<void()>& f) {
    try {
        f();
    } catch (const Error& e) {
        return e.code();
    }
    return ErrorCode::InternalError;
}

// largest clearance seen walking the axis from node v to position x
double path_max(const MedialAxisTree& m, int v, AxisPos x) {
    const int N = int(m.nodes().size());
    std::vector<int> par(N, -2), pe(N, -1);
    std::vector<int> q{v};
    par[v] = -1;
    for (std::size_t i = 0; i < q.size(); ++i)
        for (int e : m.incident(q[i])) {
            int o = m.other(e, q[i]);
            if (par[o] == -2) par[o] = q[i], pe[o] = e, q.push_back(o);
        }
    const MAEdge& E = m.edges()[x.edge];
    // the end of x's edge nearer to v
    int near = E.u, far = E.v;
    if (pe[E.u] == x.edge) std::swap(near, far);
    double best = 0;
    auto sample = [&](int e, double s0, double s1) {
        for (int k = 0; k <= 64; ++k) best = std::max(best, m.clearance({e, s0 + (s1 - s0) * k / 64}));
    };
    for (int w = near; w != v; w = par[w]) {
        int e = pe[w];
        sample(e, 0, m.edge_end(e));
    }
    best = std::max(best, m.nodes()[v].clearance);
    sample(x.edge, E.u == near ? 0 : m.edge_end(x.edge), x.s);
    return best;
}

void check_against_oracle(const PolygonIndex& idx, const PolygonOracle& orc, Point q, std::map<int, int>* branches) {
    PolygonQueryInfo info;
    Circle c = idx.query(q, &info);
    if (branches) ++(*branches)[int(info.branch)];
    double ro = orc.query(q).result.circle.radius;
    CHECK(std::fabs(c.radius - ro) <= 1e-6 * std::max(1.0, ro));
    CHECK(contains(c, q));
    double bd = testutil::boundary_distance(idx.axis().polygon().pts, c.center);
    CHECK(c.radius <= bd + 1e-9 * std::max(1.0, c.radius));
}

}  // namespace

TEST_SUITE("polygon") {
    TEST_CASE("unit square golden values") {
        auto sq = testutil::unit_square();
        auto cx = ConvexIndex::build(sq);
        auto idx = PolygonIndex::build(sq);
        CHECK(cx.num_faces() == 4);
        const MANode& root = cx.axis().nodes()[cx.axis().root()];
        CHECK(root.pos.x == doctest::Approx(0.5));
        CHECK(root.pos.y == doctest::Approx(0.5));

        for (Circle c : {convex_query(cx, {0.5, 0.5}), polygon_query(idx, {0.5, 0.5})})
            CHECK(c.radius == doctest::Approx(0.5).epsilon(1e-12));
        const double want = 0.1 * (2 + std::sqrt(2.0));
        for (Circle c : {convex_query(cx, {0.1, 0.1}), polygon_query(idx, {0.1, 0.1}),
                         oracle_polygon(sq, {0.1, 0.1}).result.circle}) {
            CHECK(c.radius == doctest::Approx(want).epsilon(1e-9));
            CHECK(c.center.x == doctest::Approx(want).epsilon(1e-9));
            CHECK(c.center.y == doctest::Approx(want).epsilon(1e-9));
        }
        CHECK(code_of([&] { convex_query(cx, {0, 0}); }) == ErrorCode::QueryOutsidePolygon);
        CHECK(code_of([&] { polygon_query(idx, {0, 0}); }) == ErrorCode::QueryOutsidePolygon);
        CHECK(code_of([&] { polygon_query(idx, {0.5, 0}); }) == ErrorCode::QueryOutsidePolygon);
        CHECK(code_of([&] { polygon_query(idx, {1.5, 0.5}); }) == ErrorCode::QueryOutsidePolygon);
        CHECK(code_of([&] { oracle_polygon(sq, {-0.1, 0.5}); }) == ErrorCode::QueryOutsidePolygon);
        CHECK(idx.centroids().nodes().size() == 5);
        CHECK(idx.centroids().depth() <= 4);
    }

    TEST_CASE("regular hexagon: six faces around the centre") {
        auto cx = ConvexIndex::build(regular(6));
        CHECK(cx.num_faces() == 6);
        const MANode& root = cx.axis().nodes()[cx.axis().root()];
        CHECK(std::fabs(root.pos.x) < 1e-9);
        CHECK(std::fabs(root.pos.y) < 1e-9);
        CHECK(code_of([] { ConvexIndex::build(testutil::hourglass()); }) == ErrorCode::NotConvex);
    }

    TEST_CASE("convex polygons: convex_query and polygon_query match the oracle") {
        std::mt19937_64 rng(21);
        for (int t = 0; t < 6; ++t) {
            auto poly = testutil::convex_polygon(t == 0 ? 50 : 8 + 7 * t, rng);
            auto cx = ConvexIndex::build(poly);
            auto idx = PolygonIndex::build(poly);
            PolygonOracle orc(poly);
            CHECK(idx.forest().mountains().size() == 1);
            for (Point q : testutil::interior_samples(poly, 100, rng)) {
                double ro = orc.query(q).result.circle.radius;
                Circle c = convex_query(cx, q);
                CHECK(std::fabs(c.radius - ro) <= 1e-6 * std::max(1.0, ro));
                CHECK(contains(c, q));
                check_against_oracle(idx, orc, q, nullptr);
            }
        }
    }

    TEST_CASE("hourglass: two mountains, one valley circle, every query branch") {
        auto hg = testutil::hourglass();
        auto idx = PolygonIndex::build(hg);
        PolygonOracle orc(hg);
        CHECK(idx.forest().mountains().size() == 2);
        CHECK(idx.landscape().valleys.size() == 1);
        std::map<int, int> br;
        std::mt19937_64 rng(4);
        for (Point q : testutil::interior_samples(hg, 600, rng)) check_against_oracle(idx, orc, q, &br);
        // the neck itself: both mountains give the valley circle
        const ValleyPoint& v = idx.landscape().valleys[0];
        Point neck = v.mec.center;
        check_against_oracle(idx, orc, neck, &br);
        for (int mt : {0, 1}) CHECK(qim_query(idx, mt, v.pos, neck).radius >= v.mec.radius - 1e-12);
        CHECK(br[int(PolygonBranch::NodeMec)] > 0);
        CHECK(br[int(PolygonBranch::Locator)] > 0);
        CHECK(code_of([&] { qim_query(idx, 0, v.pos, {0.1, 0.1}); }) == ErrorCode::PromiseViolated);
    }

    TEST_CASE("pinched corridor: the valley circle branch") {
        // two rooms joined by a corridor that narrows to 0.4 at y = 4
        std::vector<Point> poly{{0, 0}, {2, 0}, {2, 2}, {1.4, 2}, {1.2, 4}, {1.4, 6}, {2, 6},
                                {2, 8}, {0, 8}, {0, 6}, {0.6, 6}, {0.8, 4}, {0.6, 2}, {0, 2}};
        auto idx = PolygonIndex::build(poly);
        PolygonOracle orc(poly);
        REQUIRE(idx.landscape().valleys.size() == 1);
        const ValleyPoint& v = idx.landscape().valleys[0];
        CHECK(v.mec.center.x == doctest::Approx(1.0));
        CHECK(v.mec.center.y == doctest::Approx(4.0));
        CHECK(v.mec.radius == doctest::Approx(0.2));
        std::map<int, int> br;
        for (Point q : {Point{1.0, 4.0}, Point{0.9, 3.9}, Point{1.1, 4.15}, Point{1.0, 3.81}})
            check_against_oracle(idx, orc, q, &br);
        CHECK(br[int(PolygonBranch::ValleyMec)] == 4);
        std::mt19937_64 rng(6);
        for (Point q : testutil::interior_samples(poly, 400, rng)) check_against_oracle(idx, orc, q, &br);
        CHECK(br[int(PolygonBranch::NodeMec)] > 0);
        CHECK(br[int(PolygonBranch::Locator)] > 0);
    }

    TEST_CASE("random simple polygons match the oracle") {
        std::mt19937_64 rng(33);
        std::map<int, int> br;
        for (int n : {8, 20, 60, 100}) {
            for (int t = 0; t < 3; ++t) {
                auto poly = testutil::star_polygon(n, rng);
                auto idx = PolygonIndex::build(poly);
                PolygonOracle orc(poly);
                for (Point q : testutil::interior_samples(poly, 60, rng)) check_against_oracle(idx, orc, q, &br);
            }
        }
        MESSAGE("branches node/valley/locator: " << br[0] << " " << br[1] << " " << br[2]);
        CHECK(br[0] > 0);
        CHECK(br[2] > 0);
    }

    TEST_CASE("guiding sets: small buckets, every guide meets the definition") {
        std::mt19937_64 rng(8);
        for (int t = 0; t < 8; ++t) {
            auto poly = t % 2 ? testutil::convex_polygon(20 + 5 * t, rng) : testutil::star_polygon(20 + 5 * t, rng);
            auto idx = PolygonIndex::build(poly);
            const auto& m = idx.axis();
            CHECK(idx.stats().qic.max_bucket <= 36);
            for (const auto& nd : idx.centroids().nodes()) {
                const GuidingSet& G = nd.qic;
                CHECK(G.max_bucket() <= 36);
                Circle V = m.mec(G.anchor());
                for (int b = 0; b < G.num_buckets(); ++b)
                    for (const GuideEntry& g : G.bucket(b)) {
                        CHECK(g.circle.radius == G.radii()[b]);
                        CHECK(std::fabs(m.clearance(g.pos) - g.circle.radius) <= 1e-9);
                        CHECK(dist(g.circle.center, V.center) < g.circle.radius + V.radius);
                        CHECK(path_max(m, G.anchor(), g.pos) <= g.circle.radius + 1e-9);
                        CHECK(idx.forest().mountains()[g.mountain].mnodes.size() > 0);
                    }
            }
        }
    }

    TEST_CASE("guiding set of a convex polygon's root matches a brute-force replay") {
        std::mt19937_64 rng(19);
        auto poly = testutil::convex_polygon(30, rng);
        auto idx = PolygonIndex::build(poly);
        const auto& m = idx.axis();
        const auto& ct = idx.centroids();
        const GuidingSet& G = ct.nodes()[ct.root()].qic;
        Circle V = m.mec(G.anchor());
        // replay: for each radius, count walk positions where the clearance first
        // reaches it with nothing larger before (sampled), overlapping the anchor's MEC
        std::map<double, int> want;
        for (int b = 0; b < G.num_buckets(); ++b) want[G.radii()[b]] = 0;
        for (int w = 0; w < int(m.nodes().size()); ++w) {
            double r = m.nodes()[w].clearance;
            if (!want.count(r)) continue;
            if (path_max(m, G.anchor(), m.node_pos(w, m.incident(w)[0])) <= r + 1e-12 &&
                dist(m.nodes()[w].pos, V.center) < r + V.radius)
                ++want[r];
        }
        std::map<double, int> got_nodes;
        for (int b = 0; b < G.num_buckets(); ++b)
            for (const GuideEntry& g : G.bucket(b)) {
                double s = g.pos.s;
                if (s == 0 || s == m.edge_end(g.pos.edge)) ++got_nodes[g.circle.radius];
            }
        for (auto& [r, c] : want) CHECK(got_nodes[r] == c);
        // every level holds a guide: radii along any path from the anchor rise through all of them
        for (int b = 0; b < G.num_buckets(); ++b) CHECK(G.bucket(b).size() >= 1);
    }

    TEST_CASE("centroid tree is balanced and shallow") {
        std::mt19937_64 rng(2);
        for (int n : {10, 40, 100}) {
            auto idx = PolygonIndex::build(testutil::star_polygon(n, rng));
            const auto& ct = idx.centroids();
            int N = int(idx.axis().nodes().size());
            CHECK(int(ct.nodes().size()) == N);
            for (const auto& nd : ct.nodes())
                for (int c : nd.children) CHECK(ct.nodes()[c].size <= (nd.size + 1) / 2);
            CHECK(ct.depth() <= int(std::ceil(std::log2(double(N)))) + 1);
        }
    }

    TEST_CASE("clockwise input is accepted and reoriented") {
        auto sq = testutil::unit_square();
        std::reverse(sq.begin(), sq.end());
        auto idx = PolygonIndex::build(sq);
        CHECK(idx.axis().polygon().reversed);
        CHECK(polygon_query(idx, {0.1, 0.1}).radius == doctest::Approx(0.1 * (2 + std::sqrt(2.0))));
        MedialOptions strict;
        strict.strict = true;
        CHECK(code_of([&] { PolygonIndex::build(sq, strict); }) == ErrorCode::ClockwiseInput);
    }
}
