#include <cmath>
#include <map>
#include <random>

#include "doctest.h"
#include "qmec/oracle.hpp"
#include "qmec/points.hpp"
#include "testutil.hpp"

using namespace qmec;

namespace {

bool empty_of_sites(const std::vector<Point>& s, const Circle& c) {
    for (auto p : s)
        if (dist(p, c.center) < c.radius * (1 - 1e-9)) return false;
    return true;
}

std::vector<Point> hull_queries(const PointsIndex& I, int k, std::mt19937_64& rng) {
    double x0 = 1e300, x1 = -1e300, y0 = 1e300, y1 = -1e300;
    for (auto p : I.sites()) {
        x0 = std::min(x0, p.x), x1 = std::max(x1, p.x);
        y0 = std::min(y0, p.y), y1 = std::max(y1, p.y);
    }
    std::uniform_real_distribution<double> X(x0, x1), Y(y0, y1);
    std::vector<Point> q;
    while (int(q.size()) < k) {
        Point p{X(rng), Y(rng)};
        if (I.graph().inside_hull(p)) q.push_back(p);
    }
    return q;
}

}  // namespace

TEST_SUITE("points") {
    TEST_CASE("square corners") {
        PointsOptions o;
        o.gamma = o.rpart = true;
        auto I = PointsIndex::build(testutil::square_sites(), o);
        CHECK(I.graph().vertices().size() == 5);
        CHECK(I.stats().depth == 2);  // root plus one child
        for (auto r : {I.query({0.5, 0.5}), I.gamma_query({0.5, 0.5}), I.rpart_query({0.5, 0.5})}) {
            REQUIRE(r.bounded);
            CHECK(r.circle.radius == doctest::Approx(std::sqrt(2.0) / 2));
            CHECK(r.circle.center.x == doctest::Approx(0.5));
        }
        auto u = I.query({10, 10});
        CHECK_FALSE(u.bounded);
        CHECK(u.direction.x > 0);
        CHECK(u.direction.y > 0);
        CHECK_FALSE(I.query({0.5, 0}).bounded);  // on the hull
        CHECK_THROWS_AS(I.query({1, 1}), Error);
        try {
            I.query({0, 0});
        } catch (const Error& e) {
            CHECK(e.code() == ErrorCode::QueryAtSite);
        }
        CHECK(I.query({0.1, 0.5}).circle.radius == doctest::Approx(1.3));
    }

    TEST_CASE("equilateral centroid") {
        auto s = testutil::equilateral_sites();
        auto I = PointsIndex::build(s, {});
        Point c = (1.0 / 3) * (s[0] + s[1] + s[2]);
        auto r = I.query(c);
        REQUIRE(r.bounded);
        CHECK(r.circle.radius == doctest::Approx(1 / std::sqrt(3.0)));
    }

    TEST_CASE("bad site sets") {
        CHECK_THROWS_AS(PointsIndex::build({{0, 0}, {1, 1}, {2, 2}}, {}), Error);
        CHECK_THROWS_AS(PointsIndex::build({{0, 0}, {1, 1}}, {}), Error);
    }

    TEST_CASE("variants agree with the oracle") {
        std::mt19937_64 rng(11);
        for (int trial = 0; trial < 8; ++trial) {
            int n = std::vector<int>{10, 30, 50, 120}[trial % 4];
            auto s = trial % 2 ? testutil::clustered_points(n, rng) : testutil::uniform_points(n, rng);
            PointsOptions o;
            o.gamma = o.rpart = true;
            o.seed = 100 + trial;
            auto I = PointsIndex::build(s, o);
            CHECK(I.stats().sep_ok);
            PointsOracle O(s);
            for (auto q : hull_queries(I, 150, rng)) {
                auto want = O.query(q).result;
                ProbeCount pb, pg, pr;
                auto b = I.query(q, &pb);
                auto gq = I.gamma_query(q, &pg);
                auto rq = I.rpart_query(q, &pr);
                REQUIRE(want.bounded);
                for (auto* r : {&b, &gq, &rq}) {
                    REQUIRE(r->bounded);
                    CHECK(r->circle.radius == doctest::Approx(want.circle.radius).epsilon(1e-6));
                    CHECK(contains(r->circle, q));
                    CHECK(empty_of_sites(s, r->circle));
                }
                CHECK(pr.plica <= 2);
                CHECK(pg.plica <= int(std::ceil(std::log2(I.stats().depth))) + 1);
            }
        }
    }

    TEST_CASE("guiding circles satisfy the path condition") {
        std::mt19937_64 rng(21);
        auto s = testutil::uniform_points(50, rng);
        auto I = PointsIndex::build(s, {});
        QicContext ctx{&I.graph(), nullptr};
        auto frames = edge_frames(I.graph());
        ctx.frames = &frames;
        const auto& g = I.graph();
        long checked = 0;
        for (auto& nd : I.nodes()) {
            std::vector<char> in(g.vertices().size(), 0);
            for (int v : nd.verts) in[v] = 1;
            for (int slot = 0; slot < nd.qic.num_sources(); ++slot) {
                int v = nd.qic.source_vertex(slot);
                std::map<int, int> per_bucket;
                for (auto& gd : nd.qic.guides(ctx, slot)) {
                    ++per_bucket[gd.k];
                    CHECK(gd.circle.radius >= g.vertices()[v].radius);
                    // overlap with the source MEC
                    CHECK(dist(gd.circle.center, g.vertices()[v].pos) < gd.circle.radius + g.vertices()[v].radius);
                    if (gd.vertex == v) continue;
                    GraphPos to = gd.vertex >= 0 ? GraphPos::at_vertex(gd.vertex)
                                                 : GraphPos::on_edge(gd.edge, g.project(gd.edge, gd.circle.center));
                    auto P = g.unique_path(GraphPos::at_vertex(v), to);
                    for (int w : P.vertices) {
                        CHECK(in[w]);
                        CHECK(g.vertices()[w].radius <= gd.circle.radius * (1 + 1e-12));
                    }
                    ++checked;
                }
                for (auto [k, c] : per_bucket) CHECK(c <= 36);
            }
        }
        CHECK(checked > 0);
        CHECK(I.stats().qic.max_bucket <= 36);
    }

    TEST_CASE("qic at a vertex position") {
        std::mt19937_64 rng(4);
        auto s = testutil::uniform_points(60, rng);
        auto I = PointsIndex::build(s, {});
        const auto& root = I.nodes()[0];
        QicContext ctx{&I.graph(), nullptr};
        auto frames = edge_frames(I.graph());
        ctx.frames = &frames;
        for (int slot = 0; slot < root.qic.num_sources(); ++slot) {
            int v = root.qic.source_vertex(slot);
            Point q = I.graph().vertices()[v].pos;
            if (!I.graph().inside_hull(q)) continue;
            auto c = root.qic.query(ctx, slot, q);
            CHECK(c.radius >= I.graph().vertices()[v].radius);
            auto want = oracle_points(s, q).result;
            CHECK(c.radius == doctest::Approx(want.circle.radius).epsilon(1e-6));
        }
        // promise violation
        int v = root.qic.source_vertex(0);
        Point far = I.graph().vertices()[v].pos + Point{3 * I.graph().vertices()[v].radius + 1, 0};
        CHECK_THROWS_AS(root.qic.query(ctx, 0, far), Error);
    }

    TEST_CASE("r-partition") {
        std::mt19937_64 rng(8);
        auto G = VoronoiGraph::build(testutil::uniform_points(500, rng));
        const int N = int(G.vertices().size());
        auto one = build_rpartition(G, N);
        CHECK(one.parts.size() == 1);
        CHECK(one.boundary.empty());
        auto single = build_rpartition(G, 1);
        CHECK(single.parts.size() == std::size_t(N));
        for (int r : {30, 100}) {
            auto P = build_rpartition(G, r);
            std::vector<int> seen(N, 0);
            for (auto& p : P.parts) {
                CHECK(int(p.size()) <= r);
                for (int v : p) ++seen[v];
            }
            for (int v : P.boundary) ++seen[v];
            for (int v = 0; v < N; ++v) CHECK(seen[v] == 1);
            CHECK(double(P.boundary.size()) <= 10.0 * N / std::sqrt(double(r)));
            CHECK(P.parts.size() <= std::size_t(4 * N / r + 1));
            // no edge between interiors of different parts
            for (auto& e : G.edges()) {
                if (e.is_ray()) continue;
                int a = P.part_of[e.u], b = P.part_of[e.v];
                CHECK_FALSE((a >= 0 && b >= 0 && a != b));
            }
        }
    }
}
