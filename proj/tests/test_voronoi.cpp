#include <random>

#include "doctest.h"
#include "qmec/voronoi_graph.hpp"
#include "testutil.hpp"

using namespace qmec;

namespace {

double nearest_dist(const std::vector<Point>& s, Point p) {
    double b = 1e300;
    for (auto x : s) b = std::min(b, dist(x, p));
    return b;
}

}  // namespace

TEST_SUITE("voronoi") {
    TEST_CASE("delaunay: empty circumcircles") {
        std::mt19937_64 rng(3);
        auto pts = testutil::uniform_points(300, rng);
        auto T = Triangulation::delaunay(pts, 5);
        int finite = 0;
        for (int t = 0; t < int(T.tris().size()); ++t) {
            if (T.is_ghost(t)) continue;
            ++finite;
            auto& v = T.tris()[t].v;
            CHECK(orient_sign(pts[v[0]], pts[v[1]], pts[v[2]]) > 0);
            for (int k = 0; k < 3; ++k) {
                int n = T.tris()[t].nb[k];
                int j = 0;
                while (T.tris()[n].nb[j] != t) ++j;
                if (!T.is_ghost(n)) CHECK(incircle_sign(pts[v[0]], pts[v[1]], pts[v[2]], pts[T.tris()[n].v[j]]) <= 0);
            }
        }
        // Euler: 2n - h - 2 triangles
        int h = 0;
        for (int t = 0; t < int(T.tris().size()); ++t) h += T.is_ghost(t);
        CHECK(finite == 2 * 300 - h - 2);
    }

    TEST_CASE("delaunay on a grid (many cocircular quadruples)") {
        std::vector<Point> pts;
        for (int i = 0; i < 12; ++i)
            for (int j = 0; j < 12; ++j) pts.push_back({double(i), double(j)});
        auto T = Triangulation::delaunay(pts, 9);
        int nc = 0;
        T.triangle_classes(&nc);
        CHECK(nc == 11 * 11);
    }

    TEST_CASE("regular triangulation drops dominated points") {
        std::vector<Point> p{{0, 0}, {4, 0}, {0, 4}, {1, 1}};
        std::vector<double> w{1, 1, 1, 0.0};
        auto T = Triangulation::regular(p, w);
        CHECK(T.is_vertex(3));
        std::vector<double> w2{100, 100, 100, 0.0};
        auto T2 = Triangulation::regular(p, w2);
        CHECK_FALSE(T2.is_vertex(3));
    }

    TEST_CASE("square sites") {
        auto g = VoronoiGraph::build(testutil::square_sites());
        CHECK(g.num_voronoi() == 1);
        CHECK(g.vertices().size() == 5);
        CHECK(g.vertices()[0].pos.x == doctest::Approx(0.5));
        CHECK(g.vertices()[0].pos.y == doctest::Approx(0.5));
        CHECK(g.vertices()[0].radius == doctest::Approx(std::sqrt(0.5)));
        CHECK(g.vertices()[0].sites.size() == 4);
        CHECK(g.artificial_conditions_hold());
        auto c = g.mec_at({0.5, 0.5});
        CHECK(c.radius == doctest::Approx(std::sqrt(0.5)));
        auto c2 = g.mec_at({0.5, 1.5});
        CHECK(c2.radius == doctest::Approx(nearest_dist(g.sites(), {0.5, 1.5})));
        CHECK_THROWS_AS(g.mec_at({10, 10}), Error);
    }

    TEST_CASE("equilateral sites") {
        auto g = VoronoiGraph::build(testutil::equilateral_sites());
        CHECK(g.num_voronoi() == 1);
        CHECK(g.vertices()[0].radius == doctest::Approx(1 / std::sqrt(3.0)));
    }

    TEST_CASE("bad inputs") {
        CHECK_THROWS_AS(VoronoiGraph::build({{0, 0}, {1, 1}}), Error);
        try {
            VoronoiGraph::build({{0, 0}, {1, 1}, {2, 2}});
            CHECK(false);
        } catch (const Error& e) {
            CHECK(e.code() == ErrorCode::AllCollinear);
        }
        try {
            VoronoiGraph::build({{0, 0}, {1, 1}, {0, 1}, {1, 1}});
            CHECK(false);
        } catch (const Error& e) {
            CHECK(e.code() == ErrorCode::DuplicateSites);
        }
    }

    TEST_CASE("next_step and unique_path on the square") {
        auto g = VoronoiGraph::build(testutil::square_sites());
        // artificial vertex above the square
        int up = -1;
        for (int v = 1; v < 5; ++v)
            if (g.vertices()[v].pos.y > 1 && std::fabs(g.vertices()[v].pos.x - 0.5) < 1e-12) up = v;
        REQUIRE(up >= 0);
        int e = g.next_step(GraphPos::at_vertex(0), GraphPos::at_vertex(up));
        CHECK(g.other(e, 0) == up);
        auto P = g.unique_path(GraphPos::at_vertex(0), GraphPos::at_vertex(up));
        CHECK(P.vertices.size() == 2);
        CHECK(P.edges.size() == 1);
        CHECK_THROWS_AS(g.next_step(GraphPos::at_vertex(0), GraphPos::at_vertex(0)), Error);
        // two artificial MECs on opposite sides do not overlap
        int down = -1;
        for (int v = 1; v < 5; ++v)
            if (g.vertices()[v].pos.y < 0) down = v;
        try {
            g.next_step(GraphPos::at_vertex(up), GraphPos::at_vertex(down));
            CHECK(false);
        } catch (const Error& err) {
            CHECK(err.code() == ErrorCode::NonOverlappingMecs);
        }
        auto S = g.unique_path(GraphPos::at_vertex(0), GraphPos::at_vertex(0));
        CHECK(S.vertices.size() == 1);
    }

    TEST_CASE("edges: bisector points are equidistant and nearest") {
        std::mt19937_64 rng(21);
        auto pts = testutil::uniform_points(200, rng);
        auto g = VoronoiGraph::build(pts);
        std::uniform_real_distribution<double> U(0.01, 0.99);
        for (int e = 0; e < int(g.edges().size()); ++e) {
            const auto& E = g.edges()[e];
            for (int k = 0; k < 5; ++k) {
                Point x = g.edge_point(e, E.is_ray() ? 10 * U(rng) : U(rng));
                double dl = dist(x, pts[E.left]), dr = dist(x, pts[E.right]);
                CHECK(std::fabs(dl - dr) <= 1e-9 * std::max(1.0, dl));
                CHECK(nearest_dist(pts, x) >= dl - 1e-9 * std::max(1.0, dl));
            }
        }
        for (const auto& V : g.vertices()) CHECK(std::fabs(nearest_dist(pts, V.pos) - V.radius) <= 1e-9 * std::max(1.0, V.radius));
        CHECK(g.artificial_conditions_hold());
        // planar graph: V - E + F = 2 with one face per site
        int finite_edges = 0;
        for (const auto& E : g.edges()) finite_edges += !E.is_ray();
        CHECK(int(g.vertices().size()) - finite_edges + (int(pts.size()) - int(g.hull().size()) + 1) == 2);
    }

    TEST_CASE("unique path: lens points inside every on-path MEC") {
        std::mt19937_64 rng(5);
        auto pts = testutil::uniform_points(10, rng);
        auto g = VoronoiGraph::build(pts);
        const int V = int(g.vertices().size());
        int checked = 0;
        for (int a = 0; a < V; ++a)
            for (int b = 0; b < V; ++b) {
                if (a == b) continue;
                Circle A = g.mec(a), B = g.mec(b);
                if (!(dist(A.center, B.center) < A.radius + B.radius)) continue;
                if (!testutil::lens_meets_hull(g, A, B, rng)) continue;
                auto P = g.unique_path(GraphPos::at_vertex(a), GraphPos::at_vertex(b));
                CHECK(P.vertices.front() == a);
                CHECK(P.vertices.back() == b);
                std::vector<int> s = P.vertices;
                std::sort(s.begin(), s.end());
                CHECK(std::adjacent_find(s.begin(), s.end()) == s.end());
                for (int k = 0; k < 50; ++k) {
                    Point q = testutil::lens_sample(A, B, rng);
                    for (int v : P.vertices) CHECK(contains(g.mec(v), q));
                }
                ++checked;
            }
        CHECK(checked > 0);
    }
}
