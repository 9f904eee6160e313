#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "qmec/io.hpp"
#include "testutil.hpp"

using namespace qmec;

namespace {

InputDocument points_doc(std::vector<Point> pts) {
    InputDocument d;
    d.points = std::move(pts);
    return d;
}

InputDocument polygon_doc(std::vector<Point> pts, InputKind k = InputKind::SimplePolygon) {
    InputDocument d;
    d.kind = k;
    d.points = std::move(pts);
    return d;
}

AnyIndex round_trip(const AnyIndex& a) {
    std::stringstream buf;
    a.save(buf);
    return AnyIndex::load(buf);
}

ErrorCode code_of(const std::function<void()>& f) {
    try {
        f();
    } catch (const Error& e) {
        return e.code();
    }
    return ErrorCode::InternalError;
}

}  // namespace

TEST_SUITE("io") {

TEST_CASE("csv points and parse errors") {
    auto d = parse_input("0,0\n1,0\n0,1\n1,1", InputFormat::Auto);
    CHECK(d.kind == InputKind::Points);
    CHECK(d.points.size() == 4);

    auto c = parse_input("# sites\n0 0\n\n1, 0   # right\n0,1\r\n+1,1e0\n", InputFormat::CSV);
    CHECK(c.points.size() == 4);
    CHECK(c.points[3].x == 1.0);
    CHECK(c.checksum == d.checksum);

    CHECK(code_of([] { parse_input("", InputFormat::Auto); }) == ErrorCode::ParseError);
    CHECK(code_of([] { parse_input("  \n\n", InputFormat::CSV); }) == ErrorCode::ParseError);
    try {
        parse_input("0,0\n1,0\n1,zz\n", InputFormat::CSV);
        FAIL("accepted a bad line");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::ParseError);
        CHECK(std::string(e.what()).find("line 3, column 3") != std::string::npos);
    }
    CHECK(code_of([] { parse_input("0,0\n1,0\n1,1,1\n", InputFormat::CSV); }) == ErrorCode::ParseError);
    CHECK(code_of([] { parse_input("0,0\n1,0\n0,0\n", InputFormat::CSV); }) == ErrorCode::ValidationError);
    CHECK(code_of([] { parse_input("0,0\n1,1\n2,2\n", InputFormat::CSV); }) == ErrorCode::ValidationError);
    CHECK(code_of([] { parse_input("0,0\n1,1\n", InputFormat::CSV); }) == ErrorCode::ValidationError);
}

TEST_CASE("json documents") {
    auto d = parse_input(R"({"kind":"polygon","name":"sq","points":[[0,0],[1,0],[1,1],[0,1]],"queries":[[0.1,0.1]]})",
                         InputFormat::Auto);
    CHECK(d.kind == InputKind::SimplePolygon);
    CHECK(d.name == "sq");
    CHECK(d.queries.size() == 1);

    try {
        parse_input(R"({"kind":"polygon","points":[[0,0],[1,1],[1,0],[0,1]]})", InputFormat::JSON);
        FAIL("accepted a bow tie");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::ValidationError);
        CHECK(std::string(e.what()) == "not simple");
    }
    CHECK(code_of([] {
              parse_input(R"({"kind":"convex","points":[[0,0],[2,0],[1,0.2],[2,2],[0,2]]})", InputFormat::JSON);
          }) == ErrorCode::ValidationError);
    CHECK(code_of([] { parse_input(R"({"kind":"blob","points":[]})", InputFormat::JSON); }) == ErrorCode::ParseError);
    CHECK(code_of([] { parse_input(R"({"points":[[0,0],[1]]})", InputFormat::JSON); }) == ErrorCode::ParseError);
    try {
        parse_input("{\n  \"points\": [[0,0],\n  ]", InputFormat::JSON);
        FAIL("accepted broken JSON");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::ParseError);
        CHECK(std::string(e.what()).find("line 3") != std::string::npos);
    }
    auto c = parse_input(R"({"kind":"circles","circles":[[0,0,1],[3,0,1]]})", InputFormat::JSON);
    CHECK(c.circles.size() == 2);
    CHECK(code_of([] { parse_input(R"({"kind":"circles","circles":[[0,0,-1]]})", InputFormat::JSON); }) ==
          ErrorCode::ValidationError);
}

TEST_CASE("query lines") {
    std::istringstream in("0.5,0.5\n\n# note\nbad\n1e-3 2\n3,4,5\n");
    auto l = read_query_lines(in);
    REQUIRE(l.size() == 4);
    CHECK(l[0].q.has_value());
    CHECK(l[0].line == 1);
    CHECK(!l[1].q.has_value());
    CHECK(l[1].line == 4);
    CHECK(l[2].q->x == 1e-3);
    CHECK(!l[3].q.has_value());
}

TEST_CASE("query output format") {
    AnyIndex sq = AnyIndex::build(points_doc(testutil::square_sites()));
    CHECK(sq.query_json({0.5, 0.5}) == R"({"cx":0.5,"cy":0.5,"r":0.7071067811865476})");
    std::string far = sq.query_json({10, 10});
    CHECK(far.rfind(R"({"unbounded":true,"dir":[)", 0) == 0);
    CHECK(sq.query_json({0, 0}) == R"({"error":"QueryAtSite"})");
    CHECK(sq.query_json({NAN, 0}) == R"({"error":"ValidationError"})");
    CHECK(sq.query_json({0.5, 0.5}, PointsVariant::Gamma) == R"({"error":"ValidationError"})");
    CHECK(sq.stats_json().find(R"("voronoi_vertices":1)") != std::string::npos);

    std::istringstream in("0.5,0.5\nnope\n10,10\n");
    std::ostringstream out;
    int errs = run_queries(sq, read_query_lines(in), std::nullopt, 1, out);
    CHECK(errs == 1);
    CHECK(out.str().find("{\"error\":\"ParseError\"}\n{\"unbounded\"") != std::string::npos);

    AnyIndex poly = AnyIndex::build(polygon_doc(testutil::unit_square()));
    CHECK(poly.query_json({0.1, 0.1}) ==
          R"({"cx":0.3414213562373095,"cy":0.3414213562373095,"r":0.3414213562373095})");
    CHECK(poly.query_json({2, 2}) == R"({"error":"QueryOutsidePolygon"})");

    for (double x : {0.1, 1.0 / 3, 2e-310, -7.25e200, M_PI}) CHECK(std::strtod(format_double(x).c_str(), nullptr) == x);
}

TEST_CASE("build flags") {
    auto sites = testutil::square_sites();
    BuildOptions bo;
    bo.gamma = true;
    CHECK(code_of([&] { AnyIndex::build(polygon_doc(testutil::unit_square()), bo); }) == ErrorCode::ValidationError);

    std::mt19937_64 rng(5);
    auto pts = testutil::uniform_points(500, rng);
    bo.gamma = false;
    bo.rpart = true;
    AnyIndex idx = AnyIndex::build(points_doc(pts), bo);
    const PointsStats& s = idx.points()->stats();
    const double n = double(idx.points()->graph().vertices().size());
    CHECK(s.rpart_max_part <= s.rpart_r);
    CHECK(double(s.rpart_boundary) <= 4.0 * n / std::sqrt(double(s.rpart_r)));
    CHECK(idx.default_variant() == PointsVariant::Rpart);
}

TEST_CASE("points save and load") {
    std::mt19937_64 rng(11);
    for (int t = 0; t < 4; ++t) {
        auto pts = t % 2 ? testutil::clustered_points(150, rng) : testutil::uniform_points(150, rng);
        BuildOptions bo;
        bo.gamma = bo.rpart = true;
        bo.seed = 17 + t;
        AnyIndex a = AnyIndex::build(points_doc(pts), bo);
        AnyIndex b = round_trip(a);
        CHECK(b.kind() == InputKind::Points);
        CHECK(b.source_checksum() == a.source_checksum());
        CHECK(b.memory_bytes() == a.memory_bytes());
        CHECK(b.stats_json() == a.stats_json());
        std::uniform_real_distribution<double> U(-0.1, 1.1);
        int diff = 0;
        for (int k = 0; k < 300; ++k) {
            Point q{U(rng), U(rng)};
            for (auto v : {PointsVariant::Base, PointsVariant::Gamma, PointsVariant::Rpart})
                diff += a.query_json(q, v) != b.query_json(q, v);
        }
        CHECK(diff == 0);
        // a second save is byte-identical
        std::stringstream s1, s2;
        a.save(s1);
        b.save(s2);
        CHECK(s1.str() == s2.str());
    }
}

TEST_CASE("polygon, convex and circle save and load") {
    std::mt19937_64 rng(12);
    auto star = testutil::star_polygon(40, rng);
    auto hull = testutil::convex_polygon(20, rng);
    for (auto [pts, kind] : {std::pair{star, InputKind::SimplePolygon}, std::pair{hull, InputKind::ConvexPolygon}}) {
        AnyIndex a = AnyIndex::build(polygon_doc(pts, kind));
        AnyIndex b = round_trip(a);
        CHECK(b.kind() == kind);
        for (Point q : testutil::interior_samples(pts, 200, rng)) CHECK(a.query_json(q) == b.query_json(q));
    }
    InputDocument c;
    c.kind = InputKind::Circles;
    std::uniform_real_distribution<double> U(0, 10);
    for (int i = 0; i < 50; ++i) c.circles.push_back({{U(rng), U(rng)}, 0.2 + U(rng) / 10});
    AnyIndex a = AnyIndex::build(c);
    AnyIndex b = round_trip(a);
    for (int k = 0; k < 500; ++k) {
        Point q{U(rng), U(rng)};
        CHECK(a.query_json(q) == b.query_json(q));
    }
}

TEST_CASE("corrupt index files") {
    std::mt19937_64 rng(13);
    BuildOptions bo;
    bo.rpart = true;
    AnyIndex a = AnyIndex::build(points_doc(testutil::uniform_points(80, rng)), bo);
    std::stringstream buf;
    a.save(buf);
    const std::string good = buf.str();

    auto load_str = [](const std::string& s) {
        std::istringstream in(s);
        return AnyIndex::load(in);
    };
    CHECK(code_of([&] { load_str("QMEC2\n{}\n"); }) == ErrorCode::ParseError);
    CHECK(code_of([&] { load_str("QMEC1\nnot json\n"); }) == ErrorCode::ParseError);
    CHECK(code_of([&] { load_str(good.substr(0, good.size() - 10)); }) == ErrorCode::ParseError);
    std::string flipped = good;
    flipped[flipped.size() - 40] ^= 0x5a;
    CHECK(code_of([&] { load_str(flipped); }) == ErrorCode::ParseError);
    CHECK(code_of([&] { AnyIndex::load_file("/nonexistent/idx"); }) == ErrorCode::IoError);
}

TEST_CASE("svg rendering") {
    AnyIndex sq = AnyIndex::build(polygon_doc(testutil::unit_square()));
    auto count = [](const std::string& s, const std::string& pat) {
        int c = 0;
        for (std::size_t p = s.find(pat); p != std::string::npos; p = s.find(pat, p + 1)) ++c;
        return c;
    };
    std::string plain = render_svg(sq);
    CHECK(count(plain, "class=\"axis\"") == 4);
    CHECK(count(plain, "class=\"highlight\"") == 0);
    CHECK(plain == render_svg(sq));

    SvgOptions so;
    so.query = Point{0.1, 0.1};
    std::string with = render_svg(sq, so);
    CHECK(count(with, "<circle class=\"highlight\"") == 1);

    so.query = Point{3, 3};
    CHECK(code_of([&] { render_svg(sq, so); }) == ErrorCode::RenderError);

    AnyIndex pts = AnyIndex::build(points_doc(testutil::square_sites()));
    so.query = Point{0.5, 0.5};
    std::string p = render_svg(pts, so);
    CHECK(count(p, "class=\"site\"") == 4);
    CHECK(count(p, "<circle class=\"highlight\"") == 1);
}

TEST_CASE("bench report") {
    BenchOptions bo;
    bo.repetitions = 0;
    CHECK(run_bench(bo).empty());

    bo.repetitions = 1;
    bo.sizes = {128, 256};
    bo.queries = 30;
    bo.structures = {"base", "gamma", "rpart", "naive"};
    auto r1 = run_bench(bo), r2 = run_bench(bo);
    REQUIRE(r1.size() == 8);
    for (std::size_t i = 0; i < r1.size(); ++i) {
        CHECK(r1[i].structure == r2[i].structure);
        CHECK(r1[i].seed == r2[i].seed);
        CHECK(r1[i].index_bytes == r2[i].index_bytes);
        CHECK(r1[i].mean_probes == r2[i].mean_probes);
    }
    bo.naive_limit = 128;
    CHECK(run_bench(bo).size() == 7);
    bo.structures = {"nope"};
    CHECK(code_of([&] { run_bench(bo); }) == ErrorCode::ValidationError);
    CHECK(bench_csv_row(r1[0]).rfind("base,128,0,", 0) == 0);
}

}  // TEST_SUITE
