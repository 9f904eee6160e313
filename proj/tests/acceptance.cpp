// Acceptance run: one PASS/FAIL line per criterion.
// Usage: acceptance [criterion numbers...]   (default: all)

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "qmec/io.hpp"
#include "qmec/oracle.hpp"
#include "testutil.hpp"

using namespace qmec;

namespace {

using Clock = std::chrono::steady_clock;
double secs(Clock::time_point t) { return std::chrono::duration<double>(Clock::now() - t).count(); }

struct Verdict {
    bool ran = false;
    bool ok = true;
    std::string detail;
};
std::map<int, Verdict> verdicts;

void fail(int c, const std::string& why) {
    Verdict& v = verdicts[c];
    v.ran = true;
    if (v.ok) v.detail = why;  // keep the first failure
    v.ok = false;
}
void note(int c, const std::string& d) {
    Verdict& v = verdicts[c];
    v.ran = true;
    if (v.ok) v.detail = d;
}

std::string fmt(const char* f, double a = 0, double b = 0, double c = 0, double d = 0) {
    char buf[256];
    std::snprintf(buf, sizeof buf, f, a, b, c, d);
    return buf;
}

bool rel_close(double a, double b, double tol) { return std::fabs(a - b) <= tol * std::max(1.0, std::fabs(b)); }

bool same_result(const QueryResult& a, const QueryResult& b, double tol) {
    if (a.bounded != b.bounded) return false;
    return !a.bounded || rel_close(a.circle.radius, b.circle.radius, tol);
}

// ---- criterion 5 bookkeeping, fed by the builds of 1-3 ----

struct Structural {
    int max_bucket = 0;
    double max_sep_ratio = 0, max_part_ratio = 0;
    double max_boundary_ratio = 0;  // boundary / (n / sqrt(r))
    double max_centroid_ratio = 0;  // child size / ceil(parent size / 2)
    long monotone_violations = 0;
    long monotone_samples = 0;
};
Structural S;
constexpr double kBoundaryConst = 4.0;

void structural_points(const PointsIndex& I) {
    const PointsStats& s = I.stats();
    S.max_bucket = std::max({S.max_bucket, s.qic.max_bucket, s.rpart_qic.max_bucket});
    S.max_sep_ratio = std::max(S.max_sep_ratio, s.max_sep_ratio);
    S.max_part_ratio = std::max(S.max_part_ratio, s.max_part_ratio);
    if (I.has_rpart()) {
        double n = double(I.graph().vertices().size());
        S.max_boundary_ratio = std::max(S.max_boundary_ratio, s.rpart_boundary / (n / std::sqrt(double(s.rpart_r))));
    }
}

void structural_polygon(const PolygonIndex& P) {
    S.max_bucket = std::max(S.max_bucket, P.stats().qic.max_bucket);
    const auto& ct = P.centroids().nodes();
    for (const auto& nd : ct)
        if (nd.parent >= 0) {
            double cap = std::ceil(ct[nd.parent].size / 2.0);
            S.max_centroid_ratio = std::max(S.max_centroid_ratio, nd.size / cap);
        }
    const MedialAxisTree& m = P.axis();
    for (const auto& g : P.forest().segs()) {
        double from = g.hi_is_parent ? g.s_lo : g.s_hi, to = g.hi_is_parent ? g.s_hi : g.s_lo;
        double prev = m.clearance({g.edge, from});
        for (int k = 1; k <= 16; ++k) {
            double r = m.clearance({g.edge, from + (to - from) * k / 16});
            ++S.monotone_samples;
            if (r < prev - 1e-9 * std::max(1.0, prev)) ++S.monotone_violations;
            prev = r;
        }
    }
}

// ---- criteria 1, 2, 9 ----

void points_suite(bool c1, bool c2, bool c9) {
    std::mt19937_64 rng(20240601);
    const int sizes[] = {10, 30, 100, 300};
    long trials = 0, bad_radius = 0, bad_empty = 0, bad_contains = 0, bad_gamma = 0, bad_rpart = 0, bad_json = 0;
    double c1_time = 0, c9_time = 0;
    double worst = 0;
    for (int set = 0; set < 100; ++set) {
        const int n = sizes[set % 4];
        const bool clustered = (set / 4) % 2;
        auto t0 = Clock::now();
        InputDocument doc;
        doc.points = clustered ? testutil::clustered_points(n, rng) : testutil::uniform_points(n, rng);
        BuildOptions bo;
        bo.gamma = bo.rpart = true;
        bo.seed = 1000 + set;
        AnyIndex any = AnyIndex::build(doc, bo);
        const PointsIndex& I = *any.points();
        structural_points(I);
        PointsOracle orc(doc.points);
        double x0 = 1e300, x1 = -1e300, y0 = 1e300, y1 = -1e300;
        for (Point p : doc.points) x0 = std::min(x0, p.x), x1 = std::max(x1, p.x), y0 = std::min(y0, p.y), y1 = std::max(y1, p.y);
        // a margin puts some queries outside the hull
        double mx = 0.05 * (x1 - x0), my = 0.05 * (y1 - y0);
        std::uniform_real_distribution<double> UX(x0 - mx, x1 + mx), UY(y0 - my, y1 + my);
        std::vector<Point> qs;
        for (int k = 0; k < 200; ++k) qs.push_back({UX(rng), UY(rng)});
        for (Point q : qs) {
            ++trials;
            QueryResult want = orc.query(q).result;
            QueryResult got = I.query(q);
            if (!same_result(got, want, 1e-6)) ++bad_radius;
            if (want.bounded && got.bounded) worst = std::max(worst, std::fabs(got.circle.radius - want.circle.radius) / want.circle.radius);
            if (got.bounded) {
                if (!contains(got.circle, q)) ++bad_contains;
                for (Point p : doc.points)
                    if (dist(p, got.circle.center) < got.circle.radius * (1 - 1e-9)) {
                        ++bad_empty;
                        break;
                    }
            }
            if (c2) {
                if (!same_result(I.gamma_query(q), got, 1e-6)) ++bad_gamma;
                if (!same_result(I.rpart_query(q), got, 1e-6)) ++bad_rpart;
            }
        }
        c1_time += secs(t0);
        if (c9) {
            auto t1 = Clock::now();
            std::stringstream buf;
            any.save(buf);
            AnyIndex back = AnyIndex::load(buf);
            for (Point q : qs)
                for (auto v : {PointsVariant::Base, PointsVariant::Gamma, PointsVariant::Rpart})
                    if (any.query_json(q, v) != back.query_json(q, v)) ++bad_json;
            c9_time += secs(t1);
        }
    }
    if (c1) {
        std::string d = fmt("%.0f trials, worst rel err %.2g, %.1f s", double(trials), worst, c1_time);
        if (bad_radius) fail(1, fmt("%.0f radius mismatches; ", double(bad_radius)) + d);
        if (bad_empty) fail(1, fmt("%.0f non-empty circles; ", double(bad_empty)) + d);
        if (bad_contains) fail(1, fmt("%.0f circles miss q; ", double(bad_contains)) + d);
        if (c1_time >= 600) fail(1, "too slow; " + d);
        note(1, d);
    }
    if (c2) {
        std::string d = fmt("%.0f trials, GAMMA mismatches %.0f, RPART mismatches %.0f", double(trials),
                            double(bad_gamma), double(bad_rpart));
        if (bad_gamma || bad_rpart) fail(2, d);
        note(2, d);
    }
    if (c9) {
        std::string d = fmt("%.0f JSON lines compared, %.0f differ, %.1f s", double(trials * 3), double(bad_json), c9_time);
        if (bad_json) fail(9, d);
        note(9, d);
    }
}

// ---- criterion 3 ----

void polygon_suite() {
    std::mt19937_64 rng(777);
    const int sizes[] = {8, 20, 60, 100};
    long trials = 0, bad = 0, convex_trials = 0, convex_bad = 0, branches[3] = {0, 0, 0};
    double worst = 0;
    auto t0 = Clock::now();
    for (int i = 0; i < 50; ++i) {
        const int n = sizes[i % 4];
        const bool convex = i % 5 == 4;
        auto poly = convex ? testutil::convex_polygon(n, rng) : testutil::star_polygon(n, rng);
        PolygonIndex P = PolygonIndex::build(poly);
        structural_polygon(P);
        PolygonOracle orc(poly);
        std::unique_ptr<ConvexIndex> C;
        if (convex) C = std::make_unique<ConvexIndex>(ConvexIndex::build(poly));
        for (Point q : testutil::interior_samples(poly, 200, rng)) {
            ++trials;
            double want = orc.query(q).result.circle.radius;
            PolygonQueryInfo info;
            double got = P.query(q, &info).radius;
            ++branches[int(info.branch)];
            worst = std::max(worst, std::fabs(got - want) / want);
            if (!rel_close(got, want, 1e-5)) ++bad;
            if (C) {
                ++convex_trials;
                if (!rel_close(C->query(q).radius, want, 1e-5)) ++convex_bad;
            }
        }
    }
    std::string d = fmt("%.0f trials (%.0f convex), worst rel err %.2g, %.1f s", double(trials), double(convex_trials),
                        worst, secs(t0));
    d += fmt(", branches node/valley/locator %.0f/%.0f/%.0f", double(branches[0]), double(branches[1]),
             double(branches[2]));
    if (bad) fail(3, fmt("%.0f polygon mismatches; ", double(bad)) + d);
    if (convex_bad) fail(3, fmt("%.0f convex mismatches; ", double(convex_bad)) + d);
    note(3, d);
}

// ---- criterion 4 ----

void golden() {
    std::vector<std::string> bad;
    auto sq = PointsIndex::build(testutil::square_sites());
    QueryResult a = sq.query({0.5, 0.5});
    if (!a.bounded || std::fabs(a.circle.radius - std::sqrt(2.0) / 2) > 1e-9) bad.push_back("square sites");
    Circle b = PolygonIndex::build(testutil::unit_square()).query({0.1, 0.1});
    if (std::fabs(b.radius - 0.1 * (2 + std::sqrt(2.0))) > 1e-9) bad.push_back("square polygon");
    Circle bc = ConvexIndex::build(testutil::unit_square()).query({0.1, 0.1});
    if (std::fabs(bc.radius - 0.1 * (2 + std::sqrt(2.0))) > 1e-9) bad.push_back("square convex");
    auto eq = PointsIndex::build(testutil::equilateral_sites());
    QueryResult c = eq.query({0.5, std::sqrt(3.0) / 6});
    if (!c.bounded || std::fabs(c.circle.radius - 1 / std::sqrt(3.0)) > 1e-9) bad.push_back("equilateral");
    if (sq.query({10, 10}).bounded || sq.query({-3, 0.5}).bounded || eq.query({0.5, -1}).bounded)
        bad.push_back("outside hull");
    std::string d = fmt("r = %.15g, %.15g, %.15g", a.circle.radius, b.radius, c.circle.radius);
    if (!bad.empty()) {
        std::string w;
        for (auto& s : bad) w += s + " ";
        fail(4, "wrong: " + w + "; " + d);
    }
    note(4, d + ", outside hull unbounded");
}

// ---- criterion 5 verdict ----

void structural_verdict() {
    std::string d = fmt("max |S| %.0f, |W|/sqrt|G| %.3f, part ratio %.3f, ", S.max_bucket, S.max_sep_ratio,
                        S.max_part_ratio);
    d += fmt("boundary/(n/sqrt r) %.3f (c_b = %.0f), centroid child/ceil(n/2) %.3f, ", S.max_boundary_ratio,
             kBoundaryConst, S.max_centroid_ratio);
    d += fmt("monotone %.0f/%.0f samples", double(S.monotone_samples - S.monotone_violations),
             double(S.monotone_samples));
    if (S.max_bucket > 36) fail(5, "|S_v^r| above 36; " + d);
    if (S.max_sep_ratio > 4) fail(5, "separator too large; " + d);
    if (S.max_part_ratio > 2.0 / 3.0 + 1e-12) fail(5, "separator part too large; " + d);
    if (S.max_boundary_ratio > kBoundaryConst) fail(5, "r-partition boundary too large; " + d);
    if (S.max_centroid_ratio > 1.0) fail(5, "centroid child too large; " + d);
    if (S.monotone_violations) fail(5, "mountain clearance not monotone; " + d);
    note(5, d);
}

// ---- criterion 6 ----

void plica_suite() {
    std::mt19937_64 rng(4242);
    std::uniform_real_distribution<double> U(0, 1);
    long trials = 0, bad = 0, hits = 0, bad_witness = 0;
    auto t0 = Clock::now();
    for (int set = 0; set < 500; ++set) {
        int n = set % 10 == 0 ? 1 + int(rng() % 8) : 10 + int(rng() % 290);
        double rmax = 0.02 + 0.3 * U(rng);
        std::vector<Circle> cs;
        for (int i = 0; i < n; ++i) cs.push_back({{U(rng), U(rng)}, rmax * (0.1 + 0.9 * U(rng))});
        // occasional equal radii on a grid, a degenerate power diagram
        if (set % 25 == 7) {
            cs.clear();
            for (int i = 0; i < 12; ++i)
                for (int j = 0; j < 12; ++j) cs.push_back({{i / 11.0, j / 11.0}, 0.05});
        }
        PlicaIndex P = PlicaIndex::build(cs, set + 1);
        std::uniform_real_distribution<double> Q(-0.2, 1.2);
        for (int k = 0; k < 200; ++k) {
            Point q{Q(rng), Q(rng)};
            ++trials;
            auto r = P.query(q);
            auto o = oracle_plica(cs, q);
            if (r.has_value() != o.has_value()) ++bad;
            if (r) {
                ++hits;
                if (!contains(cs[*r], q)) ++bad_witness;
            }
        }
    }
    std::string d = fmt("%.0f trials, %.0f hits, %.1f s", double(trials), double(hits), secs(t0));
    if (bad) fail(6, fmt("%.0f hit/miss disagreements; ", double(bad)) + d);
    if (bad_witness) fail(6, fmt("%.0f witnesses miss q; ", double(bad_witness)) + d);
    note(6, d);
}

// ---- criterion 7 ----

void unique_path_suite() {
    std::mt19937_64 rng(99);
    long pairs = 0, bad_simple = 0, bad_ends = 0, bad_lens = 0, threw = 0;
    std::size_t longest = 0;
    auto t0 = Clock::now();
    int set = 0;
    while (pairs < 10000) {
        int n = 10 + int(rng() % 90);
        auto pts = set++ % 2 ? testutil::clustered_points(n, rng) : testutil::uniform_points(n, rng);
        auto g = VoronoiGraph::build(pts, set);
        const int V = g.num_voronoi();
        // at most 50 pairs per site set, so the pairs spread over many sets
        for (int tries = 0, here = 0; tries < 4000 && here < 50 && pairs < 10000; ++tries) {
            int a = int(rng() % V), b = int(rng() % V);
            if (a == b || g.vertices()[a].kind != VorVertex::VORONOI || g.vertices()[b].kind != VorVertex::VORONOI)
                continue;
            Circle A = g.mec(a), B = g.mec(b);
            if (!(dist(A.center, B.center) < A.radius + B.radius)) continue;
            if (!testutil::lens_meets_hull(g, A, B, rng)) continue;
            ++pairs, ++here;
            UniquePath P;
            try {
                P = g.unique_path(GraphPos::at_vertex(a), GraphPos::at_vertex(b));
            } catch (const Error&) {
                ++threw;
                continue;
            }
            longest = std::max(longest, P.vertices.size());
            if (P.vertices.empty() || P.vertices.front() != a || P.vertices.back() != b) ++bad_ends;
            std::vector<int> s = P.vertices;
            std::sort(s.begin(), s.end());
            if (std::adjacent_find(s.begin(), s.end()) != s.end()) ++bad_simple;
            bool lens_ok = true;
            for (int k = 0; k < 50 && lens_ok; ++k) {
                Point q = testutil::lens_sample(A, B, rng);
                for (int v : P.vertices)
                    if (!contains(g.mec(v), q)) {
                        lens_ok = false;
                        break;
                    }
            }
            bad_lens += !lens_ok;
        }
    }
    std::string d = fmt("%.0f pairs over %.0f site sets, longest path %.0f, %.1f s", double(pairs), double(set),
                        double(longest), secs(t0));
    if (threw) fail(7, fmt("%.0f walks failed; ", double(threw)) + d);
    if (bad_ends) fail(7, fmt("%.0f wrong endpoints; ", double(bad_ends)) + d);
    if (bad_simple) fail(7, fmt("%.0f non-simple paths; ", double(bad_simple)) + d);
    if (bad_lens) fail(7, fmt("%.0f lens violations; ", double(bad_lens)) + d);
    note(7, d);
}

// ---- criterion 8 ----

double slope(const std::vector<double>& x, const std::vector<double>& y) {
    const int n = int(x.size());
    double mx = 0, my = 0;
    for (int i = 0; i < n; ++i) mx += x[i] / n, my += y[i] / n;
    double sxy = 0, sxx = 0;
    for (int i = 0; i < n; ++i) sxy += (x[i] - mx) * (y[i] - my), sxx += (x[i] - mx) * (x[i] - mx);
    return sxy / sxx;
}

void scaling_suite() {
    std::vector<double> lx, base_size, gamma_probe, rpart_probe, base_probe;
    std::string table;
    auto t0 = Clock::now();
    for (int k = 10; k <= 15; ++k) {
        const int n = 1 << k;
        auto sites = bench_sites(n, 31337 + k);
        std::mt19937_64 rng(k);
        std::uniform_real_distribution<double> U(0, 1);
        double bp = 0, gp = 0, rp = 0, bytes = 0;
        std::vector<Point> qs;
        {
            PointsOptions po;
            po.gamma = true;
            po.seed = k;
            PointsIndex I = PointsIndex::build(sites, po);
            structural_points(I);
            while (qs.size() < 400) {
                Point q{U(rng), U(rng)};
                if (I.graph().inside_hull(q)) qs.push_back(q);
            }
            for (Point q : qs) {
                ProbeCount a, b;
                I.query(q, &a);
                I.gamma_query(q, &b);
                bp += a.plica + a.qic;
                gp += b.plica + b.qic;
            }
            bytes = double(I.base_bytes());
        }
        {
            PointsOptions po;
            po.rpart = true;
            po.seed = k;
            PointsIndex I = PointsIndex::build(sites, po);
            structural_points(I);
            for (Point q : qs) {
                ProbeCount c;
                I.rpart_query(q, &c);
                rp += c.plica + c.qic;
            }
        }
        bp /= qs.size(), gp /= qs.size(), rp /= qs.size();
        lx.push_back(std::log(double(n)));
        base_size.push_back(std::log(bytes));
        base_probe.push_back(std::log(bp));
        // GAMMA searches over levels: divide out log log n
        gamma_probe.push_back(std::log(gp / std::log2(std::log2(double(n)))));
        rpart_probe.push_back(std::log(rp));
        table += fmt("n=%.0f base %.3g B, probes base %.2f gamma %.2f", n, bytes, bp, gp) + fmt(" rpart %.2f; ", rp);
        std::printf("  [scaling] %s\n", table.substr(table.rfind("n=")).c_str());
        std::fflush(stdout);
    }
    double sr = slope(lx, rpart_probe), sg = slope(lx, gamma_probe), sb = slope(lx, base_size),
           sbp = slope(lx, base_probe);
    std::string d = fmt("slopes: RPART probes %.3f, GAMMA probes/loglog %.3f, BASE size %.3f", sr, sg, sb);
    d += fmt(" (BASE probes %.3f), %.0f s", sbp, secs(t0));
    if (sr > 0.15) fail(8, "RPART probe slope above 0.15; " + d);
    if (sg > 0.15) fail(8, "GAMMA probe slope above 0.15; " + d);
    if (sb < 1.3 || sb > 1.7) fail(8, "BASE size slope outside [1.3, 1.7]; " + d);
    note(8, d);
}

}  // namespace

int main(int argc, char** argv) {
    std::set<int> want;
    for (int i = 1; i < argc; ++i) want.insert(std::atoi(argv[i]));
    auto on = [&](int c) { return want.empty() || want.count(c); };
    // criterion 5 collects from the builds of 1-3 (and 8)
    bool c5 = on(5);
    if (on(1) || on(2) || on(9) || c5) points_suite(on(1), on(2) || c5, on(9));
    if (on(3) || c5) polygon_suite();
    if (on(4)) golden();
    if (on(6)) plica_suite();
    if (on(7)) unique_path_suite();
    if (on(8)) scaling_suite();
    if (c5) structural_verdict();

    static const char* names[] = {"",
                                  "points oracle equivalence",
                                  "GAMMA and RPART agree with BASE",
                                  "polygon oracle equivalence",
                                  "golden values",
                                  "structural invariants",
                                  "PLiCA against linear scan",
                                  "unique path property",
                                  "scaling slopes",
                                  "persistence round trip"};
    int failed = 0;
    for (int c = 1; c <= 9; ++c) {
        if (!on(c)) continue;
        const Verdict& v = verdicts[c];
        bool ok = v.ran && v.ok;
        failed += !ok;
        std::printf("criterion %d %s: %s  (%s)\n", c, names[c], ok ? "PASS" : "FAIL", v.detail.c_str());
    }
    std::fflush(stdout);
    return failed ? 1 : 0;
}
