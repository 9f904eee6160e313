#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "qmec/io.hpp"
#include "qmec/oracle.hpp"

using namespace qmec;

namespace {

std::uint64_t default_seed() {
    if (const char* s = std::getenv("QMEC_SEED")) {
        try {
            return std::stoull(s);
        } catch (const std::exception&) {
            std::cerr << "warning: ignoring QMEC_SEED='" << s << "'\n";
        }
    }
    return 1;
}

std::optional<InputKind> flag_kind(const std::string& kind, bool polygon, bool convex) {
    if (convex) return InputKind::ConvexPolygon;
    if (polygon) return InputKind::SimplePolygon;
    if (kind.empty()) return std::nullopt;
    auto k = kind_from_name(kind);
    if (!k) throw Error(ErrorCode::ValidationError, "unknown kind '" + kind + "'");
    return k;
}

InputFormat format_of(const std::string& s) {
    if (s == "csv") return InputFormat::CSV;
    if (s == "json") return InputFormat::JSON;
    return InputFormat::Auto;
}

InputDocument load_checked(const std::string& path, const std::string& fmt, std::optional<InputKind> want) {
    InputDocument d = load_input(path, format_of(fmt));
    if (want && *want != d.kind) {
        // a convex polygon is also a simple one
        if (!(*want == InputKind::SimplePolygon && d.kind == InputKind::ConvexPolygon) &&
            !(*want == InputKind::ConvexPolygon && d.kind == InputKind::SimplePolygon))
            throw Error(ErrorCode::ValidationError,
                        std::string("input holds ") + kind_name(d.kind) + ", not " + kind_name(*want));
        d.kind = *want;
        validate(d);
    }
    return d;
}

std::vector<QueryLine> query_source(const std::string& path, const std::vector<Point>& fallback) {
    if (path.empty() && !fallback.empty()) {
        std::vector<QueryLine> out;
        for (Point q : fallback) out.push_back({0, q, ""});
        return out;
    }
    if (path.empty() || path == "-") return read_query_lines(std::cin);
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::IoError, "cannot read " + path);
    return read_query_lines(in);
}

std::optional<PointsVariant> variant_of(const std::string& s) {
    if (s.empty()) return std::nullopt;
    if (s == "base") return PointsVariant::Base;
    if (s == "gamma") return PointsVariant::Gamma;
    if (s == "rpart") return PointsVariant::Rpart;
    throw Error(ErrorCode::ValidationError, "unknown variant '" + s + "'");
}

std::vector<int> parse_sizes(const std::string& s) {
    std::vector<int> out;
    std::stringstream ss(s);
    std::string tok;
    while (std::getline(ss, tok, ','))
        if (!tok.empty()) out.push_back(std::stoi(tok));
    return out;
}

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string tok;
    while (std::getline(ss, tok, ','))
        if (!tok.empty()) out.push_back(tok);
    return out;
}

void write_text(const std::string& path, const std::string& text) {
    if (path.empty() || path == "-") {
        std::cout << text;
        return;
    }
    std::ofstream out(path);
    if (!out || !(out << text)) throw Error(ErrorCode::IoError, "cannot write " + path);
}

// ---- selftest ----

int selftest(std::uint64_t seed, bool quick) {
    int failed = 0;
    auto report = [&](const std::string& name, bool ok, const std::string& detail = "") {
        std::cout << (ok ? "PASS " : "FAIL ") << name << (detail.empty() ? "" : "  (" + detail + ")") << "\n";
        failed += !ok;
    };
    auto near = [](double a, double b, double tol) { return std::fabs(a - b) <= tol; };

    {
        auto idx = PointsIndex::build({{0, 0}, {1, 0}, {0, 1}, {1, 1}});
        QueryResult r = idx.query({0.5, 0.5});
        report("square sites, centre", r.bounded && near(r.circle.radius, std::sqrt(0.5), 1e-9));
        report("square sites, far point is unbounded", !idx.query({10, 10}).bounded);
    }
    {
        auto idx = PolygonIndex::build({{0, 0}, {1, 0}, {1, 1}, {0, 1}});
        Circle c = idx.query({0.1, 0.1});
        report("square polygon near a corner", near(c.radius, 0.1 * (2 + std::sqrt(2.0)), 1e-9));
    }
    {
        const double h = std::sqrt(3.0) / 2;
        auto idx = PointsIndex::build({{0, 0}, {1, 0}, {0.5, h}});
        QueryResult r = idx.query({0.5, h / 3});
        report("equilateral sites, centroid", r.bounded && near(r.circle.radius, 1 / std::sqrt(3.0), 1e-9));
    }

    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> U(0, 1);
    const int trials = quick ? 2 : 6;
    {
        int bad = 0, total = 0;
        for (int t = 0; t < trials; ++t) {
            std::vector<Point> s;
            for (int i = 0; i < 40; ++i) s.push_back({U(rng), U(rng)});
            PointsOptions po;
            po.gamma = po.rpart = true;
            po.seed = seed + t;
            auto idx = PointsIndex::build(s, po);
            PointsOracle orc(s);
            for (int k = 0; k < 50; ++k) {
                Point q{U(rng), U(rng)};
                QueryResult want = orc.query(q).result;
                for (const QueryResult& got : {idx.query(q), idx.gamma_query(q), idx.rpart_query(q)}) {
                    ++total;
                    bool ok = got.bounded == want.bounded &&
                              (!want.bounded ||
                               near(got.circle.radius, want.circle.radius, 1e-6 * std::max(1.0, want.circle.radius)));
                    bad += !ok;
                }
            }
        }
        report("random point sets against brute force", bad == 0,
               std::to_string(total - bad) + "/" + std::to_string(total));
    }
    {
        int bad = 0, total = 0;
        for (int t = 0; t < trials; ++t) {
            // star-shaped around the origin, hence simple
            const int n = 24;
            std::vector<Point> poly;
            for (int i = 0; i < n; ++i) {
                double a = 2 * M_PI * (i + 0.8 * U(rng)) / n, r = 0.4 + 0.6 * U(rng);
                poly.push_back({r * std::cos(a), r * std::sin(a)});
            }
            auto idx = PolygonIndex::build(poly);
            PolygonOracle orc(poly);
            for (int k = 0; k < 50; ++k) {
                Point q{0.4 * (2 * U(rng) - 1), 0.4 * (2 * U(rng) - 1)};
                double want;
                try {
                    want = orc.query(q).result.circle.radius;
                } catch (const Error&) {
                    continue;
                }
                ++total;
                bad += !near(idx.query(q).radius, want, 1e-5 * std::max(1.0, want));
            }
        }
        report("random polygons against brute force", bad == 0,
               std::to_string(total - bad) + "/" + std::to_string(total));
    }
    {
        InputDocument d;
        for (int i = 0; i < 60; ++i) d.points.push_back({U(rng), U(rng)});
        BuildOptions bo;
        bo.gamma = bo.rpart = true;
        bo.seed = seed;
        AnyIndex a = AnyIndex::build(d, bo);
        std::stringstream buf;
        a.save(buf);
        AnyIndex b = AnyIndex::load(buf);
        bool same = true;
        for (int k = 0; k < 100 && same; ++k) {
            Point q{U(rng), U(rng)};
            for (auto v : {PointsVariant::Base, PointsVariant::Gamma, PointsVariant::Rpart})
                same &= a.query_json(q, v) == b.query_json(q, v);
        }
        report("save and load give identical answers", same);
    }
    std::cout << (failed ? "selftest: " + std::to_string(failed) + " failed\n" : std::string("selftest: all passed\n"));
    return failed ? 1 : 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Largest empty circle containing a query point: index building and queries"};
    app.require_subcommand(1);
    const std::uint64_t env_seed = default_seed();

    // build
    auto* b = app.add_subcommand("build", "Build an index from a CSV or JSON input");
    std::string b_in, b_out, b_fmt, b_kind;
    bool b_poly = false, b_convex = false, b_gamma = false, b_stats = false, b_strict = false;
    int b_r = 0;
    std::uint64_t b_seed = env_seed;
    b->add_option("input", b_in, "input file")->required();
    b->add_option("-o,--out", b_out, "index file to write");
    b->add_option("--format", b_fmt, "csv or json (default: by extension)");
    b->add_option("--kind", b_kind, "points, polygon, convex or circles");
    b->add_flag("--polygon", b_poly, "input must be a simple polygon");
    b->add_flag("--convex", b_convex, "input must be a convex polygon");
    b->add_flag("--gamma", b_gamma, "also build the level-indexed variant");
    auto* b_rpart = b->add_option("--rpart", b_r, "also build the r-partition variant (optional r)")->expected(0, 1);
    b->add_flag("--stats", b_stats, "print build statistics as JSON");
    b->add_flag("--strict", b_strict, "reject clockwise polygons and clearance minima at axis nodes");
    b->add_option("--seed", b_seed, "RNG seed (default: QMEC_SEED or 1)");

    // query
    auto* q = app.add_subcommand("query", "Answer queries from a file or stdin, one JSON object per line");
    std::string q_idx, q_file, q_variant;
    int q_threads = 1;
    q->add_option("index", q_idx, "index file")->required();
    q->add_option("queries", q_file, "query file, one x,y per line (default: stdin)");
    q->add_option("--variant", q_variant, "base, gamma or rpart (default: the strongest built)");
    q->add_option("-j,--threads", q_threads, "worker threads");

    // oracle
    auto* o = app.add_subcommand("oracle", "Answer queries by brute force");
    std::string o_in, o_file, o_fmt, o_kind;
    bool o_poly = false, o_convex = false, o_witness = false;
    o->add_option("input", o_in, "input file")->required();
    o->add_option("queries", o_file, "query file (default: the input's queries, else stdin)");
    o->add_option("--format", o_fmt, "csv or json");
    o->add_option("--kind", o_kind, "points, polygon, convex or circles");
    o->add_flag("--polygon", o_poly, "input must be a simple polygon");
    o->add_flag("--convex", o_convex, "input must be a convex polygon");
    o->add_flag("--witness", o_witness, "include the defining sites or boundary features");

    // bench
    auto* be = app.add_subcommand("bench", "Time builds and queries over random point sets, CSV out");
    std::string be_structs = "base,gamma,rpart", be_sizes, be_out;
    int be_min = 10, be_max = 12, be_reps = 1, be_queries = 200, be_naive = 2048;
    std::uint64_t be_seed = env_seed;
    be->add_option("--structures", be_structs, "comma list of base, gamma, rpart, naive");
    be->add_option("--sizes", be_sizes, "comma list of n (overrides --min-exp/--max-exp)");
    be->add_option("--min-exp", be_min, "smallest n = 2^k");
    be->add_option("--max-exp", be_max, "largest n = 2^k");
    be->add_option("--reps", be_reps, "repetitions per size");
    be->add_option("--queries", be_queries, "queries per build");
    be->add_option("--naive-limit", be_naive, "largest n for the naive baseline");
    be->add_option("--seed", be_seed, "RNG seed (default: QMEC_SEED or 1)");
    be->add_option("-o,--out", be_out, "CSV file (default: stdout)");

    // svg
    auto* sv = app.add_subcommand("svg", "Render an index, optionally with one query");
    std::string sv_idx, sv_out, sv_q;
    int sv_width = 800;
    sv->add_option("index", sv_idx, "index file")->required();
    sv->add_option("--query", sv_q, "x,y");
    sv->add_option("-o,--out", sv_out, "SVG file (default: stdout)");
    sv->add_option("--width", sv_width, "pixels");

    // selftest
    auto* st = app.add_subcommand("selftest", "Golden values, brute-force agreement and a save/load round trip");
    bool st_quick = false;
    std::uint64_t st_seed = env_seed;
    st->add_flag("--quick", st_quick, "fewer random trials");
    st->add_option("--seed", st_seed, "RNG seed (default: QMEC_SEED or 1)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*b) {
            InputDocument d;
            try {
                d = load_checked(b_in, b_fmt, flag_kind(b_kind, b_poly, b_convex));
            } catch (const Error& e) {
                throw Error(e.code(), b_in + ": " + e.what());
            }
            BuildOptions bo;
            bo.gamma = b_gamma;
            bo.rpart = b_rpart->count() > 0;
            bo.rpart_r = b_r;
            bo.seed = b_seed;
            bo.strict = b_strict;
            AnyIndex idx;
            try {
                idx = AnyIndex::build(d, bo);
            } catch (const Error& e) {
                throw Error(e.code(), b_in + ": " + e.what());
            }
            if (!b_out.empty()) idx.save_file(b_out);
            if (b_stats || b_out.empty()) std::cout << idx.stats_json() << "\n";
            return 0;
        }
        if (*q) {
            AnyIndex idx = AnyIndex::load_file(q_idx);
            auto lines = query_source(q_file, {});
            int errors = run_queries(idx, lines, variant_of(q_variant), q_threads, std::cout);
            return errors ? 1 : 0;
        }
        if (*o) {
            InputDocument d = load_checked(o_in, o_fmt, flag_kind(o_kind, o_poly, o_convex));
            auto lines = query_source(o_file, d.queries);
            std::unique_ptr<PointsOracle> po;
            std::unique_ptr<PolygonOracle> pg;
            if (d.kind == InputKind::Points) po = std::make_unique<PointsOracle>(d.points);
            if (d.kind == InputKind::SimplePolygon || d.kind == InputKind::ConvexPolygon)
                pg = std::make_unique<PolygonOracle>(d.points);
            int errors = 0;
            for (const QueryLine& l : lines) {
                std::string s;
                if (!l.q) {
                    s = error_json(ErrorCode::ParseError);
                } else {
                    try {
                        if (d.kind == InputKind::Circles) {
                            auto h = oracle_plica(d.circles, *l.q);
                            nlohmann::ordered_json j;
                            if (h) j["hit"] = *h;
                            else j["hit"] = nullptr;
                            s = j.dump();
                        } else {
                            OracleReport r = po ? po->query(*l.q) : pg->query(*l.q);
                            s = result_json(r.result);
                            if (o_witness) {
                                auto j = nlohmann::ordered_json::parse(s);
                                j["witness"] = r.witness;
                                s = j.dump();
                            }
                        }
                    } catch (const Error& e) {
                        s = error_json(e.code());
                    }
                }
                errors += s.rfind("{\"error\"", 0) == 0;
                std::cout << s << "\n";
            }
            return errors ? 1 : 0;
        }
        if (*be) {
            BenchOptions bo;
            bo.structures = split_list(be_structs);
            if (!be_sizes.empty()) {
                bo.sizes = parse_sizes(be_sizes);
            } else {
                bo.sizes.clear();
                for (int k = be_min; k <= be_max; ++k) bo.sizes.push_back(1 << k);
            }
            bo.repetitions = std::max(0, be_reps);
            bo.queries = be_queries;
            bo.seed = be_seed;
            bo.naive_limit = be_naive;
            std::ostringstream csv;
            csv << bench_csv_header() << "\n";
            for (const BenchRow& r : run_bench(bo)) csv << bench_csv_row(r) << "\n";
            write_text(be_out, csv.str());
            return 0;
        }
        if (*sv) {
            AnyIndex idx = AnyIndex::load_file(sv_idx);
            SvgOptions so;
            so.width = sv_width;
            if (!sv_q.empty()) {
                std::istringstream in(sv_q);
                auto l = read_query_lines(in);
                if (l.size() != 1 || !l[0].q) throw Error(ErrorCode::ParseError, "--query expects x,y");
                so.query = l[0].q;
            }
            write_text(sv_out, render_svg(idx, so));
            return 0;
        }
        if (*st) return selftest(st_seed, st_quick);
    } catch (const Error& e) {
        std::cerr << "error: " << error_name(e.code()) << ": " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
