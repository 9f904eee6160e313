#pragma once

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "qmec/geom.hpp"
#include "qmec/medial_axis.hpp"
#include "qmec/plica.hpp"
#include "qmec/points.hpp"
#include "qmec/polygon.hpp"

namespace qmec {

enum class InputKind { Points, SimplePolygon, ConvexPolygon, Circles };
enum class InputFormat { Auto, CSV, JSON };

const char* kind_name(InputKind k);
std::optional<InputKind> kind_from_name(std::string_view s);

struct InputDocument {
    InputKind kind = InputKind::Points;
    std::vector<Point> points;    // sites or polygon vertices
    std::vector<Circle> circles;  // Circles documents only
    std::vector<Point> queries;   // optional
    std::string name;
    std::uint64_t checksum = 0;
};

// CSV: one "x,y" per line (points only; '#' starts a comment).
// JSON: {"kind": "points"|"polygon"|"convex"|"circles", "points": [[x,y],...],
//        "circles": [[x,y,r],...], "queries": [[x,y],...], "name": ...}
// Throws ParseError (message carries line and column) or ValidationError.
InputDocument parse_input(std::string_view text, InputFormat fmt, const std::string& name = "");
InputDocument load_input(const std::string& path, InputFormat fmt = InputFormat::Auto);
// ValidationError unless the document's payload suits `kind`
void validate(const InputDocument& doc);

std::uint64_t checksum_of(const std::vector<Point>& pts);
std::uint64_t checksum_of(const std::vector<Circle>& cs);

// Query lines: "x,y" (or whitespace separated). Blank and '#' lines are skipped.
struct QueryLine {
    int line = 0;
    std::optional<Point> q;  // empty when malformed
    std::string text;
};
std::vector<QueryLine> read_query_lines(std::istream& in);

enum class PointsVariant { Base, Gamma, Rpart };

struct BuildOptions {
    bool gamma = false;
    bool rpart = false;
    int rpart_r = 0;
    std::uint64_t seed = 1;
    bool strict = false;  // polygons
};

// Any built structure, plus what it was built from.
class AnyIndex {
public:
    static AnyIndex build(const InputDocument& doc, const BuildOptions& opt = {});

    InputKind kind() const { return kind_; }
    const BuildOptions& options() const { return opt_; }
    std::uint64_t source_checksum() const { return checksum_; }
    const std::string& name() const { return name_; }

    const PointsIndex* points() const { return pts_.get(); }
    const PolygonIndex* polygon() const { return poly_.get(); }
    const ConvexIndex* convex() const { return convex_.get(); }
    const PlicaIndex* circles() const { return plica_.get(); }

    // strongest variant that was built
    PointsVariant default_variant() const;
    // one JSON object, no trailing newline; errors become {"error": name}
    std::string query_json(Point q, std::optional<PointsVariant> v = std::nullopt) const;
    // statistics as a JSON object
    std::string stats_json() const;
    std::size_t memory_bytes() const;

    void save(std::ostream& out) const;
    static AnyIndex load(std::istream& in);
    void save_file(const std::string& path) const;
    static AnyIndex load_file(const std::string& path);

private:
    InputKind kind_ = InputKind::Points;
    BuildOptions opt_;
    std::uint64_t checksum_ = 0;
    std::string name_;
    std::vector<Point> source_;  // polygon input as given
    std::shared_ptr<const PointsIndex> pts_;
    std::shared_ptr<const PolygonIndex> poly_;
    std::shared_ptr<const ConvexIndex> convex_;
    std::shared_ptr<const PlicaIndex> plica_;
};

// Shortest decimal text that reads back to the same double.
std::string format_double(double x);
std::string result_json(const QueryResult& r);
std::string circle_json(const Circle& c);
std::string error_json(ErrorCode c);

// Answers queries on `threads` workers; output order follows input order.
// Returns the number of error lines.
int run_queries(const AnyIndex& idx, const std::vector<QueryLine>& lines, std::optional<PointsVariant> v,
                int threads, std::ostream& out);

// Points save/load of the separator tree and guiding tables. The Voronoi
// graph and PLiCA structures are rebuilt from the sites with the stored seed.
struct PointsIO {
    static void save(const PointsIndex& idx, std::ostream& out);
    static PointsIndex load(std::istream& in);
};

// ---- SVG ----

struct SvgOptions {
    std::optional<Point> query;
    int width = 800;
};
std::string render_svg(const AnyIndex& idx, const SvgOptions& opt = {});

// ---- benchmarks ----

struct BenchOptions {
    std::vector<std::string> structures{"base", "gamma", "rpart"};
    std::vector<int> sizes{1024, 2048, 4096};
    int repetitions = 1;
    int queries = 200;
    std::uint64_t seed = 1;
    int naive_limit = 2048;  // the per-vertex baseline only runs up to this n
};

struct BenchRow {
    std::string structure;
    int n = 0;
    int rep = 0;
    std::uint64_t seed = 0;
    double build_ms = 0;
    std::size_t index_bytes = 0;
    double mean_query_ns = 0, median_query_ns = 0;
    double mean_probes = 0;
    int max_probes = 0;
};

std::vector<BenchRow> run_bench(const BenchOptions& opt);
std::string bench_csv_header();
std::string bench_csv_row(const BenchRow& r);

// Sites used by the benchmarks: uniform in the unit square, distinct.
std::vector<Point> bench_sites(int n, std::uint64_t seed);

}  // namespace qmec
