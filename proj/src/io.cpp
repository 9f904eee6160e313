#include <algorithm>
#include <charconv>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <thread>

#include <cereal/archives/portable_binary.hpp>
#include <cereal/types/string.hpp>
#include <cereal/types/utility.hpp>
#include <cereal/types/vector.hpp>
#include <nlohmann/json.hpp>

#include "qmec/io.hpp"

namespace qmec {

using ojson = nlohmann::ordered_json;

// ---- cereal hooks for plain structs ----

template <class Ar>
void serialize(Ar& ar, Point& p) {
    ar(p.x, p.y);
}
template <class Ar>
void serialize(Ar& ar, Circle& c) {
    ar(c.center, c.radius);
}
template <class Ar>
void serialize(Ar& ar, PointsOptions& o) {
    ar(o.gamma, o.rpart, o.rpart_r, o.seed, o.c_sep);
}
template <class Ar>
void serialize(Ar& ar, QicStats& s) {
    ar(s.entries, s.buckets, s.max_bucket, s.red_ties, s.walks, s.excluded);
}
template <class Ar>
void serialize(Ar& ar, PointsStats& s) {
    ar(s.depth, s.nodes, s.max_sep_ratio, s.max_part_ratio, s.sep_ok, s.qic, s.rpart_qic, s.rpart_r, s.rpart_parts,
       s.rpart_boundary, s.rpart_max_part);
}
template <class Ar>
void serialize(Ar& ar, RPartition& p) {
    ar(p.parts, p.boundary, p.part_of);
}
template <class Ar>
void serialize(Ar& ar, PointsIndex::Node& n) {
    ar(n.verts, n.W, n.A, n.B, n.level, n.left, n.right, n.qic);
}

// ---- names ----

const char* kind_name(InputKind k) {
    switch (k) {
        case InputKind::Points: return "points";
        case InputKind::SimplePolygon: return "polygon";
        case InputKind::ConvexPolygon: return "convex";
        case InputKind::Circles: return "circles";
    }
    return "?";
}

std::optional<InputKind> kind_from_name(std::string_view s) {
    for (InputKind k : {InputKind::Points, InputKind::SimplePolygon, InputKind::ConvexPolygon, InputKind::Circles})
        if (s == kind_name(k)) return k;
    if (s == "simple_polygon") return InputKind::SimplePolygon;
    if (s == "convex_polygon") return InputKind::ConvexPolygon;
    return std::nullopt;
}

// ---- checksums (FNV-1a over the raw bits) ----

namespace {

struct Fnv {
    std::uint64_t h = 1469598103934665603ull;
    void bytes(const void* p, std::size_t n) {
        auto* c = static_cast<const unsigned char*>(p);
        for (std::size_t i = 0; i < n; ++i) h = (h ^ c[i]) * 1099511628211ull;
    }
    void num(double x) {
        std::uint64_t u;
        std::memcpy(&u, &x, 8);
        for (int i = 0; i < 8; ++i) {
            unsigned char b = (u >> (8 * i)) & 0xff;
            bytes(&b, 1);
        }
    }
};

std::string hex(std::uint64_t x) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(x));
    return buf;
}

}  // namespace

std::uint64_t checksum_of(const std::vector<Point>& pts) {
    Fnv f;
    for (Point p : pts) f.num(p.x), f.num(p.y);
    return f.h;
}

std::uint64_t checksum_of(const std::vector<Circle>& cs) {
    Fnv f;
    for (const Circle& c : cs) f.num(c.center.x), f.num(c.center.y), f.num(c.radius);
    return f.h;
}

// ---- parsing ----

namespace {

[[noreturn]] void parse_fail(int line, int col, const std::string& why) {
    throw Error(ErrorCode::ParseError, "line " + std::to_string(line) + ", column " + std::to_string(col) + ": " + why);
}

bool read_number(std::string_view s, std::size_t& i, double& out) {
    while (i < s.size() && (s[i] == ' ' || s[i] == '\t')) ++i;
    const char* b = s.data() + i;
    // from_chars rejects a leading '+'
    if (i < s.size() && s[i] == '+') ++b;
    auto [p, ec] = std::from_chars(b, s.data() + s.size(), out);
    if (ec != std::errc() || p == b) return false;
    i = std::size_t(p - s.data());
    return true;
}

// "x,y", "x y" or "x, y"; nullopt with the failing column otherwise
std::optional<Point> parse_pair(std::string_view s, int* bad_col) {
    std::size_t i = 0;
    double x, y;
    if (!read_number(s, i, x)) {
        *bad_col = int(i) + 1;
        return std::nullopt;
    }
    while (i < s.size() && (s[i] == ' ' || s[i] == '\t')) ++i;
    if (i < s.size() && s[i] == ',') ++i;
    if (!read_number(s, i, y)) {
        *bad_col = int(i) + 1;
        return std::nullopt;
    }
    while (i < s.size() && (s[i] == ' ' || s[i] == '\t' || s[i] == '\r')) ++i;
    if (i != s.size()) {
        *bad_col = int(i) + 1;
        return std::nullopt;
    }
    return Point{x, y};
}

std::string_view strip_comment(std::string_view s) {
    if (auto h = s.find('#'); h != std::string_view::npos) s = s.substr(0, h);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    std::size_t a = 0;
    while (a < s.size() && (s[a] == ' ' || s[a] == '\t')) ++a;
    return s.substr(a);
}

InputDocument parse_csv(std::string_view text) {
    InputDocument d;
    int line = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        std::size_t nl = text.find('\n', pos);
        std::string_view raw = text.substr(pos, nl == std::string_view::npos ? text.size() - pos : nl - pos);
        ++line;
        std::string_view s = strip_comment(raw);
        if (!s.empty()) {
            int col = 0;
            auto p = parse_pair(s, &col);
            if (!p) parse_fail(line, col + int(s.data() - raw.data()), "expected x,y");
            d.points.push_back(*p);
        }
        if (nl == std::string_view::npos) break;
        pos = nl + 1;
    }
    if (d.points.empty()) parse_fail(line, 1, "no points");
    d.kind = InputKind::Points;
    return d;
}

std::vector<Point> json_points(const nlohmann::json& a, const char* what) {
    if (!a.is_array()) throw Error(ErrorCode::ParseError, std::string(what) + " must be an array");
    std::vector<Point> out;
    for (const auto& e : a) {
        if (!e.is_array() || e.size() != 2 || !e[0].is_number() || !e[1].is_number())
            throw Error(ErrorCode::ParseError, std::string(what) + " entries must be [x, y]");
        out.push_back({e[0].get<double>(), e[1].get<double>()});
    }
    return out;
}

InputDocument parse_json(std::string_view text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        // byte offset to line and column
        std::size_t at = std::min<std::size_t>(e.byte ? e.byte - 1 : 0, text.size());
        int line = 1, col = 1;
        for (std::size_t i = 0; i < at; ++i) {
            if (text[i] == '\n') ++line, col = 1;
            else ++col;
        }
        parse_fail(line, col, "malformed JSON");
    }
    if (!j.is_object()) throw Error(ErrorCode::ParseError, "top level must be an object");
    InputDocument d;
    std::string k = j.value("kind", std::string("points"));
    auto kind = kind_from_name(k);
    if (!kind) throw Error(ErrorCode::ParseError, "unknown kind '" + k + "'");
    d.kind = *kind;
    if (j.contains("name") && j["name"].is_string()) d.name = j["name"].get<std::string>();
    if (d.kind == InputKind::Circles) {
        if (!j.contains("circles") || !j["circles"].is_array()) throw Error(ErrorCode::ParseError, "missing circles");
        for (const auto& e : j["circles"]) {
            if (!e.is_array() || e.size() != 3) throw Error(ErrorCode::ParseError, "circles entries must be [x, y, r]");
            for (const auto& v : e)
                if (!v.is_number()) throw Error(ErrorCode::ParseError, "circles entries must be numbers");
            d.circles.push_back({{e[0].get<double>(), e[1].get<double>()}, e[2].get<double>()});
        }
    } else {
        if (!j.contains("points")) throw Error(ErrorCode::ParseError, "missing points");
        d.points = json_points(j["points"], "points");
    }
    if (j.contains("queries")) d.queries = json_points(j["queries"], "queries");
    return d;
}

}  // namespace

void validate(const InputDocument& d) {
    auto bad = [](const std::string& why) { throw Error(ErrorCode::ValidationError, why); };
    for (Point p : d.points)
        if (!finite(p)) bad("non-finite coordinate");
    for (Point p : d.queries)
        if (!finite(p)) bad("non-finite query coordinate");
    switch (d.kind) {
        case InputKind::Points: {
            if (d.points.size() < 3) bad("need at least 3 sites");
            std::vector<Point> s = d.points;
            std::sort(s.begin(), s.end(), lex_less);
            if (std::adjacent_find(s.begin(), s.end()) != s.end()) bad("duplicate sites");
            bool flat = true;
            for (std::size_t i = 2; i < d.points.size() && flat; ++i)
                flat = orient_sign(d.points[0], d.points[1], d.points[i]) == 0;
            if (flat) bad("all sites collinear");
            break;
        }
        case InputKind::SimplePolygon:
        case InputKind::ConvexPolygon: {
            CheckedPolygon cp;
            try {
                cp = check_polygon(d.points);
            } catch (const Error& e) {
                if (e.code() == ErrorCode::NotSimple) bad("not simple");
                bad(e.what());
            }
            if (d.kind == InputKind::ConvexPolygon && !is_convex_ccw(cp.pts)) bad("not convex");
            break;
        }
        case InputKind::Circles:
            if (d.circles.empty()) bad("no circles");
            for (const Circle& c : d.circles)
                if (!finite(c.center) || !std::isfinite(c.radius) || c.radius <= 0) bad("bad circle");
            break;
    }
}

InputDocument parse_input(std::string_view text, InputFormat fmt, const std::string& name) {
    std::size_t a = text.find_first_not_of(" \t\r\n");
    if (a == std::string_view::npos) throw Error(ErrorCode::ParseError, "line 1, column 1: empty input");
    if (fmt == InputFormat::Auto) fmt = text[a] == '{' ? InputFormat::JSON : InputFormat::CSV;
    InputDocument d = fmt == InputFormat::JSON ? parse_json(text) : parse_csv(text);
    if (d.name.empty()) d.name = name;
    validate(d);
    d.checksum = d.kind == InputKind::Circles ? checksum_of(d.circles) : checksum_of(d.points);
    return d;
}

InputDocument load_input(const std::string& path, InputFormat fmt) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::IoError, "cannot read " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    if (fmt == InputFormat::Auto) {
        auto dot = path.rfind('.');
        std::string ext = dot == std::string::npos ? "" : path.substr(dot + 1);
        if (ext == "json") fmt = InputFormat::JSON;
        else if (ext == "csv") fmt = InputFormat::CSV;
    }
    std::string name = path.substr(path.find_last_of('/') + 1);
    return parse_input(ss.str(), fmt, name);
}

std::vector<QueryLine> read_query_lines(std::istream& in) {
    std::vector<QueryLine> out;
    std::string raw;
    int line = 0;
    while (std::getline(in, raw)) {
        ++line;
        std::string_view s = strip_comment(raw);
        if (s.empty()) continue;
        int col = 0;
        out.push_back({line, parse_pair(s, &col), std::string(s)});
    }
    return out;
}

// ---- output ----

std::string format_double(double x) {
    char buf[64];
    auto [p, ec] = std::to_chars(buf, buf + sizeof buf, x);
    return ec == std::errc() ? std::string(buf, p) : "nan";
}

std::string circle_json(const Circle& c) {
    ojson j;
    j["cx"] = c.center.x;
    j["cy"] = c.center.y;
    j["r"] = c.radius;
    return j.dump();
}

std::string result_json(const QueryResult& r) {
    if (r.bounded) return circle_json(r.circle);
    ojson j;
    j["unbounded"] = true;
    j["dir"] = {r.direction.x, r.direction.y};
    return j.dump();
}

std::string error_json(ErrorCode c) {
    ojson j;
    j["error"] = error_name(c);
    return j.dump();
}

// ---- AnyIndex ----

AnyIndex AnyIndex::build(const InputDocument& doc, const BuildOptions& opt) {
    AnyIndex I;
    I.kind_ = doc.kind;
    I.opt_ = opt;
    I.checksum_ = doc.checksum ? doc.checksum
                               : (doc.kind == InputKind::Circles ? checksum_of(doc.circles) : checksum_of(doc.points));
    I.name_ = doc.name;
    if ((opt.gamma || opt.rpart) && doc.kind != InputKind::Points)
        throw Error(ErrorCode::ValidationError, "--gamma and --rpart apply to point sets only");
    switch (doc.kind) {
        case InputKind::Points: {
            PointsOptions po;
            po.gamma = opt.gamma;
            po.rpart = opt.rpart;
            po.rpart_r = opt.rpart_r;
            po.seed = opt.seed;
            I.pts_ = std::make_shared<const PointsIndex>(PointsIndex::build(doc.points, po));
            break;
        }
        case InputKind::SimplePolygon: {
            MedialOptions mo;
            mo.strict = opt.strict;
            I.source_ = doc.points;
            I.poly_ = std::make_shared<const PolygonIndex>(PolygonIndex::build(doc.points, mo));
            break;
        }
        case InputKind::ConvexPolygon:
            I.source_ = doc.points;
            I.convex_ = std::make_shared<const ConvexIndex>(ConvexIndex::build(doc.points));
            break;
        case InputKind::Circles:
            I.plica_ = std::make_shared<const PlicaIndex>(PlicaIndex::build(doc.circles, opt.seed));
            break;
    }
    return I;
}

PointsVariant AnyIndex::default_variant() const {
    if (pts_ && pts_->has_rpart()) return PointsVariant::Rpart;
    if (pts_ && pts_->has_gamma()) return PointsVariant::Gamma;
    return PointsVariant::Base;
}

std::string AnyIndex::query_json(Point q, std::optional<PointsVariant> v) const {
    try {
        if (!finite(q)) throw Error(ErrorCode::ValidationError, "query point is not finite");
        switch (kind_) {
            case InputKind::Points:
                switch (v.value_or(default_variant())) {
                    case PointsVariant::Base: return result_json(pts_->query(q));
                    case PointsVariant::Gamma: return result_json(pts_->gamma_query(q));
                    case PointsVariant::Rpart: return result_json(pts_->rpart_query(q));
                }
                break;
            case InputKind::SimplePolygon: return circle_json(poly_->query(q));
            case InputKind::ConvexPolygon: return circle_json(convex_->query(q));
            case InputKind::Circles: {
                ojson j;
                auto h = plica_->query(q);
                if (h) j["hit"] = *h;
                else j["hit"] = nullptr;
                return j.dump();
            }
        }
        throw Error(ErrorCode::InternalError, "unknown index kind");
    } catch (const Error& e) {
        return error_json(e.code());
    } catch (const std::exception&) {
        return error_json(ErrorCode::InternalError);
    }
}

std::string AnyIndex::stats_json() const {
    ojson j;
    j["kind"] = kind_name(kind_);
    j["checksum"] = hex(checksum_);
    j["bytes"] = memory_bytes();
    if (pts_) {
        const PointsIndex& p = *pts_;
        const PointsStats& s = p.stats();
        j["sites"] = p.sites().size();
        j["voronoi_vertices"] = p.graph().num_voronoi();
        j["graph_vertices"] = p.graph().vertices().size();
        j["separator"] = {{"depth", s.depth},
                          {"nodes", s.nodes},
                          {"max_sep_ratio", s.max_sep_ratio},
                          {"max_part_ratio", s.max_part_ratio},
                          {"ok", s.sep_ok}};
        j["qic"] = {{"entries", s.qic.entries}, {"buckets", s.qic.buckets}, {"max_bucket", s.qic.max_bucket}};
        j["base_bytes"] = p.base_bytes();
        if (p.has_gamma()) j["gamma"] = {{"levels", s.depth}, {"bytes", p.gamma_bytes()}};
        if (p.has_rpart()) {
            const double n = double(p.graph().vertices().size());
            j["rpart"] = {{"r", s.rpart_r},
                          {"parts", s.rpart_parts},
                          {"boundary", s.rpart_boundary},
                          {"max_part", s.rpart_max_part},
                          {"boundary_ratio", s.rpart_boundary / (n / std::sqrt(double(s.rpart_r)))},
                          {"qic_entries", s.rpart_qic.entries},
                          {"max_bucket", s.rpart_qic.max_bucket},
                          {"bytes", p.rpart_bytes()}};
        }
    } else if (poly_) {
        const PolygonStats& s = poly_->stats();
        j["vertices"] = poly_->axis().polygon().pts.size();
        j["axis"] = {{"nodes", s.nodes}, {"internal", s.internal}, {"edges", s.edges}};
        j["landscape"] = {{"valleys", s.valleys},
                          {"peaks", s.peaks},
                          {"node_minima", s.node_minima},
                          {"mountains", s.mountains}};
        j["centroid_depth"] = s.centroid_depth;
        j["qic"] = {{"sets", s.qic.sets}, {"entries", s.qic.entries}, {"max_bucket", s.qic.max_bucket}};
    } else if (convex_) {
        j["vertices"] = convex_->axis().polygon().pts.size();
        j["axis"] = {{"nodes", convex_->axis().nodes().size()}, {"edges", convex_->axis().edges().size()}};
        j["faces"] = convex_->num_faces();
    } else if (plica_) {
        j["circles"] = plica_->size();
        j["trapezoids"] = plica_->uses_trapezoids();
    }
    return j.dump();
}

std::size_t AnyIndex::memory_bytes() const {
    if (pts_) return pts_->memory_bytes();
    if (poly_) return poly_->memory_bytes();
    if (convex_) return convex_->memory_bytes();
    if (plica_) return plica_->memory_bytes();
    return 0;
}

// ---- persistence ----
//
// QMEC1\n
// {header JSON}\n
// payload (portable binary, payload_bytes long)

void PointsIO::save(const PointsIndex& idx, std::ostream& out) {
    cereal::PortableBinaryOutputArchive ar(out);
    std::vector<Point> sites = idx.sites();
    PointsOptions opt = idx.opt_;
    PointsStats stats = idx.stats_;
    ar(sites, opt, stats, idx.nodes_, idx.has_rpart_, idx.rp_, idx.upsilon_qic_, idx.part_qic_);
}

PointsIndex PointsIO::load(std::istream& in) {
    cereal::PortableBinaryInputArchive ar(in);
    std::vector<Point> sites;
    PointsIndex I;
    ar(sites, I.opt_, I.stats_, I.nodes_, I.has_rpart_, I.rp_, I.upsilon_qic_, I.part_qic_);
    I.g_ = std::make_shared<VoronoiGraph>(VoronoiGraph::build(sites, I.opt_.seed));
    I.frames_ = edge_frames(*I.g_);
    const int nv = int(I.g_->vertices().size());
    for (const auto& n : I.nodes_) {
        for (const auto* list : {&n.verts, &n.W, &n.A, &n.B})
            for (int v : *list)
                if (v < 0 || v >= nv) throw Error(ErrorCode::ParseError, "index does not match its sites");
        if (n.left >= int(I.nodes_.size()) || n.right >= int(I.nodes_.size()))
            throw Error(ErrorCode::ParseError, "broken separator tree");
    }
    I.attach_locators();
    return I;
}

void AnyIndex::save(std::ostream& out) const {
    std::ostringstream body(std::ios::binary);
    {
        cereal::PortableBinaryOutputArchive ar(body);
        switch (kind_) {
            case InputKind::Points: break;
            case InputKind::SimplePolygon:
            case InputKind::ConvexPolygon: ar(source_); break;
            case InputKind::Circles: {
                std::vector<Circle> cs = plica_->circles();
                ar(cs);
                break;
            }
        }
    }
    if (pts_) PointsIO::save(*pts_, body);
    const std::string payload = body.str();
    Fnv f;
    f.bytes(payload.data(), payload.size());

    ojson h;
    h["format"] = "QMEC1";
    h["kind"] = kind_name(kind_);
    h["variants"] = {{"gamma", opt_.gamma}, {"rpart", opt_.rpart}, {"rpart_r", opt_.rpart_r}};
    h["seed"] = opt_.seed;
    h["strict"] = opt_.strict;
    h["name"] = name_;
    h["source_checksum"] = hex(checksum_);
    h["payload_bytes"] = payload.size();
    h["payload_checksum"] = hex(f.h);
    out << "QMEC1\n" << h.dump() << "\n";
    out.write(payload.data(), std::streamsize(payload.size()));
    if (!out) throw Error(ErrorCode::IoError, "write failed");
}

AnyIndex AnyIndex::load(std::istream& in) {
    std::string magic, header;
    if (!std::getline(in, magic) || magic != "QMEC1") throw Error(ErrorCode::ParseError, "not a QMEC1 index file");
    if (!std::getline(in, header)) throw Error(ErrorCode::ParseError, "missing index header");
    nlohmann::json h;
    AnyIndex I;
    std::size_t nbytes;
    std::string sum;
    try {
        h = nlohmann::json::parse(header);
        auto kind = kind_from_name(h.at("kind").get<std::string>());
        if (!kind) throw Error(ErrorCode::ParseError, "unknown index kind");
        I.kind_ = *kind;
        I.opt_.gamma = h.at("variants").at("gamma").get<bool>();
        I.opt_.rpart = h.at("variants").at("rpart").get<bool>();
        I.opt_.rpart_r = h.at("variants").at("rpart_r").get<int>();
        I.opt_.seed = h.at("seed").get<std::uint64_t>();
        I.opt_.strict = h.at("strict").get<bool>();
        I.name_ = h.at("name").get<std::string>();
        I.checksum_ = std::stoull(h.at("source_checksum").get<std::string>(), nullptr, 16);
        nbytes = h.at("payload_bytes").get<std::size_t>();
        sum = h.at("payload_checksum").get<std::string>();
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::ParseError, std::string("bad index header: ") + e.what());
    } catch (const std::logic_error&) {
        throw Error(ErrorCode::ParseError, "bad index header");
    }
    std::string payload(nbytes, '\0');
    in.read(payload.data(), std::streamsize(nbytes));
    if (std::size_t(in.gcount()) != nbytes) throw Error(ErrorCode::ParseError, "index payload truncated");
    Fnv f;
    f.bytes(payload.data(), payload.size());
    if (hex(f.h) != sum) throw Error(ErrorCode::ParseError, "index payload checksum mismatch");

    std::istringstream body(payload, std::ios::binary);
    try {
        std::vector<Point> src;
        std::vector<Circle> cs;
        {
            cereal::PortableBinaryInputArchive ar(body);
            if (I.kind_ == InputKind::SimplePolygon || I.kind_ == InputKind::ConvexPolygon) ar(src);
            if (I.kind_ == InputKind::Circles) ar(cs);
        }
        switch (I.kind_) {
            case InputKind::Points:
                I.pts_ = std::make_shared<const PointsIndex>(PointsIO::load(body));
                if (checksum_of(I.pts_->sites()) != I.checksum_)
                    throw Error(ErrorCode::ParseError, "sites do not match the source checksum");
                break;
            case InputKind::SimplePolygon:
            case InputKind::ConvexPolygon: {
                if (checksum_of(src) != I.checksum_)
                    throw Error(ErrorCode::ParseError, "polygon does not match the source checksum");
                InputDocument d;
                d.kind = I.kind_;
                d.points = std::move(src);
                d.checksum = I.checksum_;
                d.name = I.name_;
                I = build(d, I.opt_);
                break;
            }
            case InputKind::Circles:
                if (checksum_of(cs) != I.checksum_)
                    throw Error(ErrorCode::ParseError, "circles do not match the source checksum");
                I.plica_ = std::make_shared<const PlicaIndex>(PlicaIndex::build(cs, I.opt_.seed));
                break;
        }
    } catch (const cereal::Exception& e) {
        throw Error(ErrorCode::ParseError, std::string("corrupt index payload: ") + e.what());
    } catch (const std::bad_alloc&) {
        throw Error(ErrorCode::ParseError, "corrupt index payload");
    } catch (const std::length_error&) {
        throw Error(ErrorCode::ParseError, "corrupt index payload");
    }
    return I;
}

void AnyIndex::save_file(const std::string& path) const {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(ErrorCode::IoError, "cannot write " + path);
    save(out);
}

AnyIndex AnyIndex::load_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::IoError, "cannot read " + path);
    return load(in);
}

// ---- batch queries ----

int run_queries(const AnyIndex& idx, const std::vector<QueryLine>& lines, std::optional<PointsVariant> v, int threads,
                std::ostream& out) {
    std::vector<std::string> res(lines.size());
    auto work = [&](std::size_t lo, std::size_t hi) {
        for (std::size_t i = lo; i < hi; ++i)
            res[i] = lines[i].q ? idx.query_json(*lines[i].q, v) : error_json(ErrorCode::ParseError);
    };
    threads = std::max(1, std::min<int>(threads, int(lines.size())));
    if (threads == 1) {
        work(0, lines.size());
    } else {
        std::vector<std::thread> pool;
        std::size_t step = (lines.size() + threads - 1) / threads;
        for (int t = 0; t < threads; ++t) {
            std::size_t lo = std::min(lines.size(), t * step), hi = std::min(lines.size(), lo + step);
            pool.emplace_back(work, lo, hi);
        }
        for (auto& th : pool) th.join();
    }
    int errors = 0;
    for (const std::string& s : res) {
        errors += s.rfind("{\"error\"", 0) == 0;
        out << s << '\n';
    }
    return errors;
}

}  // namespace qmec
