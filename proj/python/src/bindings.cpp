#include <fstream>
#include <sstream>

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "qmec/io.hpp"
#include "qmec/oracle.hpp"

namespace py = pybind11;
using namespace qmec;

namespace {

using XY = std::pair<double, double>;

Point pt(const XY& p) { return {p.first, p.second}; }
XY xy(Point p) { return {p.x, p.y}; }

std::vector<Point> pts(const std::vector<XY>& v) {
    std::vector<Point> out;
    out.reserve(v.size());
    for (const XY& p : v) out.push_back(pt(p));
    return out;
}

std::vector<Circle> circles(const std::vector<std::tuple<double, double, double>>& v) {
    std::vector<Circle> out;
    for (auto [x, y, r] : v) out.push_back({{x, y}, r});
    return out;
}

std::optional<PointsVariant> variant_of(const std::optional<std::string>& s) {
    if (!s) return std::nullopt;
    if (*s == "base") return PointsVariant::Base;
    if (*s == "gamma") return PointsVariant::Gamma;
    if (*s == "rpart") return PointsVariant::Rpart;
    throw Error(ErrorCode::ValidationError, "variant must be base, gamma or rpart");
}

InputKind kind_of(const std::string& s) {
    auto k = kind_from_name(s);
    if (!k) throw Error(ErrorCode::ValidationError, "kind must be points, polygon, convex or circles");
    return *k;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Largest empty circle containing a query point";

    static py::exception<Error> exc(m, "QmecError");
    py::register_exception_translator([](std::exception_ptr p) {
        try {
            if (p) std::rethrow_exception(p);
        } catch (const Error& e) {
            py::object err = exc;
            py::object inst = err(std::string(error_name(e.code())) + ": " + e.what());
            inst.attr("code") = error_name(e.code());
            PyErr_SetObject(exc.ptr(), inst.ptr());
        }
    });

    py::class_<Circle>(m, "Circle")
        .def_property_readonly("center", [](const Circle& c) { return xy(c.center); })
        .def_readonly("radius", &Circle::radius)
        .def("__repr__", [](const Circle& c) {
            std::ostringstream s;
            s.precision(17);
            s << "Circle(center=(" << c.center.x << ", " << c.center.y << "), radius=" << c.radius << ")";
            return s.str();
        });

    py::class_<QueryResult>(m, "QueryResult")
        .def_readonly("bounded", &QueryResult::bounded)
        .def_property_readonly("circle",
                               [](const QueryResult& r) -> std::optional<Circle> {
                                   if (!r.bounded) return std::nullopt;
                                   return r.circle;
                               })
        .def_property_readonly("direction",
                               [](const QueryResult& r) -> std::optional<XY> {
                                   if (r.bounded) return std::nullopt;
                                   return xy(r.direction);
                               })
        .def("__repr__", [](const QueryResult& r) { return result_json(r); });

    py::class_<PointsIndex>(m, "PointsIndex")
        .def(py::init([](const std::vector<XY>& sites, bool gamma, bool rpart, int rpart_r, std::uint64_t seed) {
                 PointsOptions o;
                 o.gamma = gamma;
                 o.rpart = rpart;
                 o.rpart_r = rpart_r;
                 o.seed = seed;
                 return PointsIndex::build(pts(sites), o);
             }),
             py::arg("sites"), py::arg("gamma") = false, py::arg("rpart") = false, py::arg("rpart_r") = 0,
             py::arg("seed") = 1)
        .def("query", [](const PointsIndex& I, XY q) { return I.query(pt(q)); })
        .def("gamma_query", [](const PointsIndex& I, XY q) { return I.gamma_query(pt(q)); })
        .def("rpart_query", [](const PointsIndex& I, XY q) { return I.rpart_query(pt(q)); })
        .def("probes",
             [](const PointsIndex& I, XY q, const std::string& variant) {
                 ProbeCount pc;
                 auto v = variant_of(variant).value();
                 if (v == PointsVariant::Base) I.query(pt(q), &pc);
                 else if (v == PointsVariant::Gamma) I.gamma_query(pt(q), &pc);
                 else I.rpart_query(pt(q), &pc);
                 return py::make_tuple(pc.plica, pc.qic);
             },
             py::arg("q"), py::arg("variant") = "base")
        .def_property_readonly("num_voronoi", [](const PointsIndex& I) { return I.graph().num_voronoi(); })
        .def_property_readonly("memory_bytes", &PointsIndex::memory_bytes);

    py::class_<PolygonIndex>(m, "PolygonIndex")
        .def(py::init([](const std::vector<XY>& poly, bool strict) {
                 MedialOptions o;
                 o.strict = strict;
                 return PolygonIndex::build(pts(poly), o);
             }),
             py::arg("polygon"), py::arg("strict") = false)
        .def("query", [](const PolygonIndex& I, XY q) { return I.query(pt(q)); })
        .def_property_readonly("num_mountains", [](const PolygonIndex& I) { return I.stats().mountains; })
        .def_property_readonly("num_valleys", [](const PolygonIndex& I) { return I.stats().valleys; })
        .def_property_readonly("memory_bytes", &PolygonIndex::memory_bytes);

    py::class_<ConvexIndex>(m, "ConvexIndex")
        .def(py::init([](const std::vector<XY>& poly) { return ConvexIndex::build(pts(poly)); }), py::arg("polygon"))
        .def("query", [](const ConvexIndex& I, XY q) { return I.query(pt(q)); });

    py::class_<PlicaIndex>(m, "PlicaIndex")
        .def(py::init([](const std::vector<std::tuple<double, double, double>>& cs, std::uint64_t seed) {
                 return PlicaIndex::build(circles(cs), seed);
             }),
             py::arg("circles"), py::arg("seed") = 1)
        .def("query", [](const PlicaIndex& I, XY q) { return I.query(pt(q)); })
        .def("__len__", &PlicaIndex::size);

    py::class_<AnyIndex>(m, "Index")
        .def_static(
            "build",
            [](const std::string& kind, const std::vector<XY>& points,
               const std::vector<std::tuple<double, double, double>>& cs, bool gamma, bool rpart, int rpart_r,
               std::uint64_t seed, bool strict) {
                InputDocument d;
                d.kind = kind_of(kind);
                d.points = pts(points);
                d.circles = circles(cs);
                validate(d);
                BuildOptions o;
                o.gamma = gamma;
                o.rpart = rpart;
                o.rpart_r = rpart_r;
                o.seed = seed;
                o.strict = strict;
                return AnyIndex::build(d, o);
            },
            py::arg("kind"), py::arg("points") = std::vector<XY>{},
            py::arg("circles") = std::vector<std::tuple<double, double, double>>{}, py::arg("gamma") = false,
            py::arg("rpart") = false, py::arg("rpart_r") = 0, py::arg("seed") = 1, py::arg("strict") = false)
        .def_static("load", &AnyIndex::load_file, py::arg("path"))
        .def("save", &AnyIndex::save_file, py::arg("path"))
        .def("to_bytes",
             [](const AnyIndex& I) {
                 std::ostringstream s(std::ios::binary);
                 I.save(s);
                 return py::bytes(s.str());
             })
        .def_static("from_bytes",
                    [](const py::bytes& b) {
                        std::istringstream s(std::string(b), std::ios::binary);
                        return AnyIndex::load(s);
                    })
        .def(
            "query_json",
            [](const AnyIndex& I, XY q, std::optional<std::string> v) { return I.query_json(pt(q), variant_of(v)); },
            py::arg("q"), py::arg("variant") = py::none())
        .def("stats_json", &AnyIndex::stats_json)
        .def_property_readonly("kind", [](const AnyIndex& I) { return kind_name(I.kind()); })
        .def_property_readonly("memory_bytes", &AnyIndex::memory_bytes);

    m.def(
        "load_input",
        [](const std::string& path) {
            InputDocument d = load_input(path);
            py::dict out;
            out["kind"] = kind_name(d.kind);
            std::vector<XY> p, q;
            for (Point x : d.points) p.push_back(xy(x));
            for (Point x : d.queries) q.push_back(xy(x));
            std::vector<std::tuple<double, double, double>> c;
            for (const Circle& x : d.circles) c.emplace_back(x.center.x, x.center.y, x.radius);
            out["points"] = p;
            out["queries"] = q;
            out["circles"] = c;
            out["name"] = d.name;
            return out;
        },
        py::arg("path"));

    m.def(
        "render_svg",
        [](const AnyIndex& I, std::optional<XY> q, int width) {
            SvgOptions o;
            if (q) o.query = pt(*q);
            o.width = width;
            return render_svg(I, o);
        },
        py::arg("index"), py::arg("query") = py::none(), py::arg("width") = 800);

    m.def(
        "oracle_points", [](const std::vector<XY>& s, XY q) { return oracle_points(pts(s), pt(q)).result; },
        py::arg("sites"), py::arg("q"));
    m.def(
        "oracle_polygon", [](const std::vector<XY>& s, XY q) { return oracle_polygon(pts(s), pt(q)).result.circle; },
        py::arg("polygon"), py::arg("q"));
    m.def(
        "oracle_plica",
        [](const std::vector<std::tuple<double, double, double>>& cs, XY q) { return oracle_plica(circles(cs), pt(q)); },
        py::arg("circles"), py::arg("q"));
}
