#include <cstdio>
#include <sstream>

#include "qmec/io.hpp"

namespace qmec {

namespace {

struct Box {
    double x0 = 1e300, y0 = 1e300, x1 = -1e300, y1 = -1e300;
    void add(Point p) {
        x0 = std::min(x0, p.x), y0 = std::min(y0, p.y);
        x1 = std::max(x1, p.x), y1 = std::max(y1, p.y);
    }
    void add(const Circle& c) {
        add(c.center - Point{c.radius, c.radius});
        add(c.center + Point{c.radius, c.radius});
    }
};

// Liang-Barsky; false when the segment misses the box
bool clip(Point& a, Point& b, const Box& bx) {
    double t0 = 0, t1 = 1;
    Point d = b - a;
    const double p[4] = {-d.x, d.x, -d.y, d.y};
    const double q[4] = {a.x - bx.x0, bx.x1 - a.x, a.y - bx.y0, bx.y1 - a.y};
    for (int i = 0; i < 4; ++i) {
        if (p[i] == 0) {
            if (q[i] < 0) return false;
            continue;
        }
        double t = q[i] / p[i];
        if (p[i] < 0) t0 = std::max(t0, t);
        else t1 = std::min(t1, t);
    }
    if (t0 > t1) return false;
    Point a2 = a + t0 * d, b2 = a + t1 * d;
    a = a2, b = b2;
    return true;
}

class Canvas {
public:
    Canvas(const Box& b, int width) : b_(b) {
        double w = b.x1 - b.x0, h = b.y1 - b.y0;
        s_ = width / std::max(w, 1e-300);
        w_ = width;
        h_ = int(std::ceil(h * s_));
    }
    std::string xy(Point p) const {
        char buf[64];
        std::snprintf(buf, sizeof buf, "%.3f,%.3f", (p.x - b_.x0) * s_, (b_.y1 - p.y) * s_);
        return buf;
    }
    std::string num(double v) const {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.3f", v * s_);
        return buf;
    }
    void line(const char* cls, Point a, Point b) {
        auto [ax, ay] = split(xy(a));
        auto [bx, by] = split(xy(b));
        o_ << "<line class=\"" << cls << "\" x1=\"" << ax << "\" y1=\"" << ay << "\" x2=\"" << bx << "\" y2=\"" << by
           << "\"/>\n";
    }
    void circle(const char* cls, const Circle& c) {
        auto [x, y] = split(xy(c.center));
        o_ << "<circle class=\"" << cls << "\" cx=\"" << x << "\" cy=\"" << y << "\" r=\"" << num(c.radius)
           << "\"/>\n";
    }
    void dot(const char* cls, Point p, double px) {
        auto [x, y] = split(xy(p));
        o_ << "<circle class=\"" << cls << "\" cx=\"" << x << "\" cy=\"" << y << "\" r=\"" << px << "\"/>\n";
    }
    void poly(const char* tag, const char* cls, const std::vector<Point>& pts) {
        o_ << "<" << tag << " class=\"" << cls << "\" points=\"";
        for (std::size_t i = 0; i < pts.size(); ++i) o_ << (i ? " " : "") << xy(pts[i]);
        o_ << "\"/>\n";
    }
    void cross(const char* cls, Point p) {
        double cx = (p.x - b_.x0) * s_, cy = (b_.y1 - p.y) * s_;
        char buf[160];
        std::snprintf(buf, sizeof buf, "<path class=\"%s\" d=\"M%.3f,%.3fL%.3f,%.3fM%.3f,%.3fL%.3f,%.3f\"/>\n", cls,
                      cx - 5, cy - 5, cx + 5, cy + 5, cx - 5, cy + 5, cx + 5, cy - 5);
        o_ << buf;
    }
    std::string finish() const {
        std::ostringstream s;
        s << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w_ << "\" height=\"" << h_ << "\" viewBox=\"0 0 "
          << w_ << " " << h_ << "\">\n"
          << "<style>"
             ".site{fill:#222}.boundary{fill:#f4f4f4;stroke:#222;stroke-width:1.5}"
             ".voronoi,.axis{stroke:#2a6fdb;stroke-width:1;fill:none}.chord{stroke:#d08a00;stroke-dasharray:4 3}"
             ".disk{fill:none;stroke:#888}.start{fill:none;stroke:#2a9d3a;stroke-dasharray:5 3}"
             ".highlight{fill:rgba(220,40,40,.08);stroke:#d42828;stroke-width:2}.query{stroke:#d42828;stroke-width:2}"
             "</style>\n"
          << o_.str() << "</svg>\n";
        return s.str();
    }

private:
    Box b_;
    double s_ = 1;
    int w_ = 0, h_ = 0;
    std::ostringstream o_;
    static std::pair<std::string, std::string> split(const std::string& s) {
        auto c = s.find(',');
        return {s.substr(0, c), s.substr(c + 1)};
    }
};

Box padded(Box b) {
    double w = b.x1 - b.x0, h = b.y1 - b.y0, pad = 0.08 * std::max(w, h);
    if (pad == 0) pad = 1;
    return {b.x0 - pad, b.y0 - pad, b.x1 + pad, b.y1 + pad};
}

void draw_axis(Canvas& cv, const MedialAxisTree& m) {
    cv.poly("polygon", "boundary", m.polygon().pts);
    for (const MAEdge& e : m.edges())
        for (const AxisPiece& pc : e.pieces) {
            if (!pc.curved) {
                cv.line("axis", pc.p0, pc.p1);
                continue;
            }
            std::vector<Point> pts;
            for (int i = 0; i <= 16; ++i) pts.push_back(pc.at(i / 16.0));
            cv.poly("polyline", "axis", pts);
        }
}

}  // namespace

std::string render_svg(const AnyIndex& idx, const SvgOptions& opt) {
    if (opt.width <= 0) throw Error(ErrorCode::RenderError, "width must be positive");
    if (opt.query && !finite(*opt.query)) throw Error(ErrorCode::RenderError, "query point is not finite");
    Box b;
    if (idx.points()) {
        for (Point p : idx.points()->sites()) b.add(p);
    } else if (idx.polygon()) {
        for (Point p : idx.polygon()->axis().polygon().pts) b.add(p);
    } else if (idx.convex()) {
        for (Point p : idx.convex()->axis().polygon().pts) b.add(p);
    } else if (idx.circles()) {
        for (const Circle& c : idx.circles()->circles()) b.add(c);
    }
    if (!(b.x0 <= b.x1)) throw Error(ErrorCode::RenderError, "nothing to draw");

    // the answer goes into the frame too, when it is finite
    std::optional<Circle> answer;
    std::optional<Circle> start;
    Point dir{};
    bool unbounded = false;
    if (opt.query) {
        Point q = *opt.query;
        b.add(q);
        try {
            if (idx.points()) {
                QueryResult r = idx.points()->query(q);
                if (r.bounded) answer = r.circle;
                else unbounded = true, dir = r.direction;
            } else if (idx.polygon()) {
                const PolygonIndex& P = *idx.polygon();
                answer = P.query(q);
                start = P.axis().mec(P.locator().locate(P.axis(), q).pos);
            } else if (idx.convex()) {
                const ConvexIndex& C = *idx.convex();
                answer = C.query(q);
                start = C.axis().mec(C.locator().locate(C.axis(), q).pos);
            } else if (auto h = idx.circles()->query(q)) {
                answer = idx.circles()->circles()[*h];
            }
        } catch (const Error& e) {
            throw Error(ErrorCode::RenderError, std::string("query failed: ") + e.what());
        }
        if (answer) b.add(*answer);
    }
    Box frame = padded(b);
    Canvas cv(frame, opt.width);

    if (idx.points()) {
        const VoronoiGraph& g = idx.points()->graph();
        for (const VorEdge& e : g.edges()) {
            if (e.is_ray()) continue;
            Point a = g.vertices()[e.u].pos, c = g.vertices()[e.v].pos;
            if (clip(a, c, frame)) cv.line("voronoi", a, c);
        }
        for (Point p : g.sites()) cv.dot("site", p, 3);
    } else if (idx.polygon()) {
        const PolygonIndex& P = *idx.polygon();
        draw_axis(cv, P.axis());
        for (const ValleyPoint& v : P.landscape().valleys) cv.line("chord", v.chord[0], v.chord[1]);
    } else if (idx.convex()) {
        draw_axis(cv, idx.convex()->axis());
    } else {
        for (const Circle& c : idx.circles()->circles()) cv.circle("disk", c);
    }

    if (opt.query) {
        if (start) cv.circle("start", *start);
        if (answer) cv.circle("highlight", *answer);
        if (unbounded) {
            double len = 0.25 * std::max(frame.x1 - frame.x0, frame.y1 - frame.y0);
            cv.line("query", *opt.query, *opt.query + len * dir);
        }
        cv.cross("query", *opt.query);
    }
    return cv.finish();
}

}  // namespace qmec
