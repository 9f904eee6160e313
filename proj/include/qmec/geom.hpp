#pragma once

#include <cmath>
#include <algorithm>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>

namespace qmec {

struct Point {
    double x = 0.0;
    double y = 0.0;
};

inline Point operator+(Point a, Point b) { return {a.x + b.x, a.y + b.y}; }
inline Point operator-(Point a, Point b) { return {a.x - b.x, a.y - b.y}; }
inline Point operator*(double s, Point a) { return {s * a.x, s * a.y}; }
inline Point operator*(Point a, double s) { return {s * a.x, s * a.y}; }
inline bool operator==(Point a, Point b) { return a.x == b.x && a.y == b.y; }
inline bool operator!=(Point a, Point b) { return !(a == b); }

inline double dot(Point a, Point b) { return a.x * b.x + a.y * b.y; }
inline double cross(Point a, Point b) { return a.x * b.y - a.y * b.x; }
inline double norm2(Point a) { return dot(a, a); }
inline double norm(Point a) { return std::hypot(a.x, a.y); }
inline double dist(Point a, Point b) { return norm(a - b); }
inline double dist2(Point a, Point b) { return norm2(a - b); }
inline Point perp(Point a) { return {-a.y, a.x}; }
inline Point unit(Point a) {
    double n = norm(a);
    return {a.x / n, a.y / n};
}
inline Point midpoint(Point a, Point b) { return {0.5 * (a.x + b.x), 0.5 * (a.y + b.y)}; }
inline Point lerp(Point a, Point b, double t) { return {a.x + t * (b.x - a.x), a.y + t * (b.y - a.y)}; }
// lexicographic (x, then y)
inline bool lex_less(Point a, Point b) { return a.x < b.x || (a.x == b.x && a.y < b.y); }
inline bool finite(Point a) { return std::isfinite(a.x) && std::isfinite(a.y); }

struct Circle {
    Point center;
    double radius = 0.0;
};

struct Tolerance {
    double eps_rel = 1e-9;
    double eps_abs = 1e-12;
    double slack(double r) const { return std::max(eps_abs, eps_rel * r); }
};

struct QueryResult {
    bool bounded = true;
    Circle circle;
    Point direction;  // unit outward witness when unbounded

    static QueryResult of(Circle c) { return {true, c, {}}; }
    static QueryResult unbounded_toward(Point d) { return {false, {}, d}; }
};

enum class Orientation { CW = -1, COLLINEAR = 0, CCW = 1 };
enum class CirclePosition { OUTSIDE = -1, ON = 0, INSIDE = 1 };

enum class ErrorCode {
    TooFewSites,
    AllCollinear,
    DuplicateSites,
    CollinearDefiningPoints,
    PointNotOnGraph,
    NonOverlappingMecs,
    ParameterOutOfRange,
    NotSimple,
    TooFewVertices,
    ClockwiseInput,
    NotConvex,
    QueryOutsidePolygon,
    PromiseViolated,
    QueryAtSite,
    EmptyInput,
    ParseError,
    ValidationError,
    RenderError,
    IoError,
    InternalError,
};

const char* error_name(ErrorCode c);

class Error : public std::runtime_error {
public:
    Error(ErrorCode c, const std::string& what) : std::runtime_error(what), code_(c) {}
    ErrorCode code() const { return code_; }

private:
    ErrorCode code_;
};

// Exact sign of the signed area of abc (+1 ccw).
int orient_sign(Point a, Point b, Point c);
Orientation orientation(Point a, Point b, Point c);

// Raw sign of the incircle determinant: +1 when d is inside the circle of a ccw abc.
int incircle_sign(Point a, Point b, Point c, Point d);
CirclePosition in_circle(Point a, Point b, Point c, Point d);

// Raw sign of the lifted test with weights (z = x^2 + y^2 - w). For ccw abc,
// +1 means d's lifted point is below the plane through the other three.
int power_sign(Point a, double wa, Point b, double wb, Point c, double wc, Point d, double wd);

// Same in one dimension: sign of d relative to the lifted line through a and b,
// where d lies on the line ab. +1 means below.
int power_sign_collinear(Point a, double wa, Point b, double wb, Point d, double wd);

Circle circumcircle(Point a, Point b, Point c);
bool contains(const Circle& c, Point p, const Tolerance& tol = {});

// Boundary features of a polygon: an open edge or a vertex.
struct Feature {
    enum Kind : std::uint8_t { VERTEX = 0, EDGE = 1 };
    Kind kind = VERTEX;
    Point a;  // vertex, or edge start
    Point b;  // edge end (unused for vertices)
    int index = -1;

    double distance(Point p) const;
    // distance to the supporting line for edges; point distance for vertices
    double line_distance(Point p) const;
};

struct ParabolicArc {
    Point focus;
    Point origin;     // a point on the directrix
    Point direction;  // unit direction of the directrix
    double t0 = 0.0;
    double t1 = 0.0;

    // point at directrix parameter t and its clearance
    std::pair<Point, double> at(double t) const;
};

struct StraightPiece {
    Point p0, p1;
    Feature first, second;

    std::pair<Point, double> at(double t) const;
};

std::pair<Point, double> arc_point_and_clearance(const ParabolicArc& arc, double t);
std::pair<Point, double> arc_point_and_clearance(const StraightPiece& piece, double t);

}  // namespace qmec
