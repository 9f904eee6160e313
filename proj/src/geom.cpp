#include "qmec/geom.hpp"

#include <gmpxx.h>

#include <algorithm>

namespace qmec {

const char* error_name(ErrorCode c) {
    switch (c) {
        case ErrorCode::TooFewSites: return "TooFewSites";
        case ErrorCode::AllCollinear: return "AllCollinear";
        case ErrorCode::DuplicateSites: return "DuplicateSites";
        case ErrorCode::CollinearDefiningPoints: return "CollinearDefiningPoints";
        case ErrorCode::PointNotOnGraph: return "PointNotOnGraph";
        case ErrorCode::NonOverlappingMecs: return "NonOverlappingMecs";
        case ErrorCode::ParameterOutOfRange: return "ParameterOutOfRange";
        case ErrorCode::NotSimple: return "NotSimple";
        case ErrorCode::TooFewVertices: return "TooFewVertices";
        case ErrorCode::ClockwiseInput: return "ClockwiseInput";
        case ErrorCode::NotConvex: return "NotConvex";
        case ErrorCode::QueryOutsidePolygon: return "QueryOutsidePolygon";
        case ErrorCode::PromiseViolated: return "PromiseViolated";
        case ErrorCode::QueryAtSite: return "QueryAtSite";
        case ErrorCode::EmptyInput: return "EmptyInput";
        case ErrorCode::ParseError: return "ParseError";
        case ErrorCode::ValidationError: return "ValidationError";
        case ErrorCode::RenderError: return "RenderError";
        case ErrorCode::IoError: return "IoError";
        case ErrorCode::InternalError: return "InternalError";
    }
    return "Unknown";
}

namespace {

// Error bound constants from Shewchuk's adaptive predicates (first stage only;
// anything inside the bound goes straight to rationals).
constexpr double kEps = 1.1102230246251565e-16;  // 2^-53
constexpr double kCcwBound = (3.0 + 16.0 * kEps) * kEps;
constexpr double kIccBound = (10.0 + 96.0 * kEps) * kEps;


int orient_exact(Point a, Point b, Point c) {
    mpq_class ax(a.x), ay(a.y), bx(b.x), by(b.y), cx(c.x), cy(c.y);
    mpq_class det = (bx - ax) * (cy - ay) - (by - ay) * (cx - ax);
    return sgn(det);
}

int lifted_exact(Point a, double wa, Point b, double wb, Point c, double wc, Point d, double wd) {
    mpq_class dx(d.x), dy(d.y), wdq(wd);
    mpq_class adx = mpq_class(a.x) - dx, ady = mpq_class(a.y) - dy;
    mpq_class bdx = mpq_class(b.x) - dx, bdy = mpq_class(b.y) - dy;
    mpq_class cdx = mpq_class(c.x) - dx, cdy = mpq_class(c.y) - dy;
    mpq_class al = adx * adx + ady * ady - (mpq_class(wa) - wdq);
    mpq_class bl = bdx * bdx + bdy * bdy - (mpq_class(wb) - wdq);
    mpq_class cl = cdx * cdx + cdy * cdy - (mpq_class(wc) - wdq);
    mpq_class det = al * (bdx * cdy - cdx * bdy) + bl * (cdx * ady - adx * cdy) + cl * (adx * bdy - bdx * ady);
    return sgn(det);
}

}  // namespace

int orient_sign(Point a, Point b, Point c) {
    double l = (b.x - a.x) * (c.y - a.y);
    double r = (b.y - a.y) * (c.x - a.x);
    double det = l - r;
    double bound = kCcwBound * (std::fabs(l) + std::fabs(r));
    if (det > bound) return 1;
    if (-det > bound) return -1;
    return orient_exact(a, b, c);
}

Orientation orientation(Point a, Point b, Point c) {
    return static_cast<Orientation>(orient_sign(a, b, c));
}

int incircle_sign(Point a, Point b, Point c, Point d) {
    double adx = a.x - d.x, ady = a.y - d.y;
    double bdx = b.x - d.x, bdy = b.y - d.y;
    double cdx = c.x - d.x, cdy = c.y - d.y;
    double bdxcdy = bdx * cdy, cdxbdy = cdx * bdy;
    double cdxady = cdx * ady, adxcdy = adx * cdy;
    double adxbdy = adx * bdy, bdxady = bdx * ady;
    double al = adx * adx + ady * ady;
    double bl = bdx * bdx + bdy * bdy;
    double cl = cdx * cdx + cdy * cdy;
    double det = al * (bdxcdy - cdxbdy) + bl * (cdxady - adxcdy) + cl * (adxbdy - bdxady);
    double perm = (std::fabs(bdxcdy) + std::fabs(cdxbdy)) * al + (std::fabs(cdxady) + std::fabs(adxcdy)) * bl +
                  (std::fabs(adxbdy) + std::fabs(bdxady)) * cl;
    double bound = kIccBound * perm;
    if (det > bound) return 1;
    if (-det > bound) return -1;
    return lifted_exact(a, 0.0, b, 0.0, c, 0.0, d, 0.0);
}

CirclePosition in_circle(Point a, Point b, Point c, Point d) {
    int o = orient_sign(a, b, c);
    if (o == 0) throw Error(ErrorCode::CollinearDefiningPoints, "in_circle: defining points are collinear");
    return static_cast<CirclePosition>(o * incircle_sign(a, b, c, d));
}

int power_sign(Point a, double wa, Point b, double wb, Point c, double wc, Point d, double wd) {
    double adx = a.x - d.x, ady = a.y - d.y;
    double bdx = b.x - d.x, bdy = b.y - d.y;
    double cdx = c.x - d.x, cdy = c.y - d.y;
    double bdxcdy = bdx * cdy, cdxbdy = cdx * bdy;
    double cdxady = cdx * ady, adxcdy = adx * cdy;
    double adxbdy = adx * bdy, bdxady = bdx * ady;
    double ag = adx * adx + ady * ady, bg = bdx * bdx + bdy * bdy, cg = cdx * cdx + cdy * cdy;
    double aw = wa - wd, bw = wb - wd, cw = wc - wd;
    double al = ag - aw, bl = bg - bw, cl = cg - cw;
    double det = al * (bdxcdy - cdxbdy) + bl * (cdxady - adxcdy) + cl * (adxbdy - bdxady);
    double perm = (std::fabs(bdxcdy) + std::fabs(cdxbdy)) * (ag + std::fabs(aw) + std::fabs(wa) + std::fabs(wd)) +
                  (std::fabs(cdxady) + std::fabs(adxcdy)) * (bg + std::fabs(bw) + std::fabs(wb) + std::fabs(wd)) +
                  (std::fabs(adxbdy) + std::fabs(bdxady)) * (cg + std::fabs(cw) + std::fabs(wc) + std::fabs(wd));
    double bound = 4.0 * kIccBound * perm;
    if (det > bound) return 1;
    if (-det > bound) return -1;
    return lifted_exact(a, wa, b, wb, c, wc, d, wd);
}

int power_sign_collinear(Point a, double wa, Point b, double wb, Point d, double wd) {
    // Parametrise along the dominant axis; lifted z is linear-plus-quadratic, so
    // compare z_d with the chord through (s_a, z_a), (s_b, z_b) exactly.
    bool use_x = std::fabs(b.x - a.x) >= std::fabs(b.y - a.y);
    mpq_class sa(use_x ? a.x : a.y), sb(use_x ? b.x : b.y), sd(use_x ? d.x : d.y);
    auto lift = [](Point p, double w) {
        mpq_class x(p.x), y(p.y);
        return mpq_class(x * x + y * y - mpq_class(w));
    };
    mpq_class za = lift(a, wa), zb = lift(b, wb), zd = lift(d, wd);
    // chord value at sd: za + (zb - za) * (sd - sa) / (sb - sa)
    mpq_class lhs = (zd - za) * (sb - sa);
    mpq_class rhs = (zb - za) * (sd - sa);
    int s = sgn(mpq_class(rhs - lhs));
    if (sgn(mpq_class(sb - sa)) < 0) s = -s;
    return s;
}

Circle circumcircle(Point a, Point b, Point c) {
    if (orient_sign(a, b, c) == 0)
        throw Error(ErrorCode::CollinearDefiningPoints, "circumcircle: defining points are collinear");
    double bx = b.x - a.x, by = b.y - a.y;
    double cx = c.x - a.x, cy = c.y - a.y;
    double d = 2.0 * (bx * cy - by * cx);
    double b2 = bx * bx + by * by, c2 = cx * cx + cy * cy;
    double ux = (cy * b2 - by * c2) / d;
    double uy = (bx * c2 - cx * b2) / d;
    Point center{a.x + ux, a.y + uy};
    return {center, std::hypot(ux, uy)};
}

bool contains(const Circle& c, Point p, const Tolerance& tol) {
    return dist(c.center, p) <= c.radius + tol.slack(c.radius);
}

double Feature::distance(Point p) const {
    if (kind == VERTEX) return dist(p, a);
    Point d = b - a;
    double len2 = norm2(d);
    double t = len2 > 0 ? dot(p - a, d) / len2 : 0.0;
    t = std::clamp(t, 0.0, 1.0);
    return dist(p, lerp(a, b, t));
}

double Feature::line_distance(Point p) const {
    if (kind == VERTEX) return dist(p, a);
    Point d = b - a;
    return std::fabs(cross(d, p - a)) / norm(d);
}

std::pair<Point, double> ParabolicArc::at(double t) const {
    Point n = perp(direction);
    double a = dot(focus - origin, direction);
    double b = dot(focus - origin, n);
    if (b < 0) {
        n = -1.0 * n;
        b = -b;
    }
    double h = ((t - a) * (t - a) + b * b) / (2.0 * b);
    Point p = origin + t * direction + h * n;
    return {p, h};
}

std::pair<Point, double> StraightPiece::at(double t) const {
    Point p = lerp(p0, p1, t);
    return {p, first.line_distance(p)};
}

std::pair<Point, double> arc_point_and_clearance(const ParabolicArc& arc, double t) {
    double lo = std::min(arc.t0, arc.t1), hi = std::max(arc.t0, arc.t1);
    double slack = 1e-12 * std::max(1.0, hi - lo);
    if (!(t >= lo - slack && t <= hi + slack))
        throw Error(ErrorCode::ParameterOutOfRange, "parabolic arc parameter out of range");
    return arc.at(t);
}

std::pair<Point, double> arc_point_and_clearance(const StraightPiece& piece, double t) {
    if (!(t >= -1e-12 && t <= 1.0 + 1e-12))
        throw Error(ErrorCode::ParameterOutOfRange, "segment parameter out of range");
    return piece.at(t);
}

}  // namespace qmec
