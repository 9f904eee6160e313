#pragma once

#include <array>
#include <memory>
#include <optional>
#include <vector>

#include "qmec/geom.hpp"

namespace qmec {

struct OracleReport {
    QueryResult result;
    long candidates = 0;
    std::vector<int> witness;  // defining sites, or boundary feature ids
};

// Brute-force reference for point sets. Empty site triples are enumerated
// once at construction (O(n^4) worst case, meant for n <= a few hundred).
class PointsOracle {
public:
    explicit PointsOracle(std::vector<Point> sites);
    OracleReport query(Point q) const;
    const std::vector<std::array<int, 3>>& empty_triples() const { return triples_; }

private:
    std::vector<Point> sites_;
    std::vector<std::array<int, 3>> triples_;
    std::vector<Circle> triple_circles_;
    std::vector<std::pair<int, int>> pairs_;  // pairs with an empty circle through them
    std::vector<int> hull_;                   // ccw, strictly convex
    bool empty_circle(Point a, Point b, Point c, int skip0, int skip1, int skip2) const;
};

OracleReport oracle_points(const std::vector<Point>& sites, Point q);

class MedialAxisTree;

// Brute-force reference for simple polygons: every axis node, and every axis
// piece solved by dense sampling plus bisection. Witness lists the boundary
// features the circle touches: edge i as i, corner v as -1 - v.
class PolygonOracle {
public:
    explicit PolygonOracle(const std::vector<Point>& polygon);
    OracleReport query(Point q) const;
    const MedialAxisTree& axis() const { return *m_; }

private:
    std::shared_ptr<const MedialAxisTree> m_;
};

OracleReport oracle_polygon(const std::vector<Point>& polygon, Point q);

// Linear scan: first circle (by id) containing q.
std::optional<int> oracle_plica(const std::vector<Circle>& circles, Point q, const Tolerance& tol = {});

}  // namespace qmec
