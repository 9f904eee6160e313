#pragma once

#include <random>
#include <vector>

#include "qmec/geom.hpp"

namespace testutil {

using qmec::Point;

std::vector<Point> uniform_points(int n, std::mt19937_64& rng);
// a few Gaussian blobs
std::vector<Point> clustered_points(int n, std::mt19937_64& rng);
std::vector<Point> square_sites();
std::vector<Point> equilateral_sites();

// ccw polygons
std::vector<Point> star_polygon(int n, std::mt19937_64& rng);
std::vector<Point> convex_polygon(int n, std::mt19937_64& rng);
std::vector<Point> hourglass();
std::vector<Point> unit_square();

bool point_in_polygon(const std::vector<Point>& poly, Point q);
double boundary_distance(const std::vector<Point>& poly, Point q);
// uniform interior samples, at least `margin` away from the boundary
std::vector<Point> interior_samples(const std::vector<Point>& poly, int k, std::mt19937_64& rng, double margin = 1e-6);

}  // namespace testutil

namespace qmec {
class VoronoiGraph;
}

namespace testutil {
// uniform sample of the lens A ∩ B (assumes they overlap)
Point lens_sample(const qmec::Circle& A, const qmec::Circle& B, std::mt19937_64& rng);
// some lens point strictly inside the hull (sampled)
bool lens_meets_hull(const qmec::VoronoiGraph& g, const qmec::Circle& A, const qmec::Circle& B, std::mt19937_64& rng);
}  // namespace testutil
