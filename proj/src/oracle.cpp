#include "qmec/oracle.hpp"

#include <algorithm>
#include <numeric>

namespace qmec {

std::optional<int> oracle_plica(const std::vector<Circle>& circles, Point q, const Tolerance& tol) {
    for (int i = 0; i < int(circles.size()); ++i)
        if (contains(circles[i], q, tol)) return i;
    return std::nullopt;
}

// ---------------------------------------------------------------- points

bool PointsOracle::empty_circle(Point a, Point b, Point c, int s0, int s1, int s2) const {
    if (orient_sign(a, b, c) < 0) std::swap(b, c);
    for (int i = 0; i < int(sites_.size()); ++i) {
        if (i == s0 || i == s1 || i == s2) continue;
        if (incircle_sign(a, b, c, sites_[i]) > 0) return false;
    }
    return true;
}

PointsOracle::PointsOracle(std::vector<Point> sites) : sites_(std::move(sites)) {
    const int n = int(sites_.size());
    if (n < 3) throw Error(ErrorCode::TooFewSites, "need at least 3 sites");
    {
        std::vector<Point> s = sites_;
        std::sort(s.begin(), s.end(), lex_less);
        if (std::adjacent_find(s.begin(), s.end()) != s.end()) throw Error(ErrorCode::DuplicateSites, "duplicate site");
    }
    // monotone chain hull, collinear points dropped
    std::vector<int> idx(n);
    std::iota(idx.begin(), idx.end(), 0);
    std::sort(idx.begin(), idx.end(), [&](int a, int b) { return lex_less(sites_[a], sites_[b]); });
    std::vector<int> H(2 * n);
    int k = 0;
    for (int i = 0; i < n; ++i) {
        while (k >= 2 && orient_sign(sites_[H[k - 2]], sites_[H[k - 1]], sites_[idx[i]]) <= 0) --k;
        H[k++] = idx[i];
    }
    for (int i = n - 2, t = k + 1; i >= 0; --i) {
        while (k >= t && orient_sign(sites_[H[k - 2]], sites_[H[k - 1]], sites_[idx[i]]) <= 0) --k;
        H[k++] = idx[i];
    }
    H.resize(k - 1);
    if (H.size() < 3) throw Error(ErrorCode::AllCollinear, "all sites collinear");
    hull_ = H;

    std::vector<char> is_pair(std::size_t(n) * n, 0);
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
            for (int l = j + 1; l < n; ++l) {
                if (orient_sign(sites_[i], sites_[j], sites_[l]) == 0) continue;
                if (!empty_circle(sites_[i], sites_[j], sites_[l], i, j, l)) continue;
                triples_.push_back({i, j, l});
                triple_circles_.push_back(circumcircle(sites_[i], sites_[j], sites_[l]));
                is_pair[i * n + j] = is_pair[i * n + l] = is_pair[j * n + l] = 1;
            }
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
            if (is_pair[i * n + j]) pairs_.emplace_back(i, j);
}

OracleReport PointsOracle::query(Point q) const {
    OracleReport R;
    for (auto s : sites_)
        if (s == q) throw Error(ErrorCode::QueryAtSite, "query coincides with a site");
    const int h = int(hull_.size());
    bool inside = true;
    for (int i = 0; i < h && inside; ++i)
        if (orient_sign(sites_[hull_[i]], sites_[hull_[(i + 1) % h]], q) <= 0) inside = false;
    if (!inside) {
        double best = 1e300;
        Point dir{1, 0};
        for (int i = 0; i < h; ++i) {
            Point a = sites_[hull_[i]], b = sites_[hull_[(i + 1) % h]];
            Point d = b - a;
            double t = std::clamp(dot(q - a, d) / norm2(d), 0.0, 1.0);
            double dd = dist(q, lerp(a, b, t));
            if (dd < best) {
                best = dd;
                Point n = unit(Point{d.y, -d.x});
                if (t > 0 && t < 1) {
                    dir = n;
                } else {
                    int j = t <= 0 ? (i + h - 1) % h : (i + 1) % h;
                    Point e = sites_[hull_[(j + 1) % h]] - sites_[hull_[j]];
                    dir = unit(n + unit(Point{e.y, -e.x}));
                }
                R.witness = {hull_[i], hull_[(i + 1) % h]};
            }
        }
        R.result = QueryResult::unbounded_toward(dir);
        return R;
    }
    double best = -1;
    Circle bc;
    for (std::size_t t = 0; t < triples_.size(); ++t) {
        ++R.candidates;
        const Circle& c = triple_circles_[t];
        if (contains(c, q) && c.radius > best) {
            best = c.radius;
            bc = c;
            R.witness = {triples_[t][0], triples_[t][1], triples_[t][2]};
        }
    }
    for (auto [i, j] : pairs_) {
        if (orient_sign(sites_[i], sites_[j], q) == 0) continue;
        ++R.candidates;
        Circle c = circumcircle(sites_[i], sites_[j], q);
        if (c.radius <= best) continue;
        if (!empty_circle(sites_[i], sites_[j], q, i, j, -1)) continue;
        best = c.radius;
        bc = c;
        R.witness = {i, j};
    }
    R.result = QueryResult::of(bc);
    return R;
}

OracleReport oracle_points(const std::vector<Point>& sites, Point q) { return PointsOracle(sites).query(q); }

}  // namespace qmec
