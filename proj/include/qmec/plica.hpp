#pragma once

#include <array>
#include <optional>
#include <vector>

#include "qmec/geom.hpp"
#include "qmec/triangulation.hpp"

namespace qmec {

// Randomized trapezoidal map over non-crossing segments (lexicographic
// order plays the role of x, which removes vertical segments).
class TrapezoidalMap {
public:
    struct Segment {
        Point p, q;  // p lex< q
        int above = -1, below = -1;
    };

    // Returns false if the input turned out inconsistent (rounding); the
    // caller should then fall back to another locator.
    bool build(std::vector<Segment> segs, std::uint64_t seed);
    // face label of the trapezoid containing q; -1 when unknown
    int locate(Point q) const;
    bool empty() const { return nodes_.empty(); }
    std::size_t num_leaves() const;
    std::size_t memory_bytes() const;

    // faces of trapezoids bounded only by the frame are filled in by the caller
    template <class F>
    void label_open(F&& f) {
        for (auto& t : traps_)
            if (t.face < 0) t.face = f(sample(t));
        collapse();
    }

private:
    struct Trap {
        int top = -1, bot = -1;  // -1: frame
        Point lp, rp;
        bool lp_inf = true, rp_inf = true;
        int face = -1;
    };
    // leaf: left < 0, idx = trapezoid (face once collapsed)
    // point test: idx = -(2*segment + endpoint) - 1; segment test: idx >= 0
    struct Node {
        std::int32_t idx, left, right;
    };
    std::vector<Segment> segs_;
    std::vector<std::array<Point, 2>> lines_;  // segs_ without labels, after collapse
    std::vector<Trap> traps_;
    std::vector<Node> nodes_;
    std::vector<int> leaf_of_;  // trapezoid -> node

    // leaves keep only their face label; trapezoid records are dropped
    void collapse();
    bool collapsed_ = false;

    Point endpoint(int code) const;
    int seg_side(int s, int t) const;
    int locate_on(int s, Point r) const;
    Point sample(const Trap& t) const;
    double frame_lo_ = 0, frame_hi_ = 0, frame_x0_ = 0, frame_x1_ = 0;
};

class PlicaIndex {
public:
    static PlicaIndex build(const std::vector<Circle>& circles, std::uint64_t seed = 1);

    // a circle containing q (closed, with tolerance), or nothing
    std::optional<int> query(Point q) const;
    // circle minimizing |q-c|^2 - r^2
    int nearest_power(Point q) const;

    const std::vector<Circle>& circles() const { return circles_; }
    std::size_t size() const { return circles_.size(); }
    std::size_t memory_bytes() const;
    bool uses_trapezoids() const { return !trap_.empty(); }
    // circle of the cell reported by the trapezoidal map alone (-1 outside the frame)
    int raw_locate(Point q) const;

private:
    // sets this small are scanned directly
    static constexpr std::size_t kScanLimit = 8;
    bool scan_mode_ = false;

    std::vector<Circle> circles_;
    std::vector<int> rep_;  // deduplicated site -> circle id
    std::vector<Point> centers_;
    std::vector<double> weights_;

    // 1D mode (collinear centres)
    bool line_mode_ = false;
    Point origin_, axis_;
    std::vector<int> env_;        // sites on the lower envelope, by position
    std::vector<double> breaks_;  // env_.size() - 1 breakpoints

    // 2D mode
    std::vector<int> nb_off_, nb_;  // CSR neighbours between present sites
    std::vector<int> hull_sites_;
    TrapezoidalMap trap_;
    double bx0_ = 0, bx1_ = 0, by0_ = 0, by1_ = 0;

    double power(int site, Point q) const;
    int descend(int site, Point q) const;
    int line_argmin(Point q) const;
    int argmin_site(Point q) const;
};

}  // namespace qmec
