#include <algorithm>

#include "qmec/polygon.hpp"

namespace qmec {

PolygonIndex PolygonIndex::build(const std::vector<Point>& polygon, const MedialOptions& opt) {
    PolygonIndex I;
    I.opt_ = opt;
    I.m_ = std::make_shared<MedialAxisTree>(MedialAxisTree::build(polygon, opt));
    const MedialAxisTree& m = *I.m_;
    I.land_ = classify_valleys_peaks(m, opt);
    I.forest_ = MountainForest::build(m, I.land_);
    I.loc_ = FaceLocator::build(m);

    std::vector<Circle> nc;
    for (int w = 0; w < int(m.nodes().size()); ++w)
        if (m.nodes()[w].kind == MANode::INTERNAL) {
            nc.push_back(m.mec(w));
            I.node_of_circle_.push_back(w);
        }
    if (!nc.empty()) {
        I.node_plica_ = PlicaIndex::build(nc);
        I.has_node_plica_ = true;
    }
    std::vector<Circle> vc;
    for (const ValleyPoint& v : I.land_.valleys) vc.push_back(v.mec);
    if (!vc.empty()) {
        I.valley_plica_ = PlicaIndex::build(vc);
        I.has_valley_plica_ = true;
    }
    I.ct_ = CentroidTree::build(m, I.forest_, &I.stats_.qic);

    PolygonStats& s = I.stats_;
    s.nodes = int(m.nodes().size());
    s.internal = m.num_internal();
    s.edges = int(m.edges().size());
    s.valleys = int(I.land_.valleys.size());
    s.peaks = int(I.land_.peaks.size());
    s.node_minima = int(I.land_.node_minima.size());
    s.mountains = int(I.forest_.mountains().size());
    s.centroid_depth = I.ct_.depth();
    return I;
}

Circle PolygonIndex::query(Point q, PolygonQueryInfo* info) const {
    const MedialAxisTree& m = *m_;
    PolygonQueryInfo local;
    PolygonQueryInfo& in = info ? *info : local;
    in = {};
    // also rejects points outside or on the boundary
    FaceHit hit = loc_.locate(m, q);
    ++in.probes;

    if (has_node_plica_) {
        ++in.probes;
        if (auto r = node_plica_.query(q)) {
            in.branch = PolygonBranch::NodeMec;
            int t = ct_.choose(m, node_of_circle_[*r], q, &in.probes);
            return ct_.nodes()[t].qic.query(m, forest_, q, &in.probes);
        }
    }
    if (has_valley_plica_) {
        ++in.probes;
        if (auto r = valley_plica_.query(q)) {
            in.branch = PolygonBranch::ValleyMec;
            const ValleyPoint& v = land_.valleys[*r];
            Circle a = forest_.qim(m, v.mountains[0], v.pos, q, &in.probes);
            Circle b = forest_.qim(m, v.mountains[1], v.pos, q, &in.probes);
            return a.radius >= b.radius ? a : b;
        }
    }
    in.branch = PolygonBranch::Locator;
    return forest_.qim(m, forest_.mountain_at(hit.pos), hit.pos, q, &in.probes);
}

std::size_t PolygonIndex::memory_bytes() const {
    std::size_t b = sizeof(*this) + forest_.memory_bytes() + loc_.memory_bytes() + ct_.memory_bytes();
    if (has_node_plica_) b += node_plica_.memory_bytes();
    if (has_valley_plica_) b += valley_plica_.memory_bytes();
    b += node_of_circle_.size() * sizeof(int) + land_.valleys.size() * sizeof(ValleyPoint);
    const MedialAxisTree& m = *m_;
    b += m.nodes().size() * sizeof(MANode) + m.polygon().pts.size() * sizeof(Point);
    for (const MAEdge& e : m.edges()) b += sizeof(MAEdge) + e.pieces.size() * sizeof(AxisPiece);
    return b;
}

Circle polygon_query(const PolygonIndex& idx, Point q) { return idx.query(q); }

Circle qim_query(const PolygonIndex& idx, int mountain, AxisPos from, Point q) {
    if (mountain < 0 || mountain >= int(idx.forest().mountains().size()))
        throw Error(ErrorCode::ValidationError, "no such mountain");
    if (!contains(idx.axis().mec(from), q))
        throw Error(ErrorCode::PromiseViolated, "the starting MEC does not contain the query point");
    return idx.forest().qim(idx.axis(), mountain, from, q);
}

ConvexIndex ConvexIndex::build(const std::vector<Point>& polygon) {
    ConvexIndex I;
    I.m_ = std::make_shared<MedialAxisTree>(MedialAxisTree::build(polygon));
    if (!is_convex_ccw(I.m_->polygon().pts)) throw Error(ErrorCode::NotConvex, "polygon is not convex");
    Landscape land = classify_valleys_peaks(*I.m_);
    I.forest_ = MountainForest::build(*I.m_, land);
    I.loc_ = FaceLocator::build(*I.m_);
    return I;
}

Circle ConvexIndex::query(Point q) const {
    FaceHit hit = loc_.locate(*m_, q);
    return forest_.qim(*m_, forest_.mountain_at(hit.pos), hit.pos, q);
}

std::size_t ConvexIndex::memory_bytes() const {
    std::size_t b = sizeof(*this) + forest_.memory_bytes() + loc_.memory_bytes();
    for (const MAEdge& e : m_->edges()) b += sizeof(MAEdge) + e.pieces.size() * sizeof(AxisPiece);
    return b + m_->nodes().size() * sizeof(MANode);
}

Circle convex_query(const ConvexIndex& idx, Point q) { return idx.query(q); }

}  // namespace qmec
