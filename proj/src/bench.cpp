#include <algorithm>
#include <chrono>
#include <cstdio>
#include <numeric>
#include <random>
#include <set>

#include "qmec/io.hpp"

namespace qmec {

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point t) { return std::chrono::duration<double, std::milli>(Clock::now() - t).count(); }

// Baseline: one guiding table per Voronoi vertex over the whole graph, found
// through a single PLiCA over all vertex MECs.
struct NaiveIndex {
    std::shared_ptr<VoronoiGraph> g;
    std::vector<EdgeFrame> frames;
    PointsQiC qic;
    PlicaIndex plica;

    static NaiveIndex build(const std::vector<Point>& sites, std::uint64_t seed) {
        NaiveIndex I;
        I.g = std::make_shared<VoronoiGraph>(VoronoiGraph::build(sites, seed));
        I.frames = edge_frames(*I.g);
        std::vector<int> all(I.g->vertices().size());
        std::iota(all.begin(), all.end(), 0);
        I.qic = PointsQiC::build({I.g.get(), &I.frames}, all, all);
        std::vector<Circle> cs;
        for (int v : all) cs.push_back(I.g->mec(v));
        I.plica = PlicaIndex::build(cs, seed);
        return I;
    }
    QueryResult query(Point q, int* probes) const {
        if (!g->inside_hull(q)) return QueryResult::unbounded_toward(g->outward_witness(q));
        *probes += 2;
        auto h = plica.query(q);
        if (!h) throw Error(ErrorCode::InternalError, "no vertex MEC contains the query");
        return QueryResult::of(qic.query({g.get(), &frames}, *h, q));
    }
    std::size_t bytes() const { return qic.memory_bytes() + plica.memory_bytes(); }
};

std::vector<Point> hull_queries(int m, std::mt19937_64& rng, const VoronoiGraph& g) {
    std::uniform_real_distribution<double> U(0, 1);
    std::vector<Point> out;
    while (int(out.size()) < m) {
        Point q{U(rng), U(rng)};
        if (g.inside_hull(q)) out.push_back(q);
    }
    return out;
}

}  // namespace

std::vector<Point> bench_sites(int n, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> U(0, 1);
    std::set<std::pair<double, double>> seen;
    std::vector<Point> s;
    while (int(s.size()) < n) {
        Point p{U(rng), U(rng)};
        if (seen.insert({p.x, p.y}).second) s.push_back(p);
    }
    return s;
}

std::vector<BenchRow> run_bench(const BenchOptions& opt) {
    std::vector<BenchRow> rows;
    for (int n : opt.sizes)
        for (int rep = 0; rep < opt.repetitions; ++rep) {
            const std::uint64_t seed = opt.seed * 1000003ull + std::uint64_t(n) * 7919ull + std::uint64_t(rep);
            const auto sites = bench_sites(n, seed);
            for (const std::string& st : opt.structures) {
                if (st == "naive" && n > opt.naive_limit) continue;
                BenchRow r;
                r.structure = st;
                r.n = n;
                r.rep = rep;
                r.seed = seed;
                std::vector<double> ns;
                std::vector<int> pr;
                std::mt19937_64 qrng(seed ^ 0x9e3779b97f4a7c15ull);
                auto timed = [&](auto&& f) {
                    auto t = Clock::now();
                    int p = f();
                    ns.push_back(std::chrono::duration<double, std::nano>(Clock::now() - t).count());
                    pr.push_back(p);
                };
                if (st == "naive") {
                    auto t = Clock::now();
                    NaiveIndex I = NaiveIndex::build(sites, seed);
                    r.build_ms = ms_since(t);
                    r.index_bytes = I.bytes();
                    for (Point q : hull_queries(opt.queries, qrng, *I.g))
                        timed([&] {
                            int p = 0;
                            I.query(q, &p);
                            return p;
                        });
                } else if (st == "base" || st == "gamma" || st == "rpart") {
                    PointsOptions po;
                    po.seed = seed;
                    po.gamma = st == "gamma";
                    po.rpart = st == "rpart";
                    auto t = Clock::now();
                    PointsIndex I = PointsIndex::build(sites, po);
                    r.build_ms = ms_since(t);
                    r.index_bytes = st == "base" ? I.base_bytes() : st == "gamma" ? I.base_bytes() + I.gamma_bytes()
                                                                                    : I.rpart_bytes();
                    for (Point q : hull_queries(opt.queries, qrng, I.graph()))
                        timed([&] {
                            ProbeCount pc;
                            if (st == "base") I.query(q, &pc);
                            else if (st == "gamma") I.gamma_query(q, &pc);
                            else I.rpart_query(q, &pc);
                            return pc.plica + pc.qic;
                        });
                } else {
                    throw Error(ErrorCode::ValidationError, "unknown structure '" + st + "'");
                }
                if (!ns.empty()) {
                    r.mean_query_ns = std::accumulate(ns.begin(), ns.end(), 0.0) / ns.size();
                    std::nth_element(ns.begin(), ns.begin() + ns.size() / 2, ns.end());
                    r.median_query_ns = ns[ns.size() / 2];
                    r.mean_probes = std::accumulate(pr.begin(), pr.end(), 0.0) / pr.size();
                    r.max_probes = *std::max_element(pr.begin(), pr.end());
                }
                rows.push_back(r);
            }
        }
    return rows;
}

std::string bench_csv_header() {
    return "structure,n,rep,seed,build_ms,index_bytes,mean_query_ns,median_query_ns,mean_probes,max_probes";
}

std::string bench_csv_row(const BenchRow& r) {
    char buf[320];
    std::snprintf(buf, sizeof buf, "%s,%d,%d,%llu,%.3f,%zu,%.1f,%.1f,%.4f,%d", r.structure.c_str(), r.n, r.rep,
                  static_cast<unsigned long long>(r.seed), r.build_ms, r.index_bytes, r.mean_query_ns,
                  r.median_query_ns, r.mean_probes, r.max_probes);
    return buf;
}

}  // namespace qmec
