#include "dca/delaunay.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <unordered_map>

#include "dca/errors.hpp"
#include "dca/rng.hpp"
#include "dca/util.hpp"

namespace dca {

namespace {

constexpr double kTieRel = 1e-12;

double dot(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) s += a[k] * b[k];
    return s;
}

double distance(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) {
        const double d = a[k] - b[k];
        s += d * d;
    }
    return std::sqrt(s);
}

// Running minimum with the deterministic tie rule: strictly smaller t wins,
// near-equal t (1e-12 relative) goes to the smaller target id.
struct BestHit {
    double t = std::numeric_limits<double>::infinity();
    std::uint32_t target = std::numeric_limits<std::uint32_t>::max();

    bool found() const { return target != std::numeric_limits<std::uint32_t>::max(); }

    void consider(double t_cand, std::uint32_t id) {
        if (t_cand < t * (1.0 - kTieRel)) {
            t = t_cand;
            target = id;
        } else if (t_cand <= t * (1.0 + kTieRel) && id < target) {
            t = std::min(t, t_cand);
            target = id;
        }
    }
};

std::vector<double> make_witness(std::span<const double> origin, std::span<const double> dir,
                                 double t) {
    std::vector<double> w(origin.size());
    for (std::size_t k = 0; k < w.size(); ++k) w[k] = origin[k] + t * dir[k];
    return w;
}

// Candidate table for one ray origin: differences to every candidate point,
// sorted by distance so the per-ray scan can stop as soon as no farther
// candidate can produce a smaller crossing (t >= |d|/2 always).
struct CandidateTable {
    std::size_t dim = 0;
    std::vector<std::uint32_t> ids;
    std::vector<double> diffs; // row k = points[ids[k]] - origin
    std::vector<double> dist2;
    std::vector<double> dist;

    void build(const PointSet& points, std::span<const double> origin, std::uint32_t skip_id) {
        dim = points.dim();
        const std::size_t n = points.size();
        ids.clear();
        dist2.clear();
        for (std::uint32_t j = 0; j < n; ++j) {
            if (j == skip_id) continue;
            double s = 0.0;
            const auto pj = points.point(j);
            for (std::size_t k = 0; k < dim; ++k) {
                const double d = pj[k] - origin[k];
                s += d * d;
            }
            ids.push_back(j);
            dist2.push_back(s);
        }
        std::vector<std::uint32_t> order(ids.size());
        std::iota(order.begin(), order.end(), 0u);
        std::sort(order.begin(), order.end(), [&](std::uint32_t a, std::uint32_t b) {
            if (dist2[a] != dist2[b]) return dist2[a] < dist2[b];
            return ids[a] < ids[b];
        });

        std::vector<std::uint32_t> sorted_ids(ids.size());
        std::vector<double> sorted_dist2(ids.size());
        diffs.resize(ids.size() * dim);
        dist.resize(ids.size());
        for (std::size_t k = 0; k < order.size(); ++k) {
            const std::uint32_t src = order[k];
            sorted_ids[k] = ids[src];
            sorted_dist2[k] = dist2[src];
            dist[k] = std::sqrt(dist2[src]);
            const auto pj = points.point(ids[src]);
            for (std::size_t c = 0; c < dim; ++c) diffs[k * dim + c] = pj[c] - origin[c];
        }
        ids = std::move(sorted_ids);
        dist2 = std::move(sorted_dist2);
    }

    BestHit scan(std::span<const double> dir) const {
        BestHit best;
        for (std::size_t k = 0; k < ids.size(); ++k) {
            if (dist[k] > 2.0 * best.t * (1.0 + 2.0 * kTieRel)) break;
            const double* row = diffs.data() + k * dim;
            double proj = 0.0;
            for (std::size_t c = 0; c < dim; ++c) proj += dir[c] * row[c];
            if (proj <= 0.0) continue;
            const double t = dist2[k] / (2.0 * proj);
            if (t > 0.0) best.consider(t, ids[k]);
        }
        return best;
    }
};

struct OrderedTally {
    std::uint32_t source = 0;
    std::uint32_t target = 0;
    std::uint32_t count = 0;
};

} // namespace

bool witness_is_sound(const PointSet& points, const RayHit& hit) {
    const std::span<const double> w(hit.witness);
    double norm = 0.0;
    for (double v : w) norm += v * v;
    const double tau = 1e-9 * (1.0 + std::sqrt(norm));

    const double d_source = distance(w, points.point(hit.source));
    const double d_target = distance(w, points.point(hit.target));
    if (std::abs(d_source - d_target) > tau) return false;
    for (std::uint32_t k = 0; k < points.size(); ++k) {
        if (distance(w, points.point(k)) < d_source - tau) return false;
    }
    return true;
}

std::optional<RayHit> cast_ray(const PointSet& points, std::uint32_t source,
                               std::span<const double> direction) {
    if (direction.size() != points.dim())
        throw DimMismatch("ray direction dimension does not match the point set");
    const double norm = std::sqrt(dot(direction, direction));
    if (std::abs(norm - 1.0) > 1e-12)
        throw InternalError("cast_ray requires a unit direction");

    const auto origin = points.point(source);
    BestHit best;
    std::vector<double> diff(points.dim());
    for (std::uint32_t j = 0; j < points.size(); ++j) {
        if (j == source) continue;
        const auto pj = points.point(j);
        double proj = 0.0;
        double d2 = 0.0;
        for (std::size_t k = 0; k < diff.size(); ++k) {
            const double d = pj[k] - origin[k];
            proj += direction[k] * d;
            d2 += d * d;
        }
        if (proj <= 0.0) continue;
        const double t = d2 / (2.0 * proj);
        if (t > 0.0) best.consider(t, j);
    }
    if (!best.found()) return std::nullopt;
    return RayHit{source, best.target, best.t, make_witness(origin, direction, best.t)};
}

ApproxDelaunayGraph build_graph(const PointSet& points, std::uint32_t rays_per_vertex,
                                std::uint64_t seed, unsigned workers) {
    const std::size_t n = points.size();
    if (n < 2) throw TooFewPoints("graph construction needs at least 2 points");
    if (rays_per_vertex < 1) throw InternalError("rays_per_vertex must be >= 1");

    const unsigned n_workers = detail::resolve_workers(workers);

    struct WorkerState {
        CandidateTable table;
        std::vector<double> dir;
        std::vector<std::uint32_t> counts;  // dense per-target tally
        std::vector<std::uint32_t> touched; // targets hit for the current source
        std::vector<OrderedTally> tallies;
        std::vector<RayHit> witnesses;
    };
    std::vector<WorkerState> states(n_workers);
    for (auto& s : states) {
        s.dir.resize(points.dim());
        s.counts.assign(n, 0);
    }
    std::vector<std::uint32_t> unbounded(n, 0);

    detail::parallel_for(0, n, n_workers, [&](unsigned worker, std::size_t source) {
        WorkerState& st = states[worker];
        const auto origin = points.point(source);
        st.table.build(points, origin, static_cast<std::uint32_t>(source));
        st.touched.clear();

        GaussianStream stream(seed, source, Philox4x32::kVertexDomain);
        std::uint32_t misses = 0;
        for (std::uint32_t ray = 0; ray < rays_per_vertex; ++ray) {
            stream.fill_unit_direction(st.dir);
            const BestHit best = st.table.scan(st.dir);
            if (!best.found()) {
                ++misses;
                continue;
            }
            if (st.counts[best.target]++ == 0) {
                st.touched.push_back(best.target);
                RayHit hit{static_cast<std::uint32_t>(source), best.target, best.t,
                           make_witness(origin, st.dir, best.t)};
                if (!witness_is_sound(points, hit))
                    throw InternalError("ray hit failed the Voronoi boundary check");
                st.witnesses.push_back(std::move(hit));
            }
        }
        unbounded[source] = misses;

        std::sort(st.touched.begin(), st.touched.end());
        for (std::uint32_t target : st.touched) {
            st.tallies.push_back({static_cast<std::uint32_t>(source), target, st.counts[target]});
            st.counts[target] = 0;
        }
    });

    std::unordered_map<std::uint64_t, std::size_t> edge_index;
    std::vector<GraphEdge> edges;
    std::vector<RayHit> witnesses;
    for (auto& st : states) {
        for (const OrderedTally& tally : st.tallies) {
            const std::uint32_t a = std::min(tally.source, tally.target);
            const std::uint32_t b = std::max(tally.source, tally.target);
            const std::uint64_t key = (static_cast<std::uint64_t>(a) << 32) | b;
            auto [it, inserted] = edge_index.try_emplace(key, edges.size());
            if (inserted) {
                GraphEdge e;
                e.i = a;
                e.j = b;
                e.length = distance(points.point(a), points.point(b));
                if (!(e.length > 0.0))
                    throw InternalError("zero-length edge escaped the positivity rule");
                edges.push_back(e);
            }
            GraphEdge& e = edges[it->second];
            if (tally.source == e.i)
                e.hits_ij += tally.count;
            else
                e.hits_ji += tally.count;
        }
        witnesses.insert(witnesses.end(), std::make_move_iterator(st.witnesses.begin()),
                         std::make_move_iterator(st.witnesses.end()));
    }
    std::sort(edges.begin(), edges.end(), [](const GraphEdge& a, const GraphEdge& b) {
        return a.i != b.i ? a.i < b.i : a.j < b.j;
    });
    std::sort(witnesses.begin(), witnesses.end(), [](const RayHit& a, const RayHit& b) {
        return a.source != b.source ? a.source < b.source : a.target < b.target;
    });

    return ApproxDelaunayGraph(n, points.dim(), rays_per_vertex, std::move(edges),
                               std::move(unbounded), std::move(witnesses));
}

ApproxDelaunayGraph::ApproxDelaunayGraph(std::size_t n_vertices, std::size_t dim,
                                         std::uint32_t rays_per_vertex,
                                         std::vector<GraphEdge> edges,
                                         std::vector<std::uint32_t> unbounded_hits,
                                         std::vector<RayHit> witnesses)
    : dim_(dim),
      rays_per_vertex_(rays_per_vertex),
      edges_(std::move(edges)),
      unbounded_hits_(std::move(unbounded_hits)),
      witnesses_(std::move(witnesses)) {
    if (unbounded_hits_.size() != n_vertices)
        throw InternalError("unbounded tally size does not match vertex count");
    for (const GraphEdge& e : edges_) {
        if (e.i >= n_vertices || e.j >= n_vertices || e.i == e.j)
            throw InternalError("edge endpoints out of range");
        if (e.hits_ij + e.hits_ji == 0)
            throw InternalError("edge with no supporting ray hits");
    }

    adj_offsets_.assign(n_vertices + 1, 0);
    for (const GraphEdge& e : edges_) {
        ++adj_offsets_[e.i + 1];
        ++adj_offsets_[e.j + 1];
    }
    for (std::size_t v = 0; v < n_vertices; ++v) adj_offsets_[v + 1] += adj_offsets_[v];
    adjacency_.resize(adj_offsets_.back());
    std::vector<std::size_t> cursor(adj_offsets_.begin(), adj_offsets_.end() - 1);
    for (std::uint32_t idx = 0; idx < edges_.size(); ++idx) {
        adjacency_[cursor[edges_[idx].i]++] = idx;
        adjacency_[cursor[edges_[idx].j]++] = idx;
    }
}

ApproxDelaunayGraph filter_by_sphere_coverage(const ApproxDelaunayGraph& g, double coverage) {
    if (!(coverage >= 0.0) || coverage >= 1.0)
        throw InvalidCoverage("sphere coverage must lie in [0, 1)");
    constexpr double kCoverageSlack = 1e-12;

    std::vector<char> keep(g.n_edges(), 0);
    std::vector<std::uint32_t> incident;
    for (std::size_t v = 0; v < g.n_vertices(); ++v) {
        const auto span = g.incident_edges(v);
        incident.assign(span.begin(), span.end());
        std::sort(incident.begin(), incident.end(), [&](std::uint32_t a, std::uint32_t b) {
            const GraphEdge& ea = g.edges()[a];
            const GraphEdge& eb = g.edges()[b];
            if (ea.length != eb.length) return ea.length < eb.length;
            const std::uint32_t other_a = ea.i == v ? ea.j : ea.i;
            const std::uint32_t other_b = eb.i == v ? eb.j : eb.i;
            return other_a < other_b;
        });

        double total = 0.0;
        for (std::uint32_t idx : incident)
            total += g.beta_from(g.edges()[idx], static_cast<std::uint32_t>(v));
        const double threshold = std::min(coverage, total - kCoverageSlack);

        double acc = 0.0;
        for (std::uint32_t idx : incident) {
            keep[idx] = 1;
            acc += g.beta_from(g.edges()[idx], static_cast<std::uint32_t>(v));
            if (acc > threshold) break;
        }
    }

    std::vector<GraphEdge> kept_edges;
    for (std::size_t idx = 0; idx < g.n_edges(); ++idx)
        if (keep[idx]) kept_edges.push_back(g.edges()[idx]);

    std::vector<RayHit> kept_witnesses;
    {
        std::unordered_map<std::uint64_t, char> kept_pairs;
        for (const GraphEdge& e : kept_edges)
            kept_pairs.emplace((static_cast<std::uint64_t>(e.i) << 32) | e.j, 1);
        for (const RayHit& hit : g.witnesses()) {
            const std::uint32_t a = std::min(hit.source, hit.target);
            const std::uint32_t b = std::max(hit.source, hit.target);
            if (kept_pairs.count((static_cast<std::uint64_t>(a) << 32) | b))
                kept_witnesses.push_back(hit);
        }
    }

    std::vector<std::uint32_t> unbounded(g.n_vertices());
    for (std::size_t v = 0; v < g.n_vertices(); ++v)
        unbounded[v] = g.unbounded_hits(v);

    return ApproxDelaunayGraph(g.n_vertices(), g.dim(), g.rays_per_vertex(),
                               std::move(kept_edges), std::move(unbounded),
                               std::move(kept_witnesses));
}

} // namespace dca
