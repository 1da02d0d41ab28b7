#include "dca/qdca.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "dca/errors.hpp"
#include "dca/rng.hpp"

namespace dca {

namespace {

constexpr double kTieRel = 1e-12;
constexpr double kCoverageSlack = 1e-12;

} // namespace

ComponentEdgeStats compute_component_edge_stats(const DistilledGraph& dg) {
    ComponentEdgeStats stats;
    stats.mean.resize(dg.n_components(), 0.0);
    stats.stddev.resize(dg.n_components(), 0.0);
    for (std::size_t c = 0; c < dg.n_components(); ++c) {
        const auto& edges = dg.component_edges(c);
        if (edges.empty()) continue;
        double sum = 0.0;
        for (const ComponentEdge& e : edges) sum += e.length;
        const double mean = sum / static_cast<double>(edges.size());
        double var = 0.0;
        for (const ComponentEdge& e : edges) var += (e.length - mean) * (e.length - mean);
        stats.mean[c] = mean;
        stats.stddev[c] = std::sqrt(var / static_cast<double>(edges.size()));
    }
    return stats;
}

QueryNeighborhood insert_query(const PointSet& reference, std::span<const double> query,
                               std::uint32_t query_id, const DistilledGraph& dg,
                               std::uint32_t rays, std::uint64_t seed, double coverage) {
    if (reference.size() != dg.n_vertices())
        throw DimMismatch("reference set does not match the distilled graph");
    return insert_query(reference, query, query_id, dg.component_map(), rays, seed, coverage);
}

QueryNeighborhood insert_query(const PointSet& reference, std::span<const double> query,
                               std::uint32_t query_id, std::span<const std::int32_t> component_of,
                               std::uint32_t rays, std::uint64_t seed, double coverage) {
    if (query.size() != reference.dim())
        throw DimMismatch("query dimension does not match the reference set");
    if (reference.size() != component_of.size())
        throw DimMismatch("reference set does not match the component map");
    if (reference.empty()) throw EmptyInput("empty reference set");

    const std::size_t dim = reference.dim();
    const std::size_t n = reference.size();

    // Candidates sorted by distance from the query; same scan-with-cutoff as
    // the graph build, with the query itself as ray origin.
    std::vector<std::uint32_t> ids(n);
    std::vector<double> dist2(n);
    for (std::uint32_t j = 0; j < n; ++j) {
        ids[j] = j;
        double s = 0.0;
        const auto pj = reference.point(j);
        for (std::size_t k = 0; k < dim; ++k) {
            const double d = pj[k] - query[k];
            s += d * d;
        }
        dist2[j] = s;
    }
    std::sort(ids.begin(), ids.end(), [&](std::uint32_t a, std::uint32_t b) {
        if (dist2[a] != dist2[b]) return dist2[a] < dist2[b];
        return a < b;
    });
    std::vector<double> sorted_dist2(n), sorted_dist(n), diffs(n * dim);
    for (std::size_t k = 0; k < n; ++k) {
        sorted_dist2[k] = dist2[ids[k]];
        sorted_dist[k] = std::sqrt(sorted_dist2[k]);
        const auto pj = reference.point(ids[k]);
        for (std::size_t c = 0; c < dim; ++c) diffs[k * dim + c] = pj[c] - query[c];
    }

    std::vector<std::uint32_t> counts(n, 0);
    std::vector<double> dir(dim);
    GaussianStream stream(seed, query_id, Philox4x32::kQueryDomain);
    for (std::uint32_t ray = 0; ray < rays; ++ray) {
        stream.fill_unit_direction(dir);
        double best_t = std::numeric_limits<double>::infinity();
        std::uint32_t best_id = std::numeric_limits<std::uint32_t>::max();
        for (std::size_t k = 0; k < n; ++k) {
            if (sorted_dist[k] > 2.0 * best_t * (1.0 + 2.0 * kTieRel)) break;
            const double* row = diffs.data() + k * dim;
            double proj = 0.0;
            for (std::size_t c = 0; c < dim; ++c) proj += dir[c] * row[c];
            if (proj <= 0.0) continue;
            const double t = sorted_dist2[k] / (2.0 * proj);
            if (t <= 0.0) continue;
            if (t < best_t * (1.0 - kTieRel)) {
                best_t = t;
                best_id = ids[k];
            } else if (t <= best_t * (1.0 + kTieRel) && ids[k] < best_id) {
                best_t = std::min(best_t, t);
                best_id = ids[k];
            }
        }
        if (best_id != std::numeric_limits<std::uint32_t>::max()) ++counts[best_id];
    }

    QueryNeighborhood out;
    out.query_id = query_id;
    for (std::uint32_t j = 0; j < n; ++j) {
        if (counts[j] == 0) continue;
        QueryEdge e;
        e.target = j;
        e.length = std::sqrt(dist2[j]);
        e.beta = static_cast<double>(counts[j]) / static_cast<double>(rays);
        e.component = component_of[j];
        out.edges.push_back(e);
    }
    std::sort(out.edges.begin(), out.edges.end(), [](const QueryEdge& a, const QueryEdge& b) {
        if (a.length != b.length) return a.length < b.length;
        return a.target < b.target;
    });

    if (coverage < 1.0) {
        if (!(coverage >= 0.0)) throw InvalidCoverage("sphere coverage must lie in [0, 1)");
        double total = 0.0;
        for (const QueryEdge& e : out.edges) total += e.beta;
        const double threshold = std::min(coverage, total - kCoverageSlack);
        double acc = 0.0;
        std::size_t kept = 0;
        for (const QueryEdge& e : out.edges) {
            ++kept;
            acc += e.beta;
            if (acc > threshold) break;
        }
        out.edges.resize(kept);
    }
    return out;
}

QueryVerdict evaluate_query(const QueryNeighborhood& neighborhood,
                            const ComponentEdgeStats& stats,
                            const std::vector<bool>& fundamental) {
    if (neighborhood.edges.empty())
        throw EmptyNeighborhood("query produced no neighborhood edges");
    if (stats.mean.size() != fundamental.size())
        throw DimMismatch("component statistics do not match the fundamental flags");

    QueryVerdict v;
    v.query_id = neighborhood.query_id;

    // option 1 + 2: edges are sorted by (length, target), front is the winner
    const QueryEdge& closest = neighborhood.edges.front();
    v.closest_vertex = closest.target;
    v.closest_length = closest.length;
    v.closest_component = closest.component;

    // option 3: count typical edges per fundamental component
    for (const QueryEdge& e : neighborhood.edges) {
        if (e.component < 0) continue; // outlier vertices never carry typical edges
        const auto c = static_cast<std::size_t>(e.component);
        if (!fundamental[c]) continue;
        if (e.length > stats.mean[c] + stats.stddev[c]) continue;
        auto it = std::find_if(v.typical.begin(), v.typical.end(),
                               [&](const TypicalTally& t) { return t.component == e.component; });
        if (it == v.typical.end()) {
            v.typical.push_back({e.component, 1, e.length});
        } else {
            ++it->count;
            it->min_length = std::min(it->min_length, e.length);
        }
    }
    std::sort(v.typical.begin(), v.typical.end(),
              [](const TypicalTally& a, const TypicalTally& b) { return a.component < b.component; });

    if (v.typical.empty()) return v;

    if (v.typical.size() == 1) {
        v.conservative = v.typical.front().component;
        v.flexible = v.conservative;
        return v;
    }

    // flexible: the component holding the shortest typical edge also needs
    // the (possibly tied) maximum tally
    std::uint32_t max_count = 0;
    for (const TypicalTally& t : v.typical) max_count = std::max(max_count, t.count);
    const TypicalTally* shortest = &v.typical.front();
    for (const TypicalTally& t : v.typical) {
        if (t.min_length < shortest->min_length) shortest = &t;
    }
    if (shortest->count == max_count) v.flexible = shortest->component;
    return v;
}

std::vector<bool> fundamental_flags(const std::vector<ComponentScore>& scores,
                                    bool reference_mode) {
    std::vector<bool> flags(scores.size());
    for (std::size_t c = 0; c < scores.size(); ++c)
        flags[c] = reference_mode || scores[c].fundamental;
    return flags;
}

} // namespace dca
