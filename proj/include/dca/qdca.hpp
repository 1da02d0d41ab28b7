#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "dca/distill.hpp"
#include "dca/pointset.hpp"
#include "dca/scores.hpp"

namespace dca {

/// Component index constants for query edges and assignments.
inline constexpr std::int32_t kOutlierVertex = -1;
inline constexpr std::int32_t kUnassigned = -1;

struct QueryEdge {
    std::uint32_t target = 0;   // reference vertex id
    double length = 0.0;        // |q - z_target|
    double beta = 0.0;          // fraction of the query's rays that found it
    std::int32_t component = kOutlierVertex;
};

/// Edges a single query point would acquire in the reference graph, found by
/// ray casting inside the query's own Voronoi cell. Queries never see each
/// other.
struct QueryNeighborhood {
    std::uint32_t query_id = 0;
    std::vector<QueryEdge> edges; // ascending by (length, target)
};

/// Mean and population standard deviation of edge lengths per component.
struct ComponentEdgeStats {
    std::vector<double> mean;
    std::vector<double> stddev;
};

ComponentEdgeStats compute_component_edge_stats(const DistilledGraph& dg);

struct TypicalTally {
    std::int32_t component = 0;
    std::uint32_t count = 0;
    double min_length = 0.0;
};

struct QueryVerdict {
    std::uint32_t query_id = 0;
    // option 1/2: nearest discovered reference point and the edge length to it
    std::uint32_t closest_vertex = 0;
    double closest_length = 0.0;
    std::int32_t closest_component = kOutlierVertex;
    // option 3: typical-edge tallies and the two assignment strategies
    std::vector<TypicalTally> typical;
    std::int32_t conservative = kUnassigned;
    std::int32_t flexible = kUnassigned;
};

/// Casts `rays` rays from the query against the reference points (stream
/// keyed by seed and query id, independent of any other query) and collects
/// every distinct nearest-bisector target as a neighborhood edge. When
/// coverage < 1 the neighborhood is pruned by the same shortest-prefix rule
/// as graph edges.
QueryNeighborhood insert_query(const PointSet& reference, std::span<const double> query,
                               std::uint32_t query_id, const DistilledGraph& dg,
                               std::uint32_t rays, std::uint64_t seed, double coverage = 1.0);

/// Same, with the vertex-to-component map given directly (as when the
/// distillation was loaded from a build artifact).
QueryNeighborhood insert_query(const PointSet& reference, std::span<const double> query,
                               std::uint32_t query_id, std::span<const std::int32_t> component_of,
                               std::uint32_t rays, std::uint64_t seed, double coverage = 1.0);

/// Applies the three processing options. A typical edge targets a fundamental
/// component and is no longer than that component's mean + stddev edge
/// length. Conservative assignment requires all typical edges to agree;
/// flexible assignment additionally accepts the component holding both the
/// most typical edges and the shortest one. Throws EmptyNeighborhood when the
/// neighborhood has no edges.
QueryVerdict evaluate_query(const QueryNeighborhood& neighborhood,
                            const ComponentEdgeStats& stats,
                            const std::vector<bool>& fundamental);

/// Fundamental flags per component. With evaluation points present these are
/// the threshold checks from the component scores; a pure-reference context
/// treats every component as fundamental.
std::vector<bool> fundamental_flags(const std::vector<ComponentScore>& scores,
                                    bool reference_mode);

} // namespace dca
