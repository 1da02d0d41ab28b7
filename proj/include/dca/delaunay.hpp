#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "dca/pointset.hpp"

namespace dca {

/// One recorded crossing of a Voronoi-cell boundary: the ray from
/// `source` first leaves its cell through the bisector shared with
/// `target`, at parameter `t`, in the point `witness`.
struct RayHit {
    std::uint32_t source = 0;
    std::uint32_t target = 0;
    double t = 0.0;
    std::vector<double> witness;
};

struct GraphEdge {
    std::uint32_t i = 0; // i < j
    std::uint32_t j = 0;
    double length = 0.0;
    std::uint32_t hits_ij = 0; // rays cast from i that exited through j's bisector
    std::uint32_t hits_ji = 0;
};

/// Neighbor graph discovered by casting `rays_per_vertex` random rays from
/// every vertex and recording the nearest bisector each ray crosses. Edge
/// direction fractions hits/T estimate the solid angle of the shared Voronoi
/// face as seen from each endpoint.
class ApproxDelaunayGraph {
public:
    ApproxDelaunayGraph(std::size_t n_vertices, std::size_t dim, std::uint32_t rays_per_vertex,
                        std::vector<GraphEdge> edges, std::vector<std::uint32_t> unbounded_hits,
                        std::vector<RayHit> witnesses);

    std::size_t n_vertices() const { return unbounded_hits_.size(); }
    std::size_t dim() const { return dim_; }
    std::uint32_t rays_per_vertex() const { return rays_per_vertex_; }

    const std::vector<GraphEdge>& edges() const { return edges_; }
    std::size_t n_edges() const { return edges_.size(); }

    double beta_from(const GraphEdge& e, std::uint32_t vertex) const {
        const std::uint32_t hits = (vertex == e.i) ? e.hits_ij : e.hits_ji;
        return static_cast<double>(hits) / static_cast<double>(rays_per_vertex_);
    }

    std::uint32_t unbounded_hits(std::size_t v) const { return unbounded_hits_[v]; }
    double unbounded_fraction(std::size_t v) const {
        return static_cast<double>(unbounded_hits_[v]) / static_cast<double>(rays_per_vertex_);
    }

    /// Indices into edges() incident to v, ascending by edge index.
    std::span<const std::uint32_t> incident_edges(std::size_t v) const {
        return {adjacency_.data() + adj_offsets_[v], adj_offsets_[v + 1] - adj_offsets_[v]};
    }

    /// First recorded hit per discovered (source, target) direction.
    const std::vector<RayHit>& witnesses() const { return witnesses_; }

private:
    std::size_t dim_ = 0;
    std::uint32_t rays_per_vertex_ = 0;
    std::vector<GraphEdge> edges_;
    std::vector<std::uint32_t> unbounded_hits_;
    std::vector<RayHit> witnesses_;
    std::vector<std::size_t> adj_offsets_;
    std::vector<std::uint32_t> adjacency_;
};

/// Follows a single ray from points[source] to the boundary of its Voronoi
/// cell: among all j with a positive projection of z_j - z_source onto the
/// direction, returns the smallest-parameter bisector crossing, or nothing
/// when the cell is unbounded along the ray. Ties within 1e-12 relative
/// resolve to the smaller target id. `direction` must have unit norm.
std::optional<RayHit> cast_ray(const PointSet& points, std::uint32_t source,
                               std::span<const double> direction);

/// Casts `rays_per_vertex` rays from every vertex (per-vertex counter-based
/// streams keyed by the seed, so results are identical for any worker count)
/// and assembles the discovered edge set. Every first discovery of an edge
/// direction is witness-checked online; a failed check is an InternalError.
ApproxDelaunayGraph build_graph(const PointSet& points, std::uint32_t rays_per_vertex,
                                std::uint64_t seed, unsigned workers = 0);

/// Per-vertex sphere-coverage pruning: each vertex keeps its shortest incident
/// edges until their cumulative direction fraction first strictly exceeds
/// min(coverage, total - 1e-12); an edge survives when either endpoint keeps
/// it. Requires 0 <= coverage < 1 (1.0 means "do not call this at all").
ApproxDelaunayGraph filter_by_sphere_coverage(const ApproxDelaunayGraph& g, double coverage);

/// True when the hit satisfies both boundary-point conditions: equidistance
/// to source and target, and no other point strictly closer, within
/// tau = 1e-9 * (1 + |witness|).
bool witness_is_sound(const PointSet& points, const RayHit& hit);

} // namespace dca
