#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "dca/distill.hpp"
#include "dca/pointset.hpp"
#include "dca/scores.hpp"

namespace dca::oracle {

/// Exact planar Delaunay triangulation (incremental Bowyer-Watson). Input
/// must be in general position; exact cocircular or exactly coincident
/// configurations raise DegenerateInput. Returns the unordered edge set.
std::vector<std::pair<std::uint32_t, std::uint32_t>> exact_delaunay_2d(const PointSet& points);

/// Spanning-forest weight by Prim's algorithm over an explicit edge list,
/// kept deliberately separate from the production Kruskal path.
double prim_forest_weight(std::size_t n_vertices,
                          const std::vector<ForestEdge>& edges);

/// Recomputes every global score by naive enumeration, independent of the
/// scores module arithmetic.
GlobalScores brute_force_scores(const DistilledGraph& dg,
                                const std::vector<Membership>& membership, double eta_c,
                                double eta_q);

struct SyntheticSpec {
    std::uint32_t n_clusters = 7;
    std::uint32_t points_per_cluster = 500;
    std::uint32_t dim = 2;
    double cluster_std = 1.0;
    double center_separation = 20.0; // minimum pairwise distance, in multiples of cluster_std
    std::uint64_t seed = 0;
    /// Per-cluster thinning of the reference side: fraction of points to
    /// discard, in [0, 1). Shorter vectors leave trailing clusters unthinned.
    std::vector<double> ref_thinning;
    /// Clusters to emit on each side; empty means all.
    std::vector<std::uint32_t> ref_clusters;
    std::vector<std::uint32_t> eval_clusters;
    /// false produces a reference-only dataset.
    bool make_eval = true;
};

struct SyntheticData {
    PointSet reference;
    PointSet evaluation;
    std::vector<std::uint32_t> reference_labels;
    std::vector<std::uint32_t> evaluation_labels;
    std::vector<std::vector<double>> centers;
};

/// Gaussian clusters at rejection-sampled mutually separated centers; the two
/// sides share centers but draw independent points. Deterministic per seed.
SyntheticData generate(const SyntheticSpec& spec);

} // namespace dca::oracle
