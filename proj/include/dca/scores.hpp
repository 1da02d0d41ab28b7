#pragma once

#include <cstdint>
#include <vector>

#include "dca/distill.hpp"
#include "dca/pointset.hpp"

namespace dca {

/// Per-component alignment scores. Consistency measures the balance between
/// reference and evaluation vertex counts, quality the share of edges joining
/// the two sets. A component passing both thresholds is fundamental.
struct ComponentScore {
    std::uint32_t component = 0;
    std::uint32_t n_ref = 0;
    std::uint32_t n_eval = 0;
    std::uint64_t edges_rr = 0;
    std::uint64_t edges_ee = 0;
    std::uint64_t edges_re = 0;
    double consistency = 0.0;
    double quality = 0.0;
    bool fundamental = false;
};

struct GlobalScores {
    double network_consistency = 0.0;
    double network_quality = 0.0;
    double precision = 0.0;
    double recall = 0.0;
    std::uint32_t num_components = 0;
    std::uint32_t num_fundamental = 0;
    double largest_component_relative_size = 0.0;
};

/// Scores every component, in the distilled graph's canonical order
/// (size descending, then smallest vertex id). Thresholds must lie in [0, 1).
std::vector<ComponentScore> score_components(const DistilledGraph& dg,
                                             const std::vector<Membership>& membership,
                                             double eta_c, double eta_q);

/// Network-level scores over the union of all components, plus precision and
/// recall: the fractions of all evaluation (resp. reference) points input to
/// the pipeline that ended up inside fundamental components. Outliers count
/// in the denominators and never in the numerators.
GlobalScores score_global(const DistilledGraph& dg, const std::vector<Membership>& membership,
                          const std::vector<ComponentScore>& component_scores);

} // namespace dca
