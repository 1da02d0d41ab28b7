#pragma once

#include <filesystem>
#include <optional>
#include <string>

#include <json.hpp>

#include "dca/delaunay.hpp"
#include "dca/distill.hpp"
#include "dca/pointset.hpp"
#include "dca/qdca.hpp"
#include "dca/scores.hpp"

namespace dca {

struct RunParams {
    std::uint32_t rays = 10000;
    double coverage = 1.0; // 1.0 skips edge filtering entirely
    std::uint32_t mcs = 10;
    double eta_c = 0.0;
    double eta_q = 0.0;
    std::uint64_t seed = 0;
    unsigned workers = 0; // 0 = all available cores
};

struct RunTimings {
    double approx_graph_s = 0.0;
    double filter_graph_s = 0.0;
    double distill_s = 0.0;
    double analyse_s = 0.0;
    double total_s = 0.0;
};

struct RunResult {
    ApproxDelaunayGraph graph; // post-filter when coverage < 1
    DistilledGraph distilled;
    std::vector<ComponentScore> component_scores;
    GlobalScores global;
    RunTimings timings;
    std::size_t edges_before_filter = 0;
    std::size_t edges_after_filter = 0;
};

/// The full pass: approximate the neighbor graph, optionally prune it by
/// sphere coverage, distill it into components and score them.
RunResult run_pipeline(const PointSet& merged, const RunParams& params);

/// Same pass starting from an already-built (unfiltered) graph, as used when
/// re-clustering a cached graph.
RunResult run_pipeline_from_graph(ApproxDelaunayGraph graph, const PointSet& merged,
                                  const RunParams& params);

nlohmann::json report_json(const RunResult& result, const RunParams& params,
                           const PointSet& merged);

nlohmann::json distilled_json(const DistilledGraph& dg);

nlohmann::json stats_json(const DistilledGraph& dg, const std::vector<ComponentScore>& scores,
                          const ComponentEdgeStats& stats, bool reference_mode, double eta_c,
                          double eta_q);

/// Reference context persisted by `build` and consumed by `query`: the
/// points, the raw graph, the component partition and per-component edge
/// statistics.
struct Artifact {
    PointSet points;
    std::vector<std::int32_t> component_of;
    std::size_t n_components = 0;
    ComponentEdgeStats stats;
    std::vector<bool> fundamental;
    nlohmann::json params;
};

void save_artifact(const std::filesystem::path& dir, const PointSet& points,
                   const ApproxDelaunayGraph& raw_graph, const RunResult& result,
                   const RunParams& params, bool reference_mode);

/// Loads everything `query` needs; the cached graph itself is read separately
/// (load_graph on graph.dcag) by the re-distillation path.
Artifact load_artifact(const std::filesystem::path& dir);

std::filesystem::path artifact_graph_path(const std::filesystem::path& dir);
std::filesystem::path artifact_points_path(const std::filesystem::path& dir);

nlohmann::json query_record_json(const QueryVerdict& verdict);

} // namespace dca
