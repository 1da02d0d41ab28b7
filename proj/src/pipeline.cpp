#include "dca/pipeline.hpp"

#include <fstream>

#include "dca/errors.hpp"
#include "dca/io.hpp"
#include "dca/util.hpp"

namespace dca {

namespace {

using nlohmann::json;

json global_json(const GlobalScores& g) {
    return json{{"c", g.network_consistency},
                {"q", g.network_quality},
                {"precision", g.precision},
                {"recall", g.recall},
                {"num_components", g.num_components},
                {"num_fundamental", g.num_fundamental},
                {"largest_component_relative_size", g.largest_component_relative_size}};
}

json component_json(const ComponentScore& s) {
    return json{{"index", s.component}, {"n_ref", s.n_ref},
                {"n_eval", s.n_eval},   {"edges_rr", s.edges_rr},
                {"edges_ee", s.edges_ee}, {"edges_re", s.edges_re},
                {"c", s.consistency},   {"q", s.quality},
                {"fundamental", s.fundamental}};
}

json params_json(const RunParams& p) {
    return json{{"T", p.rays},   {"B", p.coverage}, {"mcs", p.mcs},
                {"eta_c", p.eta_c}, {"eta_q", p.eta_q}, {"seed", p.seed}};
}

void write_json_file(const json& j, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw ParseError("cannot open " + path.string() + " for writing");
    out << j.dump(2) << '\n';
    if (!out) throw ParseError("failed writing " + path.string());
}

json read_json_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw MissingArtifact("cannot open " + path.string());
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw ParseError(path.string() + ": " + e.what());
    }
    return j;
}

} // namespace

RunResult run_pipeline(const PointSet& merged, const RunParams& params) {
    detail::Stopwatch total;
    detail::Stopwatch phase;
    ApproxDelaunayGraph graph = build_graph(merged, params.rays, params.seed, params.workers);
    const double approx_s = phase.seconds();

    RunResult result = run_pipeline_from_graph(std::move(graph), merged, params);
    result.timings.approx_graph_s = approx_s;
    result.timings.total_s = total.seconds();
    return result;
}

RunResult run_pipeline_from_graph(ApproxDelaunayGraph graph, const PointSet& merged,
                                  const RunParams& params) {
    if (merged.size() != graph.n_vertices() || merged.dim() != graph.dim())
        throw DimMismatch("point set does not match the graph");

    detail::Stopwatch total;
    RunTimings timings;
    const std::size_t edges_before = graph.n_edges();

    detail::Stopwatch phase;
    if (params.coverage < 1.0) {
        graph = filter_by_sphere_coverage(graph, params.coverage);
        timings.filter_graph_s = phase.seconds();
    }
    const std::size_t edges_after = graph.n_edges();

    phase.restart();
    DistilledGraph distilled = distill(graph, params.mcs);
    timings.distill_s = phase.seconds();

    phase.restart();
    std::vector<ComponentScore> component_scores =
        score_components(distilled, merged.memberships(), params.eta_c, params.eta_q);
    GlobalScores global = score_global(distilled, merged.memberships(), component_scores);
    timings.analyse_s = phase.seconds();
    timings.total_s = total.seconds();

    return RunResult{std::move(graph),  std::move(distilled), std::move(component_scores),
                     global,            timings,              edges_before,
                     edges_after};
}

json report_json(const RunResult& result, const RunParams& params, const PointSet& merged) {
    json components = json::array();
    for (const ComponentScore& s : result.component_scores) components.push_back(component_json(s));

    return json{
        {"global", global_json(result.global)},
        {"components", components},
        {"params", params_json(params)},
        {"input",
         {{"n_ref", merged.count(Membership::Ref)},
          {"n_eval", merged.count(Membership::Eval)},
          {"dim", merged.dim()}}},
        {"graph",
         {{"edges_approx", result.edges_before_filter},
          {"edges_filtered", result.edges_after_filter},
          {"edges_distilled", [&] {
               std::size_t total = 0;
               for (std::size_t c = 0; c < result.distilled.n_components(); ++c)
                   total += result.distilled.component_edges(c).size();
               return total;
           }()},
          {"outliers", result.distilled.outliers().size()}}},
        {"timings",
         {{"approx_graph_s", result.timings.approx_graph_s},
          {"filter_graph_s", result.timings.filter_graph_s},
          {"distill_s", result.timings.distill_s},
          {"analyse_s", result.timings.analyse_s},
          {"total_s", result.timings.total_s}}}};
}

json distilled_json(const DistilledGraph& dg) {
    json components = json::array();
    for (std::size_t c = 0; c < dg.n_components(); ++c) {
        components.push_back(json{{"index", c},
                                  {"size", dg.component(c).size()},
                                  {"vertices", dg.component(c)},
                                  {"edge_count", dg.component_edges(c).size()}});
    }
    return json{{"n_vertices", dg.n_vertices()},
                {"mcs", dg.mcs()},
                {"components", components},
                {"outliers", dg.outliers()}};
}

json stats_json(const DistilledGraph& dg, const std::vector<ComponentScore>& scores,
                const ComponentEdgeStats& stats, bool reference_mode, double eta_c,
                double eta_q) {
    const std::vector<bool> flags = fundamental_flags(scores, reference_mode);
    json components = json::array();
    for (std::size_t c = 0; c < dg.n_components(); ++c) {
        components.push_back(json{{"index", c},
                                  {"size", dg.component(c).size()},
                                  {"edge_count", dg.component_edges(c).size()},
                                  {"mean_edge_length", stats.mean[c]},
                                  {"std_edge_length", stats.stddev[c]},
                                  {"c", scores[c].consistency},
                                  {"q", scores[c].quality},
                                  {"fundamental", static_cast<bool>(flags[c])}});
    }
    return json{{"components", components},
                {"eta_c", eta_c},
                {"eta_q", eta_q},
                {"reference_mode", reference_mode}};
}

std::filesystem::path artifact_graph_path(const std::filesystem::path& dir) {
    return dir / "graph.dcag";
}

std::filesystem::path artifact_points_path(const std::filesystem::path& dir) {
    return dir / "points.dcabin";
}

void save_artifact(const std::filesystem::path& dir, const PointSet& points,
                   const ApproxDelaunayGraph& raw_graph, const RunResult& result,
                   const RunParams& params, bool reference_mode) {
    std::filesystem::create_directories(dir);
    save_dcabin(points, artifact_points_path(dir));
    save_graph(raw_graph, artifact_graph_path(dir));
    write_json_file(distilled_json(result.distilled), dir / "distilled.json");

    const ComponentEdgeStats stats = compute_component_edge_stats(result.distilled);
    write_json_file(stats_json(result.distilled, result.component_scores, stats, reference_mode,
                               params.eta_c, params.eta_q),
                    dir / "stats.json");

    json meta = params_json(params);
    meta["dim"] = points.dim();
    meta["n_ref"] = points.count(Membership::Ref);
    meta["n_eval"] = points.count(Membership::Eval);
    meta["reference_mode"] = reference_mode;
    write_json_file(meta, dir / "params.json");
}

Artifact load_artifact(const std::filesystem::path& dir) {
    if (!std::filesystem::exists(dir / "params.json"))
        throw MissingArtifact("no artifact at " + dir.string() +
                              " (expected params.json, points.dcabin, distilled.json, stats.json)");

    Artifact artifact;
    artifact.params = read_json_file(dir / "params.json");
    artifact.points =
        load_pointset(artifact_points_path(dir), Membership::Ref, {Format::Dcabin, false});

    const json distilled = read_json_file(dir / "distilled.json");
    const auto n_vertices = distilled.at("n_vertices").get<std::uint32_t>();
    if (n_vertices != artifact.points.size())
        throw ParseError("artifact points and distillation disagree on the vertex count");
    artifact.component_of.assign(n_vertices, -1);
    artifact.n_components = distilled.at("components").size();
    for (const json& comp : distilled.at("components")) {
        const auto index = comp.at("index").get<std::int32_t>();
        for (const json& v : comp.at("vertices"))
            artifact.component_of.at(v.get<std::uint32_t>()) = index;
    }

    const json stats = read_json_file(dir / "stats.json");
    artifact.stats.mean.resize(artifact.n_components, 0.0);
    artifact.stats.stddev.resize(artifact.n_components, 0.0);
    artifact.fundamental.resize(artifact.n_components, false);
    for (const json& comp : stats.at("components")) {
        const auto index = comp.at("index").get<std::size_t>();
        artifact.stats.mean.at(index) = comp.at("mean_edge_length").get<double>();
        artifact.stats.stddev.at(index) = comp.at("std_edge_length").get<double>();
        artifact.fundamental.at(index) = comp.at("fundamental").get<bool>();
    }
    return artifact;
}

json query_record_json(const QueryVerdict& v) {
    json typical = json::array();
    for (const TypicalTally& t : v.typical)
        typical.push_back(json{{"component", t.component},
                               {"count", t.count},
                               {"min_length", t.min_length}});

    auto component_or_null = [](std::int32_t c) {
        return c < 0 ? json(nullptr) : json(c);
    };
    return json{{"id", v.query_id},
                {"closest",
                 {{"vertex", v.closest_vertex},
                  {"length", v.closest_length},
                  {"component", component_or_null(v.closest_component)}}},
                {"assignment",
                 {{"conservative", component_or_null(v.conservative)},
                  {"flexible", component_or_null(v.flexible)}}},
                {"typical_edges", typical}};
}

} // namespace dca
