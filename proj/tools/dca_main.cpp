#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "dca/errors.hpp"
#include "dca/io.hpp"
#include "dca/pipeline.hpp"
#include "dca/util.hpp"

namespace {

using nlohmann::json;

constexpr int kExitConfig = 2;
constexpr int kExitInput = 3;
constexpr int kExitInternal = 4;

struct CliOptions {
    std::string ref;
    std::string eval;
    std::string queries;
    std::string format = "auto"; // auto | csv | dcabin
    bool header = false;
    std::string out;
    dca::RunParams params;
};

dca::LoadOptions load_options(const CliOptions& cli, const std::filesystem::path& path) {
    dca::LoadOptions opts;
    opts.header = cli.header;
    if (cli.format == "csv")
        opts.format = dca::Format::Csv;
    else if (cli.format == "dcabin")
        opts.format = dca::Format::Dcabin;
    else
        opts.format = dca::format_from_extension(path);
    return opts;
}

void emit(const std::string& text, const std::string& out_path) {
    if (out_path.empty()) {
        std::cout << text << '\n';
        return;
    }
    std::ofstream out(out_path);
    if (!out) throw dca::ParseError("cannot open " + out_path + " for writing");
    out << text << '\n';
}

void add_common_params(CLI::App* cmd, CliOptions& cli) {
    cmd->add_option("--T", cli.params.rays, "rays sampled per vertex")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    cmd->add_option("--B", cli.params.coverage,
                    "sphere coverage for edge filtering; 1.0 disables filtering")
        ->check(CLI::Range(0.0, 1.0))
        ->capture_default_str();
    cmd->add_option("--mcs", cli.params.mcs, "minimum cluster size")
        ->check(CLI::Range(2u, 1000000000u))
        ->capture_default_str();
    cmd->add_option("--eta-c", cli.params.eta_c, "component consistency threshold")
        ->check(CLI::Range(0.0, 1.0))
        ->capture_default_str();
    cmd->add_option("--eta-q", cli.params.eta_q, "component quality threshold")
        ->check(CLI::Range(0.0, 1.0))
        ->capture_default_str();
    cmd->add_option("--seed", cli.params.seed, "random seed")->capture_default_str();
    cmd->add_option("--workers", cli.params.workers, "worker threads (0 = all cores)")
        ->capture_default_str();
    cmd->add_option("--format", cli.format, "input format: auto, csv or dcabin")
        ->check(CLI::IsMember({"auto", "csv", "dcabin"}))
        ->capture_default_str();
    cmd->add_flag("--header", cli.header, "skip the first line of CSV inputs");
    cmd->add_option("--out", cli.out, "output path (default: stdout)");
}

dca::PointSet load_inputs(const CliOptions& cli, bool eval_required) {
    if (cli.ref.empty()) throw dca::EmptyInput("--ref is required");
    const dca::PointSet ref =
        dca::load_pointset(cli.ref, dca::Membership::Ref, load_options(cli, cli.ref));
    if (cli.eval.empty()) {
        if (eval_required) throw dca::EmptyInput("--eval is required");
        return ref;
    }
    const dca::PointSet eval =
        dca::load_pointset(cli.eval, dca::Membership::Eval, load_options(cli, cli.eval));
    return dca::merge(ref, eval);
}

int cmd_run(const CliOptions& cli) {
    const dca::PointSet merged = load_inputs(cli, true);
    std::cerr << "analyzing " << merged.size() << " points (" << merged.count(dca::Membership::Ref)
              << " ref, " << merged.count(dca::Membership::Eval) << " eval), dim " << merged.dim()
              << "\n";
    const dca::RunResult result = dca::run_pipeline(merged, cli.params);
    std::cerr << "graph: " << result.edges_before_filter << " edges";
    if (cli.params.coverage < 1.0)
        std::cerr << " (" << result.edges_after_filter << " after filtering)";
    std::cerr << "; components: " << result.distilled.n_components()
              << "; outliers: " << result.distilled.outliers().size() << "\n";
    emit(dca::report_json(result, cli.params, merged).dump(2), cli.out);
    return 0;
}

int cmd_build(const CliOptions& cli) {
    if (cli.out.empty()) throw dca::EmptyInput("--out directory is required for build");
    const bool reference_mode = cli.eval.empty();
    const dca::PointSet points = load_inputs(cli, false);

    // the artifact caches the unfiltered graph so later passes can re-filter
    dca::ApproxDelaunayGraph raw =
        dca::build_graph(points, cli.params.rays, cli.params.seed, cli.params.workers);
    const dca::RunResult result = dca::run_pipeline_from_graph(raw, points, cli.params);
    dca::save_artifact(cli.out, points, raw, result, cli.params, reference_mode);
    std::cerr << "artifact written to " << cli.out << ": " << result.distilled.n_components()
              << " components, " << result.distilled.outliers().size() << " outliers\n";
    return 0;
}

int cmd_query(const CliOptions& cli) {
    if (cli.ref.empty()) throw dca::MissingArtifact("--ref must name a build artifact directory");
    if (cli.queries.empty()) throw dca::EmptyInput("--queries is required");
    const dca::Artifact artifact = dca::load_artifact(cli.ref);
    const dca::QuerySet queries = dca::load_queryset(cli.queries, load_options(cli, cli.queries));
    if (queries.dim() != artifact.points.dim())
        throw dca::DimMismatch("query dimension " + std::to_string(queries.dim()) +
                               " does not match the artifact dimension " +
                               std::to_string(artifact.points.dim()));

    std::vector<json> records(queries.size());
    dca::detail::parallel_for(0, queries.size(), cli.params.workers, [&](unsigned, std::size_t i) {
        const auto id = static_cast<std::uint32_t>(i);
        const dca::QueryNeighborhood neighborhood =
            dca::insert_query(artifact.points, queries.point(i), id, artifact.component_of,
                              cli.params.rays, cli.params.seed, cli.params.coverage);
        try {
            const dca::QueryVerdict verdict =
                dca::evaluate_query(neighborhood, artifact.stats, artifact.fundamental);
            records[i] = dca::query_record_json(verdict);
        } catch (const dca::EmptyNeighborhood&) {
            records[i] = json{{"id", id}, {"error", "empty_neighborhood"}};
        }
    });

    std::string lines;
    for (const json& record : records) {
        lines += record.dump();
        lines += '\n';
    }
    if (!lines.empty()) lines.pop_back();
    emit(lines, cli.out);
    return 0;
}

int cmd_distill(const CliOptions& cli) {
    if (cli.ref.empty()) throw dca::MissingArtifact("--ref must name a build artifact directory");
    const auto graph_path = dca::artifact_graph_path(cli.ref);
    const auto points_path = dca::artifact_points_path(cli.ref);
    if (!std::filesystem::exists(graph_path) || !std::filesystem::exists(points_path))
        throw dca::MissingArtifact("no cached graph under " + cli.ref);

    dca::ApproxDelaunayGraph graph = dca::load_graph(graph_path);
    const dca::PointSet points =
        dca::load_pointset(points_path, dca::Membership::Ref, {dca::Format::Dcabin, false});
    const dca::RunResult result =
        dca::run_pipeline_from_graph(std::move(graph), points, cli.params);
    emit(dca::report_json(result, cli.params, points).dump(2), cli.out);
    return 0;
}

int cmd_report(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw dca::ParseError("cannot open " + path);
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw dca::ParseError(path + ": " + e.what());
    }

    if (j.contains("global")) {
        const json& g = j["global"];
        std::cout << "network consistency  " << g["c"].get<double>() << "\n"
                  << "network quality      " << g["q"].get<double>() << "\n"
                  << "precision            " << g["precision"].get<double>() << "\n"
                  << "recall               " << g["recall"].get<double>() << "\n"
                  << "components           " << g["num_components"].get<std::uint64_t>()
                  << " (fundamental: " << g["num_fundamental"].get<std::uint64_t>() << ")\n";
        if (j.contains("components")) {
            std::cout << "\n idx     n_ref    n_eval         c         q  fundamental\n";
            for (const json& c : j["components"]) {
                std::printf("%4llu %9llu %9llu %9.4f %9.4f  %s\n",
                            static_cast<unsigned long long>(c["index"].get<std::uint64_t>()),
                            static_cast<unsigned long long>(c["n_ref"].get<std::uint64_t>()),
                            static_cast<unsigned long long>(c["n_eval"].get<std::uint64_t>()),
                            c["c"].get<double>(), c["q"].get<double>(),
                            c["fundamental"].get<bool>() ? "yes" : "no");
            }
        }
    } else {
        std::cout << j.dump(2) << "\n";
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Geometric alignment analysis of labeled point sets via "
                 "randomized Delaunay graph approximation"};
    app.require_subcommand(1);
    app.set_config("--config", "", "key=value configuration file; flags override it");

    CliOptions cli;

    CLI::App* run = app.add_subcommand("run", "full analysis of a reference/evaluation pair");
    run->add_option("--ref", cli.ref, "reference point file")->required();
    run->add_option("--eval", cli.eval, "evaluation point file")->required();
    add_common_params(run, cli);

    CLI::App* build = app.add_subcommand("build", "build and persist a reference context");
    build->add_option("--ref", cli.ref, "reference point file")->required();
    build->add_option("--eval", cli.eval, "optional evaluation point file");
    add_common_params(build, cli);

    CLI::App* query = app.add_subcommand("query", "evaluate query points against a built context");
    query->add_option("--ref", cli.ref, "artifact directory from build")->required();
    query->add_option("--queries", cli.queries, "query point file")->required();
    add_common_params(query, cli);

    CLI::App* distill = app.add_subcommand("distill", "re-cluster a cached graph");
    distill->add_option("--ref", cli.ref, "artifact directory from build")->required();
    add_common_params(distill, cli);

    std::string report_path;
    CLI::App* report = app.add_subcommand("report", "pretty-print a JSON report");
    report->add_option("file", report_path, "report file")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitConfig;
    }

    try {
        if (run->parsed()) return cmd_run(cli);
        if (build->parsed()) return cmd_build(cli);
        if (query->parsed()) return cmd_query(cli);
        if (distill->parsed()) return cmd_distill(cli);
        if (report->parsed()) return cmd_report(report_path);
    } catch (const dca::InvalidCoverage& e) {
        std::cerr << "configuration error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const dca::InvalidMcs& e) {
        std::cerr << "configuration error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const dca::InternalError& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return kExitInternal;
    } catch (const dca::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInput;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return kExitInternal;
    }
    return 0;
}
