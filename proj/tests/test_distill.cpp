#include <doctest.h>

#include <numeric>
#include <set>

#include "dca/distill.hpp"
#include "dca/errors.hpp"
#include "dca/oracle.hpp"

using namespace dca;

namespace {

// graph fixture with arbitrary edges; hit counts are irrelevant here
ApproxDelaunayGraph make_graph(std::uint32_t n,
                               std::vector<std::tuple<std::uint32_t, std::uint32_t, double>> edges) {
    std::vector<GraphEdge> list;
    for (auto [a, b, len] : edges)
        list.push_back({std::min(a, b), std::max(a, b), len, 1, 1});
    std::sort(list.begin(), list.end(), [](const GraphEdge& x, const GraphEdge& y) {
        return x.i != y.i ? x.i < y.i : x.j < y.j;
    });
    return ApproxDelaunayGraph(n, 2, 10, std::move(list), std::vector<std::uint32_t>(n, 0), {});
}

ApproxDelaunayGraph blob_graph(const oracle::SyntheticSpec& spec, PointSet* out_points = nullptr) {
    const oracle::SyntheticData data = oracle::generate(spec);
    PointSet merged = merge(data.reference, data.evaluation);
    ApproxDelaunayGraph g = build_graph(merged, 1000, spec.seed + 1);
    if (out_points) *out_points = std::move(merged);
    return g;
}

} // namespace

TEST_SUITE_BEGIN("distill");

TEST_CASE("spanning forest drops the longest cycle edge") {
    const auto g = make_graph(3, {{0, 1, 1.0}, {1, 2, 2.0}, {0, 2, 3.0}});
    const auto forest = minimum_spanning_forest(g);
    REQUIRE(forest.size() == 2);
    CHECK(forest[0].length == 1.0);
    CHECK(forest[1].length == 2.0);
}

TEST_CASE("spanning forest of disconnected pairs") {
    const auto g = make_graph(4, {{0, 1, 1.0}, {2, 3, 1.5}});
    const auto forest = minimum_spanning_forest(g);
    REQUIRE(forest.size() == 2);
    CHECK(forest[0].a == 0);
    CHECK(forest[1].a == 2);
}

TEST_CASE("forest weight matches an independent algorithm") {
    PointSet points;
    oracle::SyntheticSpec spec;
    spec.n_clusters = 4;
    spec.points_per_cluster = 25;
    spec.center_separation = 8.0;
    spec.seed = 3;
    const auto g = blob_graph(spec, &points);

    std::vector<ForestEdge> all_edges;
    for (const GraphEdge& e : g.edges()) all_edges.push_back({e.i, e.j, e.length});
    const auto forest = minimum_spanning_forest(g);
    double forest_weight = 0.0;
    for (const ForestEdge& e : forest) forest_weight += e.length;
    CHECK(forest_weight ==
          doctest::Approx(oracle::prim_forest_weight(g.n_vertices(), all_edges)).epsilon(1e-12));
}

TEST_CASE("dendrogram merges in distance order with one root per component") {
    const auto g = make_graph(4, {{0, 1, 1.0}, {2, 3, 1.5}});
    const auto forest = minimum_spanning_forest(g);
    const Dendrogram d = build_dendrogram(4, forest);
    REQUIRE(d.merges.size() == 2);
    CHECK(d.merges[0].distance <= d.merges[1].distance);
    CHECK(d.roots.size() == 2);
}

TEST_CASE("condensed tree stability is never negative") {
    PointSet points;
    oracle::SyntheticSpec spec;
    spec.n_clusters = 3;
    spec.points_per_cluster = 40;
    spec.seed = 11;
    const auto g = blob_graph(spec, &points);
    const auto forest = minimum_spanning_forest(g);
    const Dendrogram d = build_dendrogram(static_cast<std::uint32_t>(g.n_vertices()), forest);
    for (std::uint32_t mcs : {2u, 5u, 10u}) {
        const CondensedTree tree = condense(d, mcs);
        CHECK(!tree.roots.empty());
        for (const CondensedCluster& c : tree.clusters) CHECK(c.stability >= 0.0);
    }
}

TEST_CASE("two well separated blobs distill to two components") {
    oracle::SyntheticSpec spec;
    spec.n_clusters = 2;
    spec.points_per_cluster = 50;
    spec.center_separation = 20.0;
    spec.seed = 29;
    const auto g = blob_graph(spec);

    const DistilledGraph dg = distill(g, 10);
    CHECK(dg.n_components() == 2);
    CHECK(dg.assigned_count() >= static_cast<std::size_t>(0.95 * g.n_vertices()));
    CHECK(dg.component(0).size() >= 10);
}

TEST_CASE("seven blobs stay seven components across mcs") {
    oracle::SyntheticSpec spec;
    spec.n_clusters = 7;
    spec.points_per_cluster = 40;
    spec.center_separation = 20.0;
    spec.seed = 41;
    const auto g = blob_graph(spec);
    for (std::uint32_t mcs : {5u, 10u, 20u}) {
        const DistilledGraph dg = distill(g, mcs);
        CHECK(dg.n_components() == 7);
    }
}

TEST_CASE("a blob smaller than mcs is all outliers") {
    std::vector<std::tuple<std::uint32_t, std::uint32_t, double>> chain;
    for (std::uint32_t i = 0; i + 1 < 15; ++i) chain.push_back({i, i + 1, 1.0 + 0.01 * i});
    const auto g = make_graph(15, chain);
    const DistilledGraph dg = distill(g, 20);
    CHECK(dg.n_components() == 0);
    CHECK(dg.outliers().size() == 15);
}

TEST_CASE("distillation output is a partition and introduces no edges") {
    PointSet points;
    oracle::SyntheticSpec spec;
    spec.n_clusters = 3;
    spec.points_per_cluster = 30;
    spec.center_separation = 6.0;
    spec.seed = 57;
    const auto g = blob_graph(spec, &points);

    std::set<std::pair<std::uint32_t, std::uint32_t>> graph_edges;
    for (const GraphEdge& e : g.edges()) graph_edges.emplace(e.i, e.j);

    for (std::uint32_t mcs : {2u, 5u, 10u, 20u}) {
        const DistilledGraph dg = distill(g, mcs);
        std::size_t covered = dg.outliers().size();
        for (std::size_t c = 0; c < dg.n_components(); ++c) {
            covered += dg.component(c).size();
            CHECK(dg.component(c).size() >= mcs);
            for (const ComponentEdge& e : dg.component_edges(c))
                CHECK(graph_edges.count({e.a, e.b}) == 1);
        }
        CHECK(covered == g.n_vertices());

        // component map agrees with the explicit lists
        for (std::size_t c = 0; c < dg.n_components(); ++c)
            for (std::uint32_t v : dg.component(c))
                CHECK(dg.component_of(v) == static_cast<std::int32_t>(c));
        for (std::uint32_t v : dg.outliers()) CHECK(dg.component_of(v) == -1);
    }
}

TEST_CASE("components are ordered by size then smallest id") {
    oracle::SyntheticSpec spec;
    spec.n_clusters = 3;
    spec.points_per_cluster = 30;
    spec.center_separation = 15.0;
    spec.seed = 63;
    spec.ref_thinning = {0.5};
    const auto g = blob_graph(spec);
    const DistilledGraph dg = distill(g, 5);
    for (std::size_t c = 1; c < dg.n_components(); ++c) {
        const bool ok = dg.component(c - 1).size() > dg.component(c).size() ||
                        (dg.component(c - 1).size() == dg.component(c).size() &&
                         dg.component(c - 1).front() < dg.component(c).front());
        CHECK(ok);
    }
}

TEST_CASE("invalid mcs is rejected") {
    const auto g = make_graph(3, {{0, 1, 1.0}, {1, 2, 2.0}});
    CHECK_THROWS_AS(distill(g, 1), InvalidMcs);
    CHECK_THROWS_AS(distill(g, 0), InvalidMcs);
}

TEST_CASE("an isolated vertex becomes an outlier") {
    const auto g = make_graph(5, {{0, 1, 1.0}, {1, 2, 1.0}, {2, 3, 1.0}});
    const DistilledGraph dg = distill(g, 2);
    // vertex 4 has no edges at all
    CHECK(dg.component_of(4) == -1);
}

TEST_SUITE_END();
