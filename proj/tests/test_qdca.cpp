#include <doctest.h>

#include <cmath>

#include "dca/errors.hpp"
#include "dca/oracle.hpp"
#include "dca/pipeline.hpp"
#include "dca/qdca.hpp"

using namespace dca;

namespace {

struct ReferenceFixture {
    PointSet points;
    DistilledGraph distilled;
    ComponentEdgeStats stats;
    std::vector<bool> fundamental;
    oracle::SyntheticData data;
};

ReferenceFixture make_reference(std::uint32_t n_clusters, std::uint32_t per_cluster,
                                std::uint64_t seed) {
    oracle::SyntheticSpec spec;
    spec.n_clusters = n_clusters;
    spec.points_per_cluster = per_cluster;
    spec.center_separation = 20.0;
    spec.seed = seed;
    spec.make_eval = false;
    oracle::SyntheticData data = oracle::generate(spec);

    ApproxDelaunayGraph g = build_graph(data.reference, 1000, seed + 1);
    DistilledGraph dg = distill(g, 10);
    ComponentEdgeStats stats = compute_component_edge_stats(dg);
    std::vector<bool> fundamental(dg.n_components(), true);
    PointSet points = data.reference;
    return {std::move(points), std::move(dg), std::move(stats), std::move(fundamental),
            std::move(data)};
}

QueryNeighborhood neighborhood(std::initializer_list<QueryEdge> edges) {
    QueryNeighborhood n;
    n.query_id = 0;
    n.edges.assign(edges.begin(), edges.end());
    std::sort(n.edges.begin(), n.edges.end(), [](const QueryEdge& a, const QueryEdge& b) {
        if (a.length != b.length) return a.length < b.length;
        return a.target < b.target;
    });
    return n;
}

} // namespace

TEST_SUITE_BEGIN("qdca");

TEST_CASE("a query between two points connects to both") {
    PointSet ref(2, {0, 0, 2, 0}, Membership::Ref);
    DistilledGraph dg(2, 2, {{0, 1}}, {{{0, 1, 2.0}}}, {});
    const double q[] = {1.0, 0.3};
    const QueryNeighborhood n = insert_query(ref, q, 0, dg, 256, 5);
    REQUIRE(n.edges.size() == 2);
    CHECK(n.edges[0].target == 0);
    CHECK(n.edges[1].target == 1);
    CHECK(n.edges[0].component == 0);
}

TEST_CASE("a query equal to a reference point still gets positive edges") {
    PointSet ref(2, {0, 0, 1, 0, 0, 1}, Membership::Ref);
    DistilledGraph dg(3, 2, {{0, 1, 2}}, {{{0, 1, 1.0}, {0, 2, 1.0}}}, {});
    const double q[] = {0.0, 0.0}; // coincides with reference vertex 0
    const QueryNeighborhood n = insert_query(ref, q, 3, dg, 512, 9);
    CHECK(!n.edges.empty());
    for (const QueryEdge& e : n.edges) {
        CHECK(e.length > 0.0);
        CHECK(e.target != 0); // the zero-length candidate self-excludes
    }
}

TEST_CASE("query dimension mismatches are rejected") {
    PointSet ref(2, {0, 0, 1, 0}, Membership::Ref);
    DistilledGraph dg(2, 2, {{0, 1}}, {{{0, 1, 1.0}}}, {});
    const double q[] = {0.0, 0.0, 0.0};
    CHECK_THROWS_AS(insert_query(ref, q, 0, dg, 64, 1), DimMismatch);
}

TEST_CASE("evaluating an empty neighborhood is an explicit error") {
    QueryNeighborhood empty;
    ComponentEdgeStats stats;
    CHECK_THROWS_AS(evaluate_query(empty, stats, {}), EmptyNeighborhood);
}

TEST_CASE("unanimous typical edges assign under both strategies") {
    ComponentEdgeStats stats{{1.0, 1.0, 1.0}, {0.1, 0.1, 0.1}};
    const std::vector<bool> fundamental{true, true, true};
    const auto n = neighborhood({
        {10, 0.9, 0.2, 2},
        {11, 1.0, 0.2, 2},
        {12, 1.05, 0.2, 2},
        {13, 0.95, 0.2, 2},
        {14, 1.02, 0.2, 2},
    });
    const QueryVerdict v = evaluate_query(n, stats, fundamental);
    CHECK(v.conservative == 2);
    CHECK(v.flexible == 2);
    REQUIRE(v.typical.size() == 1);
    CHECK(v.typical[0].count == 5);
}

TEST_CASE("flexible assignment needs both the count and the shortest edge") {
    ComponentEdgeStats stats{{1.0, 1.0}, {0.1, 0.1}};
    const std::vector<bool> fundamental{true, true};

    SUBCASE("majority holding the shortest edge wins flexibly") {
        const auto n = neighborhood({
            {1, 0.5, 0.2, 0}, // shortest overall, component 0
            {2, 0.9, 0.2, 0},
            {3, 1.0, 0.2, 0},
            {4, 0.8, 0.2, 1},
        });
        const QueryVerdict v = evaluate_query(n, stats, fundamental);
        CHECK(v.conservative == kUnassigned);
        CHECK(v.flexible == 0);
    }
    SUBCASE("split count and length winners assign nothing") {
        const auto n = neighborhood({
            {1, 0.5, 0.2, 0}, // shortest, component 0
            {2, 0.9, 0.2, 0},
            {3, 0.7, 0.2, 1},
            {4, 0.8, 0.2, 1},
            {5, 1.0, 0.2, 1}, // component 1 has the count
        });
        const QueryVerdict v = evaluate_query(n, stats, fundamental);
        CHECK(v.conservative == kUnassigned);
        CHECK(v.flexible == kUnassigned);
    }
}

TEST_CASE("edges to outliers and long edges are never typical") {
    ComponentEdgeStats stats{{1.0}, {0.0}};
    const std::vector<bool> fundamental{true};
    const auto n = neighborhood({
        {1, 0.4, 0.3, kOutlierVertex}, // outlier target: counts for options 1 and 2 only
        {2, 2.5, 0.3, 0},              // far beyond mean + stddev
        {3, 0.9, 0.3, 0},
    });
    const QueryVerdict v = evaluate_query(n, stats, fundamental);
    CHECK(v.closest_vertex == 1);
    CHECK(v.closest_length == doctest::Approx(0.4));
    CHECK(v.closest_component == kOutlierVertex);
    REQUIRE(v.typical.size() == 1);
    CHECK(v.typical[0].count == 1);
    CHECK(v.conservative == 0);
}

TEST_CASE("non-fundamental components contribute no typical edges") {
    ComponentEdgeStats stats{{1.0, 1.0}, {0.1, 0.1}};
    const std::vector<bool> fundamental{false, true};
    const auto n = neighborhood({
        {1, 0.5, 0.2, 0},
        {2, 0.9, 0.2, 1},
    });
    const QueryVerdict v = evaluate_query(n, stats, fundamental);
    REQUIRE(v.typical.size() == 1);
    CHECK(v.typical[0].component == 1);
    CHECK(v.conservative == 1);
}

TEST_CASE("queries at cluster centers are assigned conservatively") {
    const ReferenceFixture fx = make_reference(3, 60, 201);
    REQUIRE(fx.distilled.n_components() == 3);

    for (std::uint32_t c = 0; c < 3; ++c) {
        const std::vector<double>& center = fx.data.centers[c];
        const QueryNeighborhood n =
            insert_query(fx.points, center, c, fx.distilled, 1000, 99);
        const QueryVerdict v = evaluate_query(n, fx.stats, fx.fundamental);
        REQUIRE(v.conservative != kUnassigned);
        CHECK(v.flexible == v.conservative);

        // the assigned component is the one holding this cluster's points
        const std::int32_t expected = fx.distilled.component_of(
            [&] {
                for (std::uint32_t i = 0; i < fx.data.reference_labels.size(); ++i)
                    if (fx.data.reference_labels[i] == c) return i;
                return 0u;
            }());
        CHECK(v.conservative == expected);
    }
}

TEST_CASE("a far query is unassigned under both strategies") {
    const ReferenceFixture fx = make_reference(3, 60, 207);
    std::vector<double> far(fx.points.dim(), 0.0);
    for (const auto& center : fx.data.centers)
        for (std::size_t k = 0; k < far.size(); ++k) far[k] += center[k];
    for (double& x : far) x /= 3.0;
    far[0] += 400.0; // 20 sigma past everything

    const QueryNeighborhood n = insert_query(fx.points, far, 0, fx.distilled, 1000, 3);
    const QueryVerdict v = evaluate_query(n, fx.stats, fx.fundamental);
    CHECK(v.typical.empty());
    CHECK(v.conservative == kUnassigned);
    CHECK(v.flexible == kUnassigned);
}

TEST_CASE("closest edge length grows along an outward ray") {
    const ReferenceFixture fx = make_reference(2, 80, 301);
    const std::vector<double>& center = fx.data.centers[0];

    double previous = -1.0;
    for (int step = 0; step < 10; ++step) {
        std::vector<double> q = center;
        q[0] += 3.0 * step; // 3 sigma per step
        const QueryNeighborhood n =
            insert_query(fx.points, q, static_cast<std::uint32_t>(step), fx.distilled, 800, 17);
        const QueryVerdict v = evaluate_query(n, fx.stats, fx.fundamental);
        CHECK(v.closest_length >= previous);
        previous = v.closest_length;
    }
}

TEST_CASE("verdicts do not depend on batching") {
    const ReferenceFixture fx = make_reference(2, 40, 401);
    std::vector<std::vector<double>> queries;
    for (int i = 0; i < 6; ++i) {
        std::vector<double> q = fx.data.centers[i % 2];
        q[1] += 0.5 * i;
        queries.push_back(q);
    }

    // one at a time
    std::vector<QueryVerdict> solo;
    for (std::size_t i = 0; i < queries.size(); ++i) {
        const auto n = insert_query(fx.points, queries[i], static_cast<std::uint32_t>(i),
                                    fx.distilled, 500, 77);
        solo.push_back(evaluate_query(n, fx.stats, fx.fundamental));
    }
    // batched in reverse order
    for (std::size_t i = queries.size(); i-- > 0;) {
        const auto n = insert_query(fx.points, queries[i], static_cast<std::uint32_t>(i),
                                    fx.distilled, 500, 77);
        const QueryVerdict v = evaluate_query(n, fx.stats, fx.fundamental);
        CHECK(v.closest_vertex == solo[i].closest_vertex);
        CHECK(v.closest_length == solo[i].closest_length);
        CHECK(v.conservative == solo[i].conservative);
        CHECK(v.flexible == solo[i].flexible);
    }
}

TEST_CASE("component edge statistics use the population convention") {
    DistilledGraph dg(4, 2, {{0, 1, 2, 3}},
                      {{{0, 1, 1.0}, {1, 2, 2.0}, {2, 3, 3.0}}}, {});
    const ComponentEdgeStats stats = compute_component_edge_stats(dg);
    REQUIRE(stats.mean.size() == 1);
    CHECK(stats.mean[0] == doctest::Approx(2.0));
    CHECK(stats.stddev[0] == doctest::Approx(std::sqrt(2.0 / 3.0)));
}

TEST_CASE("query-side coverage pruning keeps the shortest prefix") {
    PointSet ref(2, {0, 0, 1, 0, 0, 1, 3, 3}, Membership::Ref);
    DistilledGraph dg(4, 2, {{0, 1, 2, 3}},
                      {{{0, 1, 1.0}, {0, 2, 1.0}, {1, 3, 3.0}}}, {});
    const double q[] = {0.4, 0.4};
    const QueryNeighborhood full = insert_query(ref, q, 0, dg, 2000, 13, 1.0);
    const QueryNeighborhood pruned = insert_query(ref, q, 0, dg, 2000, 13, 0.5);
    CHECK(pruned.edges.size() <= full.edges.size());
    CHECK(!pruned.edges.empty());
    // pruning keeps a prefix of the length-sorted edge list
    for (std::size_t k = 0; k < pruned.edges.size(); ++k)
        CHECK(pruned.edges[k].target == full.edges[k].target);
}

TEST_SUITE_END();
