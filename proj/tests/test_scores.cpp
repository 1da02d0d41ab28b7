#include <doctest.h>

#include <random>

#include "dca/errors.hpp"
#include "dca/oracle.hpp"
#include "dca/pipeline.hpp"
#include "dca/scores.hpp"

using namespace dca;

namespace {

// hand-buildable distilled fixture: components given as (vertices, edges)
DistilledGraph make_distilled(std::uint32_t n,
                              std::vector<std::vector<std::uint32_t>> components,
                              std::vector<std::vector<ComponentEdge>> edges) {
    std::vector<char> used(n, 0);
    for (const auto& comp : components)
        for (std::uint32_t v : comp) used[v] = 1;
    std::vector<std::uint32_t> outliers;
    for (std::uint32_t v = 0; v < n; ++v)
        if (!used[v]) outliers.push_back(v);
    return DistilledGraph(n, 2, std::move(components), std::move(edges), std::move(outliers));
}

std::vector<Membership> tags(std::initializer_list<int> list) {
    std::vector<Membership> out;
    for (int v : list) out.push_back(v == 0 ? Membership::Ref : Membership::Eval);
    return out;
}

} // namespace

TEST_SUITE_BEGIN("scores");

TEST_CASE("component score formulas") {
    // one component: 3 ref + 1 eval, edges rr=2, re=3
    const DistilledGraph dg = make_distilled(
        4, {{0, 1, 2, 3}},
        {{{0, 1, 1.0}, {1, 2, 1.0}, {0, 3, 1.0}, {1, 3, 1.0}, {2, 3, 1.0}}});
    const auto scores = score_components(dg, tags({0, 0, 0, 1}), 0.0, 0.0);
    REQUIRE(scores.size() == 1);
    CHECK(scores[0].n_ref == 3);
    CHECK(scores[0].n_eval == 1);
    CHECK(scores[0].edges_rr == 2);
    CHECK(scores[0].edges_re == 3);
    CHECK(scores[0].edges_ee == 0);
    CHECK(scores[0].consistency == doctest::Approx(0.5));
    CHECK(scores[0].quality == doctest::Approx(0.6));
}

TEST_CASE("a single-set component is never fundamental") {
    const DistilledGraph dg = make_distilled(3, {{0, 1, 2}}, {{{0, 1, 1.0}, {1, 2, 1.0}}});
    const auto scores = score_components(dg, tags({0, 0, 0}), 0.0, 0.0);
    REQUIRE(scores.size() == 1);
    CHECK(scores[0].consistency == 0.0);
    CHECK_FALSE(scores[0].fundamental);
}

TEST_CASE("a perfectly mixed pair scores one on both axes") {
    const DistilledGraph dg = make_distilled(2, {{0, 1}}, {{{0, 1, 1.0}}});
    const auto scores = score_components(dg, tags({0, 1}), 0.5, 0.5);
    REQUIRE(scores.size() == 1);
    CHECK(scores[0].consistency == 1.0);
    CHECK(scores[0].quality == 1.0);
    CHECK(scores[0].fundamental);
}

TEST_CASE("network consistency is exactly one for balanced retained sets") {
    const DistilledGraph dg = make_distilled(
        6, {{0, 1, 2, 3}, {4, 5}},
        {{{0, 1, 1.0}, {2, 3, 1.0}, {0, 2, 1.0}}, {{4, 5, 1.0}}});
    const auto membership = tags({0, 1, 0, 1, 0, 1});
    const auto scores = score_components(dg, membership, 0.0, 0.0);
    const GlobalScores g = score_global(dg, membership, scores);
    CHECK(g.network_consistency == 1.0);
    CHECK(g.num_components == 2);
    CHECK(g.largest_component_relative_size == doctest::Approx(4.0 / 6.0));
}

TEST_CASE("precision and recall divide by the full input counts") {
    // component {0,1} is fundamental, vertex 2 (eval) and 3 (ref) are outliers
    const DistilledGraph dg = make_distilled(4, {{0, 1}}, {{{0, 1, 1.0}}});
    const auto membership = tags({0, 1, 1, 0});
    const auto scores = score_components(dg, membership, 0.0, 0.0);
    const GlobalScores g = score_global(dg, membership, scores);
    CHECK(g.precision == doctest::Approx(0.5)); // 1 of 2 eval points
    CHECK(g.recall == doctest::Approx(0.5));    // 1 of 2 ref points
}

TEST_CASE("no fundamental components means zero precision and recall") {
    const DistilledGraph dg = make_distilled(4, {{0, 1}, {2, 3}},
                                             {{{0, 1, 1.0}}, {{2, 3, 1.0}}});
    const auto membership = tags({0, 0, 1, 1});
    const auto scores = score_components(dg, membership, 0.0, 0.0);
    const GlobalScores g = score_global(dg, membership, scores);
    CHECK(g.num_fundamental == 0);
    CHECK(g.precision == 0.0);
    CHECK(g.recall == 0.0);
}

TEST_CASE("thresholds are validated") {
    const DistilledGraph dg = make_distilled(2, {{0, 1}}, {{{0, 1, 1.0}}});
    CHECK_THROWS_AS(score_components(dg, tags({0, 1}), 1.0, 0.0), Error);
    CHECK_THROWS_AS(score_components(dg, tags({0, 1}), 0.0, -0.5), Error);
}

TEST_CASE("swapping memberships swaps precision and recall") {
    oracle::SyntheticSpec spec;
    spec.n_clusters = 4;
    spec.points_per_cluster = 30;
    spec.center_separation = 12.0;
    spec.seed = 19;
    spec.ref_thinning = {0.4, 0.2};
    const oracle::SyntheticData data = oracle::generate(spec);
    const PointSet merged = merge(data.reference, data.evaluation);
    const ApproxDelaunayGraph g = build_graph(merged, 800, 7);
    const DistilledGraph dg = distill(g, 5);

    auto swapped = merged.memberships();
    for (Membership& m : swapped)
        m = m == Membership::Ref ? Membership::Eval : Membership::Ref;

    for (double eta_c : {0.0, 0.3, 0.6}) {
        const auto s1 = score_components(dg, merged.memberships(), eta_c, 0.1);
        const auto s2 = score_components(dg, swapped, eta_c, 0.1);
        const GlobalScores g1 = score_global(dg, merged.memberships(), s1);
        const GlobalScores g2 = score_global(dg, swapped, s2);
        CHECK(g1.precision == doctest::Approx(g2.recall).epsilon(1e-15));
        CHECK(g1.recall == doctest::Approx(g2.precision).epsilon(1e-15));
        CHECK(g1.network_consistency == doctest::Approx(g2.network_consistency).epsilon(1e-15));
        CHECK(g1.network_quality == doctest::Approx(g2.network_quality).epsilon(1e-15));
    }
}

TEST_CASE("raising thresholds never raises precision or recall") {
    oracle::SyntheticSpec spec;
    spec.n_clusters = 5;
    spec.points_per_cluster = 25;
    spec.center_separation = 10.0;
    spec.seed = 23;
    spec.ref_thinning = {0.5, 0.5};
    const oracle::SyntheticData data = oracle::generate(spec);
    const PointSet merged = merge(data.reference, data.evaluation);
    const ApproxDelaunayGraph g = build_graph(merged, 800, 7);
    const DistilledGraph dg = distill(g, 5);

    double last_p = 1.0, last_r = 1.0;
    for (double eta : {0.0, 0.25, 0.5, 0.75, 0.9}) {
        const auto s = score_components(dg, merged.memberships(), eta, eta);
        const GlobalScores gs = score_global(dg, merged.memberships(), s);
        CHECK(gs.precision <= last_p + 1e-15);
        CHECK(gs.recall <= last_r + 1e-15);
        last_p = gs.precision;
        last_r = gs.recall;
    }
}

TEST_CASE("scores agree with the brute-force recomputation") {
    std::mt19937 rng(99);
    for (int round = 0; round < 25; ++round) {
        std::uniform_int_distribution<int> n_dist(6, 30);
        const int n = n_dist(rng);
        std::uniform_real_distribution<double> coord(0.0, 1.0);
        std::vector<double> coords;
        std::vector<Membership> membership;
        for (int i = 0; i < n; ++i) {
            coords.push_back(coord(rng));
            coords.push_back(coord(rng));
            membership.push_back(rng() % 2 ? Membership::Ref : Membership::Eval);
        }
        const PointSet points(2, coords, membership);
        const ApproxDelaunayGraph g = build_graph(points, 300, round);
        const DistilledGraph dg = distill(g, 2 + round % 4);

        const double eta_c = (round % 5) * 0.2;
        const double eta_q = (round % 3) * 0.3;
        const auto s = score_components(dg, membership, eta_c, eta_q);
        const GlobalScores fast = score_global(dg, membership, s);
        const GlobalScores slow = oracle::brute_force_scores(dg, membership, eta_c, eta_q);

        CHECK(fast.network_consistency == doctest::Approx(slow.network_consistency).epsilon(1e-12));
        CHECK(fast.network_quality == doctest::Approx(slow.network_quality).epsilon(1e-12));
        CHECK(fast.precision == doctest::Approx(slow.precision).epsilon(1e-12));
        CHECK(fast.recall == doctest::Approx(slow.recall).epsilon(1e-12));
        CHECK(fast.num_fundamental == slow.num_fundamental);
        CHECK(fast.num_components == slow.num_components);
    }
}

TEST_SUITE_END();
