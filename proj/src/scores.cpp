#include "dca/scores.hpp"

#include <cmath>

#include "dca/errors.hpp"

namespace dca {

namespace {

double consistency_of(std::uint64_t n_ref, std::uint64_t n_eval) {
    const std::uint64_t total = n_ref + n_eval;
    if (total == 0) return 0.0;
    const std::uint64_t diff = n_ref > n_eval ? n_ref - n_eval : n_eval - n_ref;
    return 1.0 - static_cast<double>(diff) / static_cast<double>(total);
}

double quality_of(std::uint64_t e_rr, std::uint64_t e_ee, std::uint64_t e_re) {
    const std::uint64_t total = e_rr + e_ee + e_re;
    if (total == 0) return 0.0;
    return 1.0 - static_cast<double>(e_rr + e_ee) / static_cast<double>(total);
}

void check_thresholds(double eta_c, double eta_q) {
    if (!(eta_c >= 0.0) || eta_c >= 1.0 || !(eta_q >= 0.0) || eta_q >= 1.0)
        throw Error("score thresholds must lie in [0, 1)");
}

} // namespace

std::vector<ComponentScore> score_components(const DistilledGraph& dg,
                                             const std::vector<Membership>& membership,
                                             double eta_c, double eta_q) {
    check_thresholds(eta_c, eta_q);
    if (membership.size() != dg.n_vertices())
        throw DimMismatch("membership vector does not match the graph");

    std::vector<ComponentScore> out;
    out.reserve(dg.n_components());
    for (std::size_t c = 0; c < dg.n_components(); ++c) {
        ComponentScore s;
        s.component = static_cast<std::uint32_t>(c);
        for (std::uint32_t v : dg.component(c)) {
            if (membership[v] == Membership::Ref)
                ++s.n_ref;
            else
                ++s.n_eval;
        }
        for (const ComponentEdge& e : dg.component_edges(c)) {
            const bool a_ref = membership[e.a] == Membership::Ref;
            const bool b_ref = membership[e.b] == Membership::Ref;
            if (a_ref && b_ref)
                ++s.edges_rr;
            else if (!a_ref && !b_ref)
                ++s.edges_ee;
            else
                ++s.edges_re;
        }
        s.consistency = consistency_of(s.n_ref, s.n_eval);
        s.quality = quality_of(s.edges_rr, s.edges_ee, s.edges_re);
        s.fundamental = s.consistency > eta_c && s.quality > eta_q;
        out.push_back(s);
    }
    return out;
}

GlobalScores score_global(const DistilledGraph& dg, const std::vector<Membership>& membership,
                          const std::vector<ComponentScore>& component_scores) {
    if (membership.size() != dg.n_vertices())
        throw DimMismatch("membership vector does not match the graph");

    std::uint64_t total_ref = 0, total_eval = 0;
    for (Membership m : membership) (m == Membership::Ref ? total_ref : total_eval)++;

    GlobalScores g;
    g.num_components = static_cast<std::uint32_t>(dg.n_components());

    std::uint64_t net_ref = 0, net_eval = 0, net_rr = 0, net_ee = 0, net_re = 0;
    std::uint64_t fund_ref = 0, fund_eval = 0;
    std::size_t largest = 0;
    for (const ComponentScore& s : component_scores) {
        net_ref += s.n_ref;
        net_eval += s.n_eval;
        net_rr += s.edges_rr;
        net_ee += s.edges_ee;
        net_re += s.edges_re;
        if (s.fundamental) {
            ++g.num_fundamental;
            fund_ref += s.n_ref;
            fund_eval += s.n_eval;
        }
        largest = std::max<std::size_t>(largest, s.n_ref + s.n_eval);
    }

    g.network_consistency = consistency_of(net_ref, net_eval);
    g.network_quality = quality_of(net_rr, net_ee, net_re);
    g.precision = total_eval > 0
                      ? static_cast<double>(fund_eval) / static_cast<double>(total_eval)
                      : 0.0;
    g.recall = total_ref > 0 ? static_cast<double>(fund_ref) / static_cast<double>(total_ref)
                             : 0.0;
    g.largest_component_relative_size =
        dg.n_vertices() > 0 ? static_cast<double>(largest) / static_cast<double>(dg.n_vertices())
                            : 0.0;
    return g;
}

} // namespace dca
