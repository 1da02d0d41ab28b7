#include "dca/oracle.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <queue>
#include <set>

#include "dca/errors.hpp"
#include "dca/rng.hpp"

namespace dca::oracle {

namespace {

struct Tri {
    std::array<std::uint32_t, 3> v;
    bool alive = true;
};

// > 0 when d lies inside the circumcircle of ccw triangle (a, b, c)
double incircle(const double* a, const double* b, const double* c, const double* d) {
    const double adx = a[0] - d[0], ady = a[1] - d[1];
    const double bdx = b[0] - d[0], bdy = b[1] - d[1];
    const double cdx = c[0] - d[0], cdy = c[1] - d[1];
    const double ad2 = adx * adx + ady * ady;
    const double bd2 = bdx * bdx + bdy * bdy;
    const double cd2 = cdx * cdx + cdy * cdy;
    return adx * (bdy * cd2 - cdy * bd2) - ady * (bdx * cd2 - cdx * bd2) +
           ad2 * (bdx * cdy - cdx * bdy);
}

double orient2d(const double* a, const double* b, const double* c) {
    return (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0]);
}

} // namespace

std::vector<std::pair<std::uint32_t, std::uint32_t>> exact_delaunay_2d(const PointSet& points) {
    if (points.dim() != 2) throw DimMismatch("the exact triangulator is 2D only");
    const std::size_t n = points.size();
    std::vector<std::pair<std::uint32_t, std::uint32_t>> edges;
    if (n < 2) return edges;
    if (n == 2) {
        edges.emplace_back(0, 1);
        return edges;
    }

    // working copy with three far-away bounding vertices appended
    std::vector<double> coords(points.coords());
    double lo_x = coords[0], hi_x = coords[0], lo_y = coords[1], hi_y = coords[1];
    for (std::size_t i = 0; i < n; ++i) {
        lo_x = std::min(lo_x, coords[2 * i]);
        hi_x = std::max(hi_x, coords[2 * i]);
        lo_y = std::min(lo_y, coords[2 * i + 1]);
        hi_y = std::max(hi_y, coords[2 * i + 1]);
    }
    const double span = std::max({hi_x - lo_x, hi_y - lo_y, 1e-9});
    const double cx = 0.5 * (lo_x + hi_x);
    const double cy = 0.5 * (lo_y + hi_y);
    const double big = 1e5 * span;
    const std::uint32_t s0 = static_cast<std::uint32_t>(n);
    coords.insert(coords.end(), {cx - 2.0 * big, cy - big, cx + 2.0 * big, cy - big, cx, cy + 2.0 * big});

    auto pt = [&](std::uint32_t i) { return coords.data() + 2 * i; };

    std::vector<Tri> tris;
    tris.push_back({{s0, s0 + 1, s0 + 2}, true});

    for (std::uint32_t p = 0; p < n; ++p) {
        // duplicates would make the triangulation ill-defined
        for (std::uint32_t q = 0; q < p; ++q) {
            if (coords[2 * p] == coords[2 * q] && coords[2 * p + 1] == coords[2 * q + 1])
                throw DegenerateInput("coincident points in exact triangulation");
        }

        std::vector<std::size_t> bad;
        for (std::size_t t = 0; t < tris.size(); ++t) {
            if (!tris[t].alive) continue;
            const auto& v = tris[t].v;
            double det = incircle(pt(v[0]), pt(v[1]), pt(v[2]), pt(p));
            if (orient2d(pt(v[0]), pt(v[1]), pt(v[2])) < 0.0) det = -det;
            if (det == 0.0) throw DegenerateInput("exactly cocircular points");
            if (det > 0.0) bad.push_back(t);
        }

        // cavity boundary = edges of bad triangles that are not shared twice
        std::map<std::pair<std::uint32_t, std::uint32_t>, int> boundary;
        for (std::size_t t : bad) {
            const auto& v = tris[t].v;
            for (int k = 0; k < 3; ++k) {
                const std::uint32_t a = v[k], b = v[(k + 1) % 3];
                ++boundary[{std::min(a, b), std::max(a, b)}];
            }
            tris[t].alive = false;
        }
        for (const auto& [edge, count] : boundary) {
            if (count == 1) tris.push_back({{edge.first, edge.second, p}, true});
        }
    }

    std::set<std::pair<std::uint32_t, std::uint32_t>> unique;
    for (const Tri& t : tris) {
        if (!t.alive) continue;
        if (t.v[0] >= n || t.v[1] >= n || t.v[2] >= n) continue; // touches the bounding frame
        for (int k = 0; k < 3; ++k) {
            const std::uint32_t a = t.v[k], b = t.v[(k + 1) % 3];
            unique.emplace(std::min(a, b), std::max(a, b));
        }
    }
    edges.assign(unique.begin(), unique.end());
    return edges;
}

double prim_forest_weight(std::size_t n_vertices, const std::vector<ForestEdge>& edges) {
    std::vector<std::vector<std::pair<std::uint32_t, double>>> adj(n_vertices);
    for (const ForestEdge& e : edges) {
        adj[e.a].emplace_back(e.b, e.length);
        adj[e.b].emplace_back(e.a, e.length);
    }

    std::vector<char> done(n_vertices, 0);
    double total = 0.0;
    using Item = std::pair<double, std::uint32_t>;
    for (std::uint32_t start = 0; start < n_vertices; ++start) {
        if (done[start]) continue;
        std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
        heap.emplace(0.0, start);
        while (!heap.empty()) {
            const auto [cost, v] = heap.top();
            heap.pop();
            if (done[v]) continue;
            done[v] = 1;
            total += cost;
            for (const auto& [w, len] : adj[v])
                if (!done[w]) heap.emplace(len, w);
        }
    }
    return total;
}

GlobalScores brute_force_scores(const DistilledGraph& dg,
                                const std::vector<Membership>& membership, double eta_c,
                                double eta_q) {
    GlobalScores g;
    g.num_components = static_cast<std::uint32_t>(dg.n_components());

    long ref_total = 0, eval_total = 0;
    for (std::uint32_t v = 0; v < dg.n_vertices(); ++v) {
        if (membership.at(v) == Membership::Ref)
            ++ref_total;
        else
            ++eval_total;
    }

    long net_ref = 0, net_eval = 0, net_homog = 0, net_edges = 0;
    long fund_ref = 0, fund_eval = 0;
    long largest = 0;
    for (std::size_t c = 0; c < dg.n_components(); ++c) {
        long n_ref = 0, n_eval = 0;
        for (std::uint32_t v : dg.component(c)) {
            if (membership.at(v) == Membership::Ref)
                ++n_ref;
            else
                ++n_eval;
        }
        long homog = 0, hetero = 0;
        for (const ComponentEdge& e : dg.component_edges(c)) {
            if (membership.at(e.a) == membership.at(e.b))
                ++homog;
            else
                ++hetero;
        }

        const long size = n_ref + n_eval;
        const double consistency =
            size == 0 ? 0.0 : 1.0 - std::abs(static_cast<double>(n_ref - n_eval)) / size;
        const double quality =
            (homog + hetero) == 0 ? 0.0
                                  : 1.0 - static_cast<double>(homog) /
                                              static_cast<double>(homog + hetero);
        const bool fundamental = consistency > eta_c && quality > eta_q;
        if (fundamental) {
            ++g.num_fundamental;
            fund_ref += n_ref;
            fund_eval += n_eval;
        }
        net_ref += n_ref;
        net_eval += n_eval;
        net_homog += homog;
        net_edges += homog + hetero;
        largest = std::max(largest, size);
    }

    g.network_consistency =
        (net_ref + net_eval) == 0
            ? 0.0
            : 1.0 - std::abs(static_cast<double>(net_ref - net_eval)) / (net_ref + net_eval);
    g.network_quality =
        net_edges == 0 ? 0.0 : 1.0 - static_cast<double>(net_homog) / static_cast<double>(net_edges);
    g.precision = eval_total == 0 ? 0.0 : static_cast<double>(fund_eval) / eval_total;
    g.recall = ref_total == 0 ? 0.0 : static_cast<double>(fund_ref) / ref_total;
    g.largest_component_relative_size =
        dg.n_vertices() == 0 ? 0.0 : static_cast<double>(largest) / dg.n_vertices();
    return g;
}

namespace {

std::vector<std::vector<double>> place_centers(const SyntheticSpec& spec) {
    GaussianStream stream(spec.seed, 0, Philox4x32::kSynthDomain);
    const double min_dist = spec.center_separation * spec.cluster_std;
    const double box = min_dist * std::max<std::uint32_t>(spec.n_clusters, 2);

    std::vector<std::vector<double>> centers;
    std::size_t attempts = 0;
    while (centers.size() < spec.n_clusters) {
        if (++attempts > 100000)
            throw InternalError("center placement failed; separation too large for the box");
        std::vector<double> c(spec.dim);
        for (double& x : c) x = stream.uniform() * box;
        bool ok = true;
        for (const auto& other : centers) {
            double d2 = 0.0;
            for (std::size_t k = 0; k < c.size(); ++k) d2 += (c[k] - other[k]) * (c[k] - other[k]);
            if (d2 < min_dist * min_dist) ok = false;
        }
        if (ok) centers.push_back(std::move(c));
    }
    return centers;
}

std::uint32_t kept_after_thinning(std::uint32_t count, double p) {
    // discarding a fraction p keeps ceil((1-p) * count) points
    return static_cast<std::uint32_t>(
        std::ceil((1.0 - p) * static_cast<double>(count) - 1e-12));
}

} // namespace

SyntheticData generate(const SyntheticSpec& spec) {
    if (spec.dim == 0 || spec.n_clusters == 0 || spec.points_per_cluster == 0)
        throw EmptyInput("degenerate synthetic spec");
    if (!(spec.center_separation > 0.0))
        throw Error("center separation must be positive");
    for (double p : spec.ref_thinning)
        if (!(p >= 0.0) || p >= 1.0) throw Error("thinning fractions must lie in [0, 1)");

    SyntheticData data;
    data.centers = place_centers(spec);

    auto cluster_list = [&](const std::vector<std::uint32_t>& chosen) {
        if (!chosen.empty()) return chosen;
        std::vector<std::uint32_t> all(spec.n_clusters);
        std::iota(all.begin(), all.end(), 0u);
        return all;
    };

    auto make_side = [&](const std::vector<std::uint32_t>& clusters, bool is_ref,
                         std::vector<std::uint32_t>& labels) {
        std::vector<double> coords;
        for (std::uint32_t c : clusters) {
            if (c >= spec.n_clusters) throw Error("cluster index out of range");
            std::uint32_t keep = spec.points_per_cluster;
            if (is_ref && c < spec.ref_thinning.size())
                keep = kept_after_thinning(spec.points_per_cluster, spec.ref_thinning[c]);

            // stream id encodes side and cluster so both sides are independent
            GaussianStream stream(spec.seed, (static_cast<std::uint64_t>(is_ref ? 1 : 2) << 32) | c,
                                  Philox4x32::kSynthDomain);
            for (std::uint32_t p = 0; p < spec.points_per_cluster; ++p) {
                std::vector<double> x(spec.dim);
                stream.fill(x);
                if (p >= keep) continue; // consume the stream either way
                for (std::size_t k = 0; k < x.size(); ++k)
                    coords.push_back(data.centers[c][k] + spec.cluster_std * x[k]);
                labels.push_back(c);
            }
        }
        return coords;
    };

    const auto ref_ids = cluster_list(spec.ref_clusters);
    std::vector<double> ref_coords = make_side(ref_ids, true, data.reference_labels);
    std::vector<double> eval_coords;
    if (spec.make_eval) {
        const auto eval_ids = cluster_list(spec.eval_clusters);
        eval_coords = make_side(eval_ids, false, data.evaluation_labels);
    }

    data.reference = PointSet(spec.dim, std::move(ref_coords), Membership::Ref);
    data.evaluation = eval_coords.empty()
                          ? PointSet()
                          : PointSet(spec.dim, std::move(eval_coords), Membership::Eval);
    return data;
}

} // namespace dca::oracle
