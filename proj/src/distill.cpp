#include "dca/distill.hpp"

#include <algorithm>
#include <limits>
#include <numeric>

#include "dca/errors.hpp"

namespace dca {

namespace {

// Union-find with path halving and union by size.
class UnionFind {
public:
    explicit UnionFind(std::size_t n) : parent_(n), size_(n, 1) {
        std::iota(parent_.begin(), parent_.end(), 0u);
    }

    std::uint32_t find(std::uint32_t x) {
        while (parent_[x] != x) {
            parent_[x] = parent_[parent_[x]];
            x = parent_[x];
        }
        return x;
    }

    bool unite(std::uint32_t a, std::uint32_t b) {
        a = find(a);
        b = find(b);
        if (a == b) return false;
        if (size_[a] < size_[b]) std::swap(a, b);
        parent_[b] = a;
        size_[a] += size_[b];
        return true;
    }

private:
    std::vector<std::uint32_t> parent_;
    std::vector<std::uint32_t> size_;
};

double to_lambda(double dist) {
    return dist > 0.0 ? 1.0 / dist : std::numeric_limits<double>::infinity();
}

} // namespace

std::vector<ForestEdge> minimum_spanning_forest(const ApproxDelaunayGraph& g) {
    std::vector<std::uint32_t> order(g.n_edges());
    std::iota(order.begin(), order.end(), 0u);
    std::sort(order.begin(), order.end(), [&](std::uint32_t a, std::uint32_t b) {
        const GraphEdge& ea = g.edges()[a];
        const GraphEdge& eb = g.edges()[b];
        if (ea.length != eb.length) return ea.length < eb.length;
        if (ea.i != eb.i) return ea.i < eb.i;
        return ea.j < eb.j;
    });

    UnionFind forest(g.n_vertices());
    std::vector<ForestEdge> out;
    out.reserve(g.n_vertices() > 0 ? g.n_vertices() - 1 : 0);
    for (std::uint32_t idx : order) {
        const GraphEdge& e = g.edges()[idx];
        if (forest.unite(e.i, e.j)) out.push_back({e.i, e.j, e.length});
    }
    return out;
}

Dendrogram build_dendrogram(std::uint32_t n_points, const std::vector<ForestEdge>& sorted_edges) {
    Dendrogram d;
    d.n_points = n_points;
    d.merges.reserve(sorted_edges.size());

    UnionFind uf(n_points);
    // current dendrogram node and size per union-find root
    std::vector<std::uint32_t> node_of(n_points);
    std::vector<std::uint32_t> size_of(n_points, 1);
    std::iota(node_of.begin(), node_of.end(), 0u);

    std::uint32_t next_node = n_points;
    for (const ForestEdge& e : sorted_edges) {
        std::uint32_t ra = uf.find(e.a);
        std::uint32_t rb = uf.find(e.b);
        if (ra == rb) throw InternalError("cycle in spanning forest");
        const std::uint32_t left = node_of[ra];
        const std::uint32_t right = node_of[rb];
        const std::uint32_t merged_size = size_of[ra] + size_of[rb];
        d.merges.push_back({left, right, e.length, merged_size});
        uf.unite(ra, rb);
        const std::uint32_t root = uf.find(ra);
        node_of[root] = next_node++;
        size_of[root] = merged_size;
    }

    std::vector<char> seen_root(n_points, 0);
    for (std::uint32_t v = 0; v < n_points; ++v) {
        const std::uint32_t r = uf.find(v);
        if (!seen_root[r]) {
            seen_root[r] = 1;
            d.roots.push_back(node_of[r]);
        }
    }
    std::sort(d.roots.begin(), d.roots.end());
    return d;
}

namespace {

struct DendrogramView {
    const Dendrogram& d;

    bool is_leaf(std::uint32_t node) const { return node < d.n_points; }
    const DendrogramMerge& merge(std::uint32_t node) const {
        return d.merges[node - d.n_points];
    }
    std::uint32_t subtree_size(std::uint32_t node) const {
        return is_leaf(node) ? 1 : merge(node).size;
    }

    template <class Fn>
    void for_each_leaf(std::uint32_t node, Fn&& fn) const {
        std::vector<std::uint32_t> stack{node};
        while (!stack.empty()) {
            const std::uint32_t cur = stack.back();
            stack.pop_back();
            if (is_leaf(cur)) {
                fn(cur);
            } else {
                stack.push_back(merge(cur).left);
                stack.push_back(merge(cur).right);
            }
        }
    }
};

} // namespace

CondensedTree condense(const Dendrogram& dendrogram, std::uint32_t mcs) {
    if (mcs < 2) throw InvalidMcs("minimum cluster size must be >= 2");
    CondensedTree tree;
    const DendrogramView view{dendrogram};

    struct Pending {
        std::uint32_t node;
        std::uint32_t cluster;
    };

    for (std::uint32_t root : dendrogram.roots) {
        if (view.subtree_size(root) < mcs) continue; // too small to ever cluster
        const std::uint32_t root_cluster = static_cast<std::uint32_t>(tree.clusters.size());
        tree.clusters.push_back({0.0, view.subtree_size(root), -1, -1, -1, 0.0, {}});
        tree.roots.push_back(root_cluster);

        std::vector<Pending> stack{{root, root_cluster}};
        while (!stack.empty()) {
            const auto [node, cluster] = stack.back();
            stack.pop_back();
            const DendrogramMerge& m = view.merge(node);
            const double lambda = to_lambda(m.distance);
            const std::uint32_t size_l = view.subtree_size(m.left);
            const std::uint32_t size_r = view.subtree_size(m.right);

            if (size_l >= mcs && size_r >= mcs) {
                // real split: both sides become new clusters born here
                for (const std::uint32_t side : {m.left, m.right}) {
                    const std::uint32_t child = static_cast<std::uint32_t>(tree.clusters.size());
                    tree.clusters.push_back({lambda, view.subtree_size(side),
                                             static_cast<std::int32_t>(cluster), -1, -1, 0.0, {}});
                    if (tree.clusters[cluster].child_a < 0)
                        tree.clusters[cluster].child_a = static_cast<std::int32_t>(child);
                    else
                        tree.clusters[cluster].child_b = static_cast<std::int32_t>(child);
                    stack.push_back({side, child});
                }
            } else if (size_l >= mcs || size_r >= mcs) {
                // the small side falls out of the cluster at this level
                const std::uint32_t keep = size_l >= mcs ? m.left : m.right;
                const std::uint32_t drop = size_l >= mcs ? m.right : m.left;
                view.for_each_leaf(drop, [&](std::uint32_t p) {
                    tree.clusters[cluster].point_departures.emplace_back(p, lambda);
                });
                stack.push_back({keep, cluster});
            } else {
                // neither side is viable: the cluster ends here
                view.for_each_leaf(node, [&](std::uint32_t p) {
                    tree.clusters[cluster].point_departures.emplace_back(p, lambda);
                });
            }
        }
    }

    for (CondensedCluster& c : tree.clusters) {
        double stability = 0.0;
        for (const auto& [point, lambda] : c.point_departures)
            stability += lambda - c.birth_lambda;
        if (c.child_a >= 0) {
            // remaining points transfer to the children at the split level
            const CondensedCluster& child = tree.clusters[c.child_a];
            const std::uint32_t transferred =
                child.size_at_birth + tree.clusters[c.child_b].size_at_birth;
            stability += (child.birth_lambda - c.birth_lambda) * transferred;
        }
        c.stability = stability;
        if (!(stability >= 0.0)) throw InternalError("negative cluster stability");
    }
    return tree;
}

std::vector<std::uint32_t> select_clusters(const CondensedTree& tree) {
    const std::size_t n = tree.clusters.size();
    std::vector<char> selected(n, 0);
    std::vector<double> subtree_mass(n, 0.0);

    // children are created after parents, so reverse index order is leaves-up
    for (std::size_t idx = n; idx-- > 0;) {
        const CondensedCluster& c = tree.clusters[idx];
        if (c.child_a < 0) {
            selected[idx] = 1;
            subtree_mass[idx] = c.stability;
            continue;
        }
        const double children_mass = subtree_mass[c.child_a] + subtree_mass[c.child_b];
        if (c.stability >= children_mass) {
            selected[idx] = 1;
            subtree_mass[idx] = c.stability;
            // deselect everything below
            std::vector<std::uint32_t> stack{static_cast<std::uint32_t>(c.child_a),
                                             static_cast<std::uint32_t>(c.child_b)};
            while (!stack.empty()) {
                const std::uint32_t cur = stack.back();
                stack.pop_back();
                selected[cur] = 0;
                if (tree.clusters[cur].child_a >= 0) {
                    stack.push_back(static_cast<std::uint32_t>(tree.clusters[cur].child_a));
                    stack.push_back(static_cast<std::uint32_t>(tree.clusters[cur].child_b));
                }
            }
        } else {
            subtree_mass[idx] = children_mass;
        }
    }

    std::vector<std::uint32_t> out;
    for (std::uint32_t idx = 0; idx < n; ++idx)
        if (selected[idx]) out.push_back(idx);
    return out;
}

DistilledGraph::DistilledGraph(std::uint32_t n_vertices, std::uint32_t mcs,
                               std::vector<std::vector<std::uint32_t>> components,
                               std::vector<std::vector<ComponentEdge>> component_edges,
                               std::vector<std::uint32_t> outliers)
    : n_vertices_(n_vertices),
      mcs_(mcs),
      components_(std::move(components)),
      component_edges_(std::move(component_edges)),
      outliers_(std::move(outliers)) {
    if (components_.size() != component_edges_.size())
        throw InternalError("component and edge list counts differ");

    component_of_.assign(n_vertices_, -1);
    std::size_t assigned = 0;
    for (std::size_t c = 0; c < components_.size(); ++c) {
        for (std::uint32_t v : components_[c]) {
            if (v >= n_vertices_ || component_of_[v] != -1)
                throw InternalError("component membership is not a partition");
            component_of_[v] = static_cast<std::int32_t>(c);
            ++assigned;
        }
    }
    if (assigned + outliers_.size() != n_vertices_)
        throw InternalError("components and outliers do not cover all vertices");
    for (std::uint32_t v : outliers_)
        if (v >= n_vertices_ || component_of_[v] != -1)
            throw InternalError("outlier overlaps a component");
}

DistilledGraph distill(const ApproxDelaunayGraph& g, std::uint32_t mcs) {
    if (mcs < 2) throw InvalidMcs("minimum cluster size must be >= 2");
    const std::uint32_t n = static_cast<std::uint32_t>(g.n_vertices());

    const std::vector<ForestEdge> forest = minimum_spanning_forest(g);
    const Dendrogram dendrogram = build_dendrogram(n, forest);
    const CondensedTree tree = condense(dendrogram, mcs);
    const std::vector<std::uint32_t> chosen = select_clusters(tree);

    // Flat membership: every point that was inside a selected cluster at its
    // birth belongs to it; everything departing above the selection is noise.
    std::vector<std::int32_t> label(n, -1);
    std::vector<std::vector<std::uint32_t>> members(chosen.size());
    for (std::size_t c = 0; c < chosen.size(); ++c) {
        std::vector<std::uint32_t> stack{chosen[c]};
        while (!stack.empty()) {
            const CondensedCluster& cluster = tree.clusters[stack.back()];
            stack.pop_back();
            for (const auto& [point, lambda] : cluster.point_departures) {
                if (label[point] != -1) throw InternalError("point claimed by two clusters");
                label[point] = static_cast<std::int32_t>(c);
                members[c].push_back(point);
            }
            if (cluster.child_a >= 0) {
                stack.push_back(static_cast<std::uint32_t>(cluster.child_a));
                stack.push_back(static_cast<std::uint32_t>(cluster.child_b));
            }
        }
        if (members[c].size() < mcs)
            throw InternalError("selected cluster smaller than the minimum cluster size");
    }

    // Canonical component order: size descending, then smallest vertex id.
    for (auto& m : members) std::sort(m.begin(), m.end());
    std::vector<std::uint32_t> order(members.size());
    std::iota(order.begin(), order.end(), 0u);
    std::sort(order.begin(), order.end(), [&](std::uint32_t a, std::uint32_t b) {
        if (members[a].size() != members[b].size()) return members[a].size() > members[b].size();
        return members[a].front() < members[b].front();
    });

    std::vector<std::vector<std::uint32_t>> components;
    components.reserve(members.size());
    std::vector<std::int32_t> final_label(n, -1);
    for (std::uint32_t rank = 0; rank < order.size(); ++rank) {
        components.push_back(std::move(members[order[rank]]));
        for (std::uint32_t v : components.back()) final_label[v] = static_cast<std::int32_t>(rank);
    }

    std::vector<std::vector<ComponentEdge>> component_edges(components.size());
    for (const GraphEdge& e : g.edges()) {
        const std::int32_t ci = final_label[e.i];
        if (ci >= 0 && ci == final_label[e.j])
            component_edges[ci].push_back({e.i, e.j, e.length});
    }

    // Clusters are unions of spanning-tree subtrees, so each induced
    // subgraph must come out connected.
    for (std::size_t c = 0; c < components.size(); ++c) {
        UnionFind uf(n);
        std::size_t unions = 0;
        for (const ComponentEdge& e : component_edges[c])
            if (uf.unite(e.a, e.b)) ++unions;
        if (unions + 1 != components[c].size())
            throw InternalError("selected cluster induced a disconnected subgraph");
    }

    std::vector<std::uint32_t> outliers;
    for (std::uint32_t v = 0; v < n; ++v)
        if (final_label[v] == -1) outliers.push_back(v);

    return DistilledGraph(n, mcs, std::move(components), std::move(component_edges),
                          std::move(outliers));
}

} // namespace dca
