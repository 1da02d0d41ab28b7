#pragma once

#include <cstdint>
#include <vector>

#include "dca/delaunay.hpp"

namespace dca {

struct ForestEdge {
    std::uint32_t a = 0;
    std::uint32_t b = 0;
    double length = 0.0;
};

/// Minimum spanning forest of the graph under Euclidean edge lengths, one
/// tree per connected component. Returned in the deterministic Kruskal
/// acceptance order: ascending (length, i, j).
std::vector<ForestEdge> minimum_spanning_forest(const ApproxDelaunayGraph& g);

/// Single-linkage merge hierarchy over the spanning forest. Leaves are the
/// vertex ids 0..n-1; merge k creates node id n+k. Each connected component
/// contributes its own root.
struct DendrogramMerge {
    std::uint32_t left = 0;
    std::uint32_t right = 0;
    double distance = 0.0;
    std::uint32_t size = 0;
};

struct Dendrogram {
    std::uint32_t n_points = 0;
    std::vector<DendrogramMerge> merges;
    std::vector<std::uint32_t> roots; // node ids, one per connected component
};

Dendrogram build_dendrogram(std::uint32_t n_points, const std::vector<ForestEdge>& sorted_edges);

/// Condensed hierarchy: dendrogram splits with both sides >= mcs become real
/// cluster splits; smaller sides fall out of the surviving cluster as points.
/// Lambda is 1/distance (infinite for zero distance), cluster stability is
/// the summed lambda lifetime of its points.
struct CondensedCluster {
    double birth_lambda = 0.0;
    std::uint32_t size_at_birth = 0;
    std::int32_t parent = -1;
    std::int32_t child_a = -1;
    std::int32_t child_b = -1;
    double stability = 0.0;
    std::vector<std::pair<std::uint32_t, double>> point_departures; // (point id, lambda)
};

struct CondensedTree {
    std::vector<CondensedCluster> clusters;
    std::vector<std::uint32_t> roots; // indices into clusters
};

CondensedTree condense(const Dendrogram& dendrogram, std::uint32_t mcs);

/// Excess-of-mass cluster selection: a parent replaces its descendants when
/// its stability reaches the sum of their selected stabilities; the root of a
/// component may itself win. Returns indices of selected clusters.
std::vector<std::uint32_t> select_clusters(const CondensedTree& tree);

struct ComponentEdge {
    std::uint32_t a = 0;
    std::uint32_t b = 0;
    double length = 0.0;
};

/// Partition of the graph vertices into connected components (the selected
/// condensed clusters with their induced edges) plus outliers. Components are
/// ordered by size descending, then smallest member id.
class DistilledGraph {
public:
    DistilledGraph(std::uint32_t n_vertices, std::uint32_t mcs,
                   std::vector<std::vector<std::uint32_t>> components,
                   std::vector<std::vector<ComponentEdge>> component_edges,
                   std::vector<std::uint32_t> outliers);

    std::uint32_t n_vertices() const { return n_vertices_; }
    std::uint32_t mcs() const { return mcs_; }
    std::size_t n_components() const { return components_.size(); }

    const std::vector<std::uint32_t>& component(std::size_t c) const { return components_[c]; }
    const std::vector<ComponentEdge>& component_edges(std::size_t c) const {
        return component_edges_[c];
    }
    const std::vector<std::uint32_t>& outliers() const { return outliers_; }

    /// Component index of a vertex, or -1 for outliers.
    std::int32_t component_of(std::uint32_t v) const { return component_of_[v]; }
    const std::vector<std::int32_t>& component_map() const { return component_of_; }

    std::size_t assigned_count() const { return n_vertices_ - outliers_.size(); }

private:
    std::uint32_t n_vertices_ = 0;
    std::uint32_t mcs_ = 0;
    std::vector<std::vector<std::uint32_t>> components_;
    std::vector<std::vector<ComponentEdge>> component_edges_;
    std::vector<std::uint32_t> outliers_;
    std::vector<std::int32_t> component_of_;
};

/// Full distillation pass over an approximated graph. mcs must be >= 2.
DistilledGraph distill(const ApproxDelaunayGraph& g, std::uint32_t mcs);

} // namespace dca
