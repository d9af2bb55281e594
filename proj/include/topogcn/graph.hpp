#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

namespace topogcn {

using NodeId = std::uint32_t;
using Edge = std::pair<NodeId, NodeId>;

/// Counts of input edges discarded while building a graph.
struct EdgeCleanup {
    std::size_t self_loops = 0;
    std::size_t duplicates = 0;
};

/// Immutable directed graph with sorted successor and predecessor indexes.
///
/// Self-loops and duplicate edges are dropped on construction. An undirected
/// view (sorted union of in- and out-neighbors, one entry per adjacent node) is
/// built alongside, since most measures need it.
class DirectedGraph {
  public:
    DirectedGraph() = default;
    DirectedGraph(std::size_t n_nodes, std::span<const Edge> edges, EdgeCleanup *cleanup = nullptr);

    std::size_t n_nodes() const noexcept { return n_nodes_; }
    std::size_t n_edges() const noexcept { return out_idx_.size(); }
    /// Number of distinct unordered adjacent pairs.
    std::size_t n_undirected_edges() const noexcept { return und_idx_.size() / 2; }

    std::span<const NodeId> out(NodeId u) const { return slice(out_ptr_, out_idx_, u); }
    std::span<const NodeId> in(NodeId v) const { return slice(in_ptr_, in_idx_, v); }
    std::span<const NodeId> undirected(NodeId u) const { return slice(und_ptr_, und_idx_, u); }

    std::size_t out_degree(NodeId u) const { return out_ptr_[u + 1] - out_ptr_[u]; }
    std::size_t in_degree(NodeId u) const { return in_ptr_[u + 1] - in_ptr_[u]; }

    bool has_edge(NodeId u, NodeId v) const;

    /// Edges in (source, target) lexicographic order.
    std::vector<Edge> edges() const;

    /// Graph with every edge reversed.
    DirectedGraph reversed() const;
    /// Graph whose edge set is the symmetric closure of this one.
    DirectedGraph symmetrized() const;
    /// Induced subgraph on `nodes`; node k of the result is nodes[k].
    DirectedGraph induced(std::span<const NodeId> nodes) const;
    /// Relabel node u as perm[u].
    DirectedGraph permuted(std::span<const NodeId> perm) const;

  private:
    static std::span<const NodeId> slice(const std::vector<std::size_t> &ptr, const std::vector<NodeId> &idx,
                                         NodeId u) {
        return {idx.data() + ptr[u], ptr[u + 1] - ptr[u]};
    }

    std::size_t n_nodes_ = 0;
    std::vector<std::size_t> out_ptr_{0};
    std::vector<NodeId> out_idx_;
    std::vector<std::size_t> in_ptr_{0};
    std::vector<NodeId> in_idx_;
    std::vector<std::size_t> und_ptr_{0};
    std::vector<NodeId> und_idx_;
};

/// Weakly connected component id per node, numbered by smallest member.
std::vector<std::uint32_t> weak_components(const DirectedGraph &g);

} // namespace topogcn
