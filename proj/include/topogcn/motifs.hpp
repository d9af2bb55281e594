#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "topogcn/graph.hpp"

namespace topogcn {

/// Isomorphism classes of connected k-node subgraphs (k = 3 or 4).
///
/// A k-node subgraph with nodes ordered s_0..s_{k-1} is encoded as the bit
/// pattern with bit i*k+j set iff s_i -> s_j. The canonical code of a class is
/// the smallest code over all k! reorderings. Class ids number the connected
/// classes by ascending canonical code, which gives 13 directed classes for
/// k = 3 and 199 for k = 4 (2 and 6 in undirected mode, where only symmetric
/// patterns exist).
class MotifCatalog {
  public:
    MotifCatalog(int size, bool directed = true);

    int size() const { return size_; }
    bool directed() const { return directed_; }
    std::size_t n_classes() const { return canonical_.size(); }

    /// Class id of an adjacency code, or -1 when the pattern is disconnected.
    int class_of(std::uint32_t code) const { return class_of_code_[code]; }
    std::uint32_t canonical_code(std::size_t class_id) const { return canonical_[class_id]; }

  private:
    int size_;
    bool directed_;
    std::vector<int> class_of_code_;
    std::vector<std::uint32_t> canonical_;
};

/// Adjacency code of the ordered node tuple `nodes` in `g`.
std::uint32_t subgraph_code(const DirectedGraph &g, std::span<const NodeId> nodes);

/// Per node, per class: number of connected induced k-node subgraphs that
/// contain the node. Result is n_nodes rows of catalog.n_classes() counts.
/// In undirected mode the graph is symmetrized first. Throws
/// std::invalid_argument for sizes other than 3 and 4.
std::vector<std::vector<std::uint64_t>> motif_counts(const DirectedGraph &g, int size, bool directed = true);

/// Total number of induced subgraphs per class (each counted once).
std::vector<std::uint64_t> motif_totals(const DirectedGraph &g, int size, bool directed = true);

} // namespace topogcn
