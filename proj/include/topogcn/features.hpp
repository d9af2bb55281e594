#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "topogcn/graph.hpp"

namespace topogcn {

using Column = std::vector<double>;

struct NamedColumn {
    std::string name;
    Column values;
};

/// Node x feature table. Every value is finite and column names are unique.
class FeatureTable {
  public:
    explicit FeatureTable(std::size_t n_nodes = 0) : n_nodes_(n_nodes) {}

    void add(std::string name, Column values);

    std::size_t n_nodes() const { return n_nodes_; }
    std::size_t n_columns() const { return columns_.size(); }
    const std::vector<NamedColumn> &columns() const { return columns_; }
    const NamedColumn &column(std::size_t k) const { return columns_.at(k); }
    const Column &column(const std::string &name) const;

    /// Parameters the table was computed with, recorded as text.
    std::map<std::string, std::string> metadata;

    /// Per column: subtract mean, divide by population std. Constant columns become 0.
    void zscore();

  private:
    std::size_t n_nodes_;
    std::vector<NamedColumn> columns_;
};

// Each measure below treats edges as unit length and imputes 0 where the
// measure is undefined (isolated nodes, nothing reachable).

struct DegreeColumns {
    Column in_degree;
    Column out_degree;
};
DegreeColumns degree_features(const DirectedGraph &g);

/// Mean total degree (in + out) of the distinct undirected neighbors.
Column average_neighbor_degree(const DirectedGraph &g);

/// Brandes accumulation over directed shortest-path DAGs, unnormalized.
Column betweenness_centrality(const DirectedGraph &g);

/// Load: one unit sent from every s to every reachable t, split evenly at each
/// node among the successors that stay on a shortest path to t. Endpoints excluded.
Column load_centrality(const DirectedGraph &g);

/// reachable count / sum of directed distances to reachable nodes.
Column closeness_centrality(const DirectedGraph &g);

/// Largest finite directed distance from the node.
Column eccentricity(const DirectedGraph &g);

struct DistanceMoments {
    Column mean;
    Column second_moment;
};
/// First and second raw moments of the finite directed distances from each node.
DistanceMoments bfs_moments(const DirectedGraph &g);

/// Mean ratio of undirected to directed distance over the directed out-reach
/// set B(u), zeroed when |B(u)| / max |B| does not exceed `threshold`.
Column flow(const DirectedGraph &g, double threshold = 0.5);

/// Attraction basin: discounted, shell-normalized in-reach over out-reach.
Column attraction_basin(const DirectedGraph &g, double alpha = 2.0);

/// Core number on the simple undirected version of the graph.
Column k_core(const DirectedGraph &g);

struct LouvainResult {
    /// Community per node, numbered by first appearance in node order.
    std::vector<std::uint32_t> community;
    std::vector<std::size_t> community_sizes;
    double modularity = 0.0;
};
/// Multi-level Louvain on the simple undirected graph with unit weights.
LouvainResult louvain(const DirectedGraph &g, std::uint64_t seed);
/// Q = (1/2m) sum_ij [A_ij - k_i k_j / 2m] delta(c_i, c_j) on the simple undirected graph.
double modularity(const DirectedGraph &g, const std::vector<std::uint32_t> &community);

struct LouvainColumns {
    Column community_size;
    Column community_id;
};
LouvainColumns louvain_features(const DirectedGraph &g, std::uint64_t seed);

/// Power iteration with uniform teleport and uniform redistribution of dangling mass.
Column pagerank(const DirectedGraph &g, double damping = 0.85, double tol = 1e-10);

/// Unit eigenvector of the second-smallest Laplacian eigenvalue on the largest
/// undirected component; first nonzero entry positive; 0 outside that component.
Column fiedler_vector(const DirectedGraph &g);

struct FeatureParams {
    double flow_threshold = 0.5;
    double attraction_alpha = 2.0;
    double pagerank_damping = 0.85;
    double pagerank_tol = 1e-10;
    std::uint64_t louvain_seed = 0;
    bool motif3 = true;
    bool motif4 = true;
    /// Count motifs on the symmetrized graph instead of the directed one.
    bool undirected_motifs = false;
};

/// Every measure above concatenated in a fixed order, then z-scored.
FeatureTable extract_all(const DirectedGraph &g, const FeatureParams &params = {});

/// Column names extract_all produces for `params`, in order.
std::vector<std::string> feature_catalog(const FeatureParams &params = {});

} // namespace topogcn
