#pragma once

#include <string>
#include <vector>

#include "topogcn/dataset.hpp"
#include "topogcn/matrix.hpp"
#include "topogcn/split.hpp"

namespace topogcn {

/// Node x (C + 1) counts: column j < C counts training nodes of class j in
/// some neighborhood of the row's node, column C is constant 1.
struct ClassCountMatrix {
    std::size_t n_classes = 0;
    DenseMatrix values;

    std::size_t n_nodes() const { return values.rows(); }
};

enum class Neighborhood { in, out, both };

/// Counts over direct neighbors: predecessors (`in`), successors (`out`) or
/// the distinct undirected neighbors (`both`). Only training labels are read.
ClassCountMatrix build_v(const LabeledDataset &ds, const SplitMask &mask, Neighborhood neighborhood);

/// Row i is the one-hot class of node i when i is a training node (zeros
/// otherwise), plus the constant column. The base matrix that adjacency
/// products act on.
ClassCountMatrix training_one_hot(const LabeledDataset &ds, const SplitMask &mask);

/// Throws std::invalid_argument for an empty word, a word longer than 3 or a
/// symbol other than 'A' and 'T'.
void validate_word(const std::string &word);

/// For each word s1..sk over {A, T} (T meaning the transpose of A), computes
/// M_w * v with M_w = S1 * ... * Sk, evaluated right to left as sparse x
/// dense products, and concatenates the results column-wise in word order.
DenseMatrix adjacency_products(const DirectedGraph &g, const DenseMatrix &v, const std::vector<std::string> &words);

/// Number of closed walks i -> ... -> i that follow `word`, per node: the diagonal of M_w.
std::vector<double> closed_walks(const DirectedGraph &g, const std::string &word);

/// The default word family {A, T, AT, TA, AA, TT}.
std::vector<std::string> default_words();

/// adjacency_products on training_one_hot, with the contribution of each
/// training node's own label along closed walks removed from its row.
DenseMatrix product_features(const LabeledDataset &ds, const SplitMask &mask, const std::vector<std::string> &words);

enum class SecondNeighborMode {
    /// Length-2 undirected walks i - j - k with k != i, counted with multiplicity.
    walks,
    /// Each node at undirected distance 1 or 2 reachable by such a walk, once.
    distinct,
};

ClassCountMatrix second_neighbor_counts(const LabeledDataset &ds, const SplitMask &mask,
                                        SecondNeighborMode mode = SecondNeighborMode::walks);

struct GcnInputOptions {
    bool first_neighbors = true;
    bool second_neighbors = true;
    SecondNeighborMode second_mode = SecondNeighborMode::walks;
};

/// Topology-only GCN input: [first-neighbor block | second-neighbor block],
/// each block's class columns divided by their row sum when nonzero; the
/// constant columns stay 1. Width 2(C + 1) with both blocks enabled.
DenseMatrix gcn_input(const LabeledDataset &ds, const SplitMask &mask, const GcnInputOptions &options = {});

} // namespace topogcn
