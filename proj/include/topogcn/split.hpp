#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "topogcn/graph.hpp"

namespace topogcn {

struct LabeledDataset;

/// Train/test partition of the node set. Both lists are sorted.
struct SplitMask {
    std::vector<NodeId> train;
    std::vector<NodeId> test;
    std::uint64_t seed = 0;
    double train_fraction = 0.0;

    /// Dense membership flags, one per node.
    std::vector<bool> train_flags(std::size_t n_nodes) const;
};

/// Number of training nodes for a fraction: round(fraction * n).
std::size_t train_size(double train_fraction, std::size_t n_nodes);

/// `n_splits` independent uniform train/test partitions. Split k draws from a
/// stream derived from (seed, k), so a split does not depend on how many
/// others were requested.
std::vector<SplitMask> make_splits(std::size_t n_nodes, double train_fraction, std::size_t n_splits,
                                   std::uint64_t seed);
std::vector<SplitMask> make_splits(const LabeledDataset &ds, double train_fraction, std::size_t n_splits,
                                   std::uint64_t seed);

} // namespace topogcn
