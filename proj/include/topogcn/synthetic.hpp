#pragma once

#include <cstddef>
#include <cstdint>

#include "topogcn/dataset.hpp"

namespace topogcn {

/// Citation-like digraph with planted classes. Node i cites earlier nodes
/// only; each citation stays inside i's class with probability `homophily`.
struct SyntheticParams {
    std::size_t n_nodes = 200;
    std::size_t n_classes = 4;
    /// Citations drawn per node (fewer for the first nodes).
    std::size_t citations = 3;
    double homophily = 0.8;
    /// Bag-of-words width; each class owns a block of vocabulary / n_classes words.
    std::size_t vocabulary = 40;
    double own_word_rate = 0.3;
    double other_word_rate = 0.05;
    std::uint64_t seed = 0;
};

/// Throws std::invalid_argument for zero nodes or classes, or rates outside [0, 1].
LabeledDataset synthetic_citation_graph(const SyntheticParams &params);

} // namespace topogcn
