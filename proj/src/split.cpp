#include "topogcn/split.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

#include "topogcn/dataset.hpp"
#include "topogcn/rng.hpp"

namespace topogcn {

std::vector<bool> SplitMask::train_flags(std::size_t n_nodes) const {
    std::vector<bool> flags(n_nodes, false);
    for (NodeId u : train) {
        flags[u] = true;
    }
    return flags;
}

std::size_t train_size(double train_fraction, std::size_t n_nodes) {
    return static_cast<std::size_t>(std::llround(train_fraction * static_cast<double>(n_nodes)));
}

std::vector<SplitMask> make_splits(std::size_t n_nodes, double train_fraction, std::size_t n_splits,
                                   std::uint64_t seed) {
    if (!(train_fraction > 0.0 && train_fraction < 1.0)) {
        throw std::invalid_argument("make_splits: train fraction must lie in (0, 1)");
    }
    if (n_splits == 0) {
        throw std::invalid_argument("make_splits: need at least one split");
    }
    const auto n_train = train_size(train_fraction, n_nodes);
    if (n_train == 0 || n_train >= n_nodes) {
        throw std::invalid_argument("make_splits: fraction " + std::to_string(train_fraction) + " of " +
                                    std::to_string(n_nodes) + " nodes leaves an empty train or test set");
    }

    std::vector<SplitMask> splits;
    splits.reserve(n_splits);
    for (std::size_t k = 0; k < n_splits; ++k) {
        Rng rng(mix_seed(seed, k));
        std::vector<NodeId> order(n_nodes);
        std::iota(order.begin(), order.end(), NodeId{0});
        // Partial Fisher-Yates: the first n_train slots are a uniform sample.
        for (std::size_t i = 0; i < n_train; ++i) {
            auto j = i + uniform_below(rng, n_nodes - i);
            std::swap(order[i], order[j]);
        }
        SplitMask mask;
        mask.seed = seed;
        mask.train_fraction = train_fraction;
        mask.train.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n_train));
        mask.test.assign(order.begin() + static_cast<std::ptrdiff_t>(n_train), order.end());
        std::sort(mask.train.begin(), mask.train.end());
        std::sort(mask.test.begin(), mask.test.end());
        splits.push_back(std::move(mask));
    }
    return splits;
}

std::vector<SplitMask> make_splits(const LabeledDataset &ds, double train_fraction, std::size_t n_splits,
                                   std::uint64_t seed) {
    return make_splits(ds.n_nodes(), train_fraction, n_splits, seed);
}

} // namespace topogcn
