#include "topogcn/propagation.hpp"

#include <algorithm>
#include <stdexcept>

namespace topogcn {

namespace {

ClassCountMatrix empty_counts(const LabeledDataset &ds) {
    ClassCountMatrix v;
    v.n_classes = ds.n_classes;
    v.values = DenseMatrix(ds.n_nodes(), ds.n_classes + 1);
    for (std::size_t i = 0; i < ds.n_nodes(); ++i) {
        v.values(i, ds.n_classes) = 1.0;
    }
    return v;
}

std::span<const NodeId> neighbors(const DirectedGraph &g, NodeId u, Neighborhood nb) {
    switch (nb) {
    case Neighborhood::in:
        return g.in(u);
    case Neighborhood::out:
        return g.out(u);
    case Neighborhood::both:
        break;
    }
    return g.undirected(u);
}

std::span<const NodeId> step(const DirectedGraph &g, NodeId u, char symbol) {
    return symbol == 'A' ? g.out(u) : g.in(u);
}

/// Row-normalize columns [begin, begin + width) by their sum when positive.
void normalize_block(DenseMatrix &m, std::size_t begin, std::size_t width) {
    for (std::size_t r = 0; r < m.rows(); ++r) {
        double total = 0.0;
        for (std::size_t c = begin; c < begin + width; ++c) {
            total += m(r, c);
        }
        if (total > 0.0) {
            for (std::size_t c = begin; c < begin + width; ++c) {
                m(r, c) /= total;
            }
        }
    }
}

} // namespace

ClassCountMatrix build_v(const LabeledDataset &ds, const SplitMask &mask, Neighborhood neighborhood) {
    auto v = empty_counts(ds);
    const auto is_train = mask.train_flags(ds.n_nodes());
    for (NodeId i = 0; i < ds.n_nodes(); ++i) {
        for (NodeId j : neighbors(ds.graph, i, neighborhood)) {
            if (j != i && is_train[j]) {
                v.values(i, ds.labels[j]) += 1.0;
            }
        }
    }
    return v;
}

ClassCountMatrix training_one_hot(const LabeledDataset &ds, const SplitMask &mask) {
    auto v = empty_counts(ds);
    for (NodeId i : mask.train) {
        v.values(i, ds.labels[i]) = 1.0;
    }
    return v;
}

void validate_word(const std::string &word) {
    if (word.empty() || word.size() > 3) {
        throw std::invalid_argument("adjacency word `" + word + "` must have 1 to 3 symbols");
    }
    for (char s : word) {
        if (s != 'A' && s != 'T') {
            throw std::invalid_argument("adjacency word `" + word + "` has symbol `" + std::string(1, s) +
                                        "`; only A and T are allowed");
        }
    }
}

DenseMatrix adjacency_products(const DirectedGraph &g, const DenseMatrix &v, const std::vector<std::string> &words) {
    if (v.rows() != g.n_nodes()) {
        throw ShapeError("adjacency_products: matrix has " + std::to_string(v.rows()) + " rows for " +
                         std::to_string(g.n_nodes()) + " nodes");
    }
    for (const auto &w : words) {
        validate_word(w);
    }
    const auto n = g.n_nodes();
    const auto width = v.cols();
    DenseMatrix out(n, width * words.size());
    for (std::size_t k = 0; k < words.size(); ++k) {
        DenseMatrix current = v;
        const auto &word = words[k];
        for (auto it = word.rbegin(); it != word.rend(); ++it) {
            // (A X)_i sums X over successors of i; (A^T X)_i over predecessors.
            DenseMatrix next(n, width);
            for (NodeId i = 0; i < n; ++i) {
                auto dst = next.row(i);
                for (NodeId j : step(g, i, *it)) {
                    auto src = current.row(j);
                    for (std::size_t c = 0; c < width; ++c) {
                        dst[c] += src[c];
                    }
                }
            }
            current = std::move(next);
        }
        for (NodeId i = 0; i < n; ++i) {
            auto src = current.row(i);
            std::copy(src.begin(), src.end(), out.row(i).begin() + static_cast<std::ptrdiff_t>(k * width));
        }
    }
    return out;
}

std::vector<double> closed_walks(const DirectedGraph &g, const std::string &word) {
    validate_word(word);
    const auto n = g.n_nodes();
    std::vector<double> diag(n, 0.0);
    for (NodeId i = 0; i < n; ++i) {
        double count = 0.0;
        if (word.size() == 1) {
            auto nb = step(g, i, word[0]);
            count = std::binary_search(nb.begin(), nb.end(), i) ? 1.0 : 0.0;
        } else if (word.size() == 2) {
            for (NodeId a : step(g, i, word[0])) {
                auto nb = step(g, a, word[1]);
                count += std::binary_search(nb.begin(), nb.end(), i) ? 1.0 : 0.0;
            }
        } else {
            for (NodeId a : step(g, i, word[0])) {
                for (NodeId b : step(g, a, word[1])) {
                    auto nb = step(g, b, word[2]);
                    count += std::binary_search(nb.begin(), nb.end(), i) ? 1.0 : 0.0;
                }
            }
        }
        diag[i] = count;
    }
    return diag;
}

std::vector<std::string> default_words() { return {"A", "T", "AT", "TA", "AA", "TT"}; }

DenseMatrix product_features(const LabeledDataset &ds, const SplitMask &mask, const std::vector<std::string> &words) {
    const auto base = training_one_hot(ds, mask);
    auto out = adjacency_products(ds.graph, base.values, words);
    const auto width = base.values.cols();
    for (std::size_t k = 0; k < words.size(); ++k) {
        const auto diag = closed_walks(ds.graph, words[k]);
        for (NodeId i : mask.train) {
            out(i, k * width + ds.labels[i]) -= diag[i];
        }
    }
    return out;
}

ClassCountMatrix second_neighbor_counts(const LabeledDataset &ds, const SplitMask &mask, SecondNeighborMode mode) {
    auto v = empty_counts(ds);
    const auto is_train = mask.train_flags(ds.n_nodes());
    const auto &g = ds.graph;
    std::vector<NodeId> stamp(ds.n_nodes(), static_cast<NodeId>(-1));
    for (NodeId i = 0; i < ds.n_nodes(); ++i) {
        for (NodeId j : g.undirected(i)) {
            for (NodeId k : g.undirected(j)) {
                if (k == i || !is_train[k]) {
                    continue;
                }
                if (mode == SecondNeighborMode::distinct) {
                    if (stamp[k] == i) {
                        continue;
                    }
                    stamp[k] = i;
                }
                v.values(i, ds.labels[k]) += 1.0;
            }
        }
    }
    return v;
}

DenseMatrix gcn_input(const LabeledDataset &ds, const SplitMask &mask, const GcnInputOptions &options) {
    const auto c = ds.n_classes;
    DenseMatrix out(ds.n_nodes(), 0);
    if (options.first_neighbors) {
        auto first = build_v(ds, mask, Neighborhood::both).values;
        normalize_block(first, 0, c);
        out = std::move(first);
    }
    if (options.second_neighbors) {
        auto second = second_neighbor_counts(ds, mask, options.second_mode).values;
        normalize_block(second, 0, c);
        out = out.cols() == 0 ? std::move(second) : hconcat(out, second);
    }
    return out;
}

} // namespace topogcn
