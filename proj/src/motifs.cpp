#include "topogcn/motifs.hpp"

#include <algorithm>
#include <array>
#include <numeric>
#include <stdexcept>
#include <string>

namespace topogcn {

namespace {

void check_size(int size) {
    if (size != 3 && size != 4) {
        throw std::invalid_argument("motif size must be 3 or 4, got " + std::to_string(size));
    }
}

std::uint32_t permute_code(std::uint32_t code, int k, const std::array<int, 4> &perm) {
    // New position p holds old node perm[p].
    std::uint32_t out = 0;
    for (int i = 0; i < k; ++i) {
        for (int j = 0; j < k; ++j) {
            if (i != j && (code >> (perm[i] * k + perm[j]) & 1U)) {
                out |= 1U << (i * k + j);
            }
        }
    }
    return out;
}

bool weakly_connected(std::uint32_t code, int k) {
    std::uint32_t seen = 1;
    bool grew = true;
    while (grew) {
        grew = false;
        for (int i = 0; i < k; ++i) {
            if (!(seen >> i & 1U)) {
                continue;
            }
            for (int j = 0; j < k; ++j) {
                if (!(seen >> j & 1U) && ((code >> (i * k + j) & 1U) || (code >> (j * k + i) & 1U))) {
                    seen |= 1U << j;
                    grew = true;
                }
            }
        }
    }
    return seen == (1U << k) - 1;
}

bool symmetric(std::uint32_t code, int k) {
    for (int i = 0; i < k; ++i) {
        for (int j = 0; j < k; ++j) {
            if ((code >> (i * k + j) & 1U) != (code >> (j * k + i) & 1U)) {
                return false;
            }
        }
    }
    return true;
}

/// ESU enumeration of connected induced subgraphs of `size` nodes on the
/// undirected view. Every subgraph is reported exactly once.
template <class Visit>
void enumerate_connected(const DirectedGraph &g, int size, Visit &&visit) {
    std::array<NodeId, 4> sub{};

    auto adjacent_to_sub = [&](NodeId u, int depth) {
        for (int d = 0; d < depth; ++d) {
            auto nb = g.undirected(sub[d]);
            if (sub[d] == u || std::binary_search(nb.begin(), nb.end(), u)) {
                return true;
            }
        }
        return false;
    };

    auto extend = [&](auto &self, int depth, std::vector<NodeId> ext, NodeId root) -> void {
        if (depth == size) {
            visit(std::span<const NodeId>(sub.data(), static_cast<std::size_t>(size)));
            return;
        }
        while (!ext.empty()) {
            NodeId w = ext.back();
            ext.pop_back();
            std::vector<NodeId> next = ext;
            if (depth + 1 < size) {
                for (NodeId u : g.undirected(w)) {
                    if (u > root && !adjacent_to_sub(u, depth) &&
                        std::find(next.begin(), next.end(), u) == next.end()) {
                        next.push_back(u);
                    }
                }
            }
            sub[depth] = w;
            self(self, depth + 1, std::move(next), root);
        }
    };

    for (NodeId v = 0; v < g.n_nodes(); ++v) {
        sub[0] = v;
        std::vector<NodeId> ext;
        for (NodeId u : g.undirected(v)) {
            if (u > v) {
                ext.push_back(u);
            }
        }
        extend(extend, 1, std::move(ext), v);
    }
}

} // namespace

MotifCatalog::MotifCatalog(int size, bool directed) : size_(size), directed_(directed) {
    check_size(size);
    const std::uint32_t n_codes = 1U << (size * size);
    std::vector<std::array<int, 4>> perms;
    std::array<int, 4> p{0, 1, 2, 3};
    do {
        perms.push_back(p);
    } while (std::next_permutation(p.begin(), p.begin() + size));

    std::vector<std::uint32_t> canonical_of(n_codes, 0);
    std::vector<bool> valid(n_codes, false);
    for (std::uint32_t code = 0; code < n_codes; ++code) {
        bool has_diag = false;
        for (int i = 0; i < size; ++i) {
            has_diag = has_diag || (code >> (i * size + i) & 1U);
        }
        if (has_diag || !weakly_connected(code, size) || (!directed && !symmetric(code, size))) {
            continue;
        }
        valid[code] = true;
        std::uint32_t best = code;
        for (const auto &perm : perms) {
            best = std::min(best, permute_code(code, size, perm));
        }
        canonical_of[code] = best;
        if (best == code) {
            canonical_.push_back(code);
        }
    }
    // Codes were visited in ascending order, so canonical_ is already sorted.
    class_of_code_.assign(n_codes, -1);
    for (std::uint32_t code = 0; code < n_codes; ++code) {
        if (valid[code]) {
            auto it = std::lower_bound(canonical_.begin(), canonical_.end(), canonical_of[code]);
            class_of_code_[code] = static_cast<int>(it - canonical_.begin());
        }
    }
}

std::uint32_t subgraph_code(const DirectedGraph &g, std::span<const NodeId> nodes) {
    const auto k = nodes.size();
    std::uint32_t code = 0;
    for (std::size_t i = 0; i < k; ++i) {
        auto succ = g.out(nodes[i]);
        for (std::size_t j = 0; j < k; ++j) {
            if (i != j && std::binary_search(succ.begin(), succ.end(), nodes[j])) {
                code |= 1U << (i * k + j);
            }
        }
    }
    return code;
}

std::vector<std::vector<std::uint64_t>> motif_counts(const DirectedGraph &g, int size, bool directed) {
    check_size(size);
    const MotifCatalog catalog(size, directed);
    const DirectedGraph sym = directed ? DirectedGraph() : g.symmetrized();
    const DirectedGraph &work = directed ? g : sym;

    std::vector<std::vector<std::uint64_t>> counts(g.n_nodes(), std::vector<std::uint64_t>(catalog.n_classes(), 0));
    enumerate_connected(work, size, [&](std::span<const NodeId> nodes) {
        const int cls = catalog.class_of(subgraph_code(work, nodes));
        for (NodeId u : nodes) {
            ++counts[u][static_cast<std::size_t>(cls)];
        }
    });
    return counts;
}

std::vector<std::uint64_t> motif_totals(const DirectedGraph &g, int size, bool directed) {
    check_size(size);
    const MotifCatalog catalog(size, directed);
    const DirectedGraph sym = directed ? DirectedGraph() : g.symmetrized();
    const DirectedGraph &work = directed ? g : sym;

    std::vector<std::uint64_t> totals(catalog.n_classes(), 0);
    enumerate_connected(work, size, [&](std::span<const NodeId> nodes) {
        ++totals[static_cast<std::size_t>(catalog.class_of(subgraph_code(work, nodes)))];
    });
    return totals;
}

} // namespace topogcn
