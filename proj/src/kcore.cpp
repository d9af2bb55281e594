#include <algorithm>

#include "topogcn/features.hpp"

namespace topogcn {

// Batagelj-Zaversnik bucket peeling, O(n + m).
Column k_core(const DirectedGraph &g) {
    const auto n = g.n_nodes();
    std::vector<std::size_t> deg(n);
    std::size_t max_deg = 0;
    for (NodeId u = 0; u < n; ++u) {
        deg[u] = g.undirected(u).size();
        max_deg = std::max(max_deg, deg[u]);
    }

    std::vector<std::size_t> bin(max_deg + 1, 0);
    for (auto d : deg) {
        ++bin[d];
    }
    std::size_t start = 0;
    for (auto &b : bin) {
        const auto count = b;
        b = start;
        start += count;
    }
    std::vector<NodeId> vert(n);
    std::vector<std::size_t> pos(n);
    for (NodeId u = 0; u < n; ++u) {
        pos[u] = bin[deg[u]]++;
        vert[pos[u]] = u;
    }
    for (std::size_t d = max_deg; d > 0; --d) {
        bin[d] = bin[d - 1];
    }
    if (!bin.empty()) {
        bin[0] = 0;
    }

    for (std::size_t i = 0; i < n; ++i) {
        const NodeId v = vert[i];
        for (NodeId u : g.undirected(v)) {
            if (deg[u] > deg[v]) {
                const auto du = deg[u];
                const auto pu = pos[u];
                const auto pw = bin[du];
                const NodeId w = vert[pw];
                if (u != w) {
                    std::swap(vert[pu], vert[pw]);
                    pos[u] = pw;
                    pos[w] = pu;
                }
                ++bin[du];
                --deg[u];
            }
        }
    }
    return Column(deg.begin(), deg.end());
}

} // namespace topogcn
