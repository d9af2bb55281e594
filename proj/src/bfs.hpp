#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "topogcn/graph.hpp"

namespace topogcn::detail {

enum class Walk { out, in, undirected };

inline std::span<const NodeId> step(const DirectedGraph &g, NodeId u, Walk walk) {
    switch (walk) {
    case Walk::out:
        return g.out(u);
    case Walk::in:
        return g.in(u);
    case Walk::undirected:
        break;
    }
    return g.undirected(u);
}

inline constexpr std::int32_t unreachable = -1;

/// Hop distances from `source`; `order` receives visited nodes in BFS order.
/// `dist` must be sized n_nodes and filled with `unreachable` on entry; the
/// caller resets the visited entries afterwards via `order`.
inline void bfs(const DirectedGraph &g, NodeId source, Walk walk, std::vector<std::int32_t> &dist,
                std::vector<NodeId> &order) {
    order.clear();
    dist[source] = 0;
    order.push_back(source);
    for (std::size_t head = 0; head < order.size(); ++head) {
        const NodeId u = order[head];
        for (NodeId v : step(g, u, walk)) {
            if (dist[v] == unreachable) {
                dist[v] = dist[u] + 1;
                order.push_back(v);
            }
        }
    }
}

inline void reset(std::vector<std::int32_t> &dist, const std::vector<NodeId> &order) {
    for (NodeId v : order) {
        dist[v] = unreachable;
    }
}

} // namespace topogcn::detail
