#include <algorithm>
#include <cmath>

#include "bfs.hpp"
#include "topogcn/features.hpp"

namespace topogcn {

using detail::bfs;
using detail::reset;
using detail::unreachable;
using detail::Walk;

DegreeColumns degree_features(const DirectedGraph &g) {
    const auto n = g.n_nodes();
    DegreeColumns d{Column(n), Column(n)};
    for (NodeId u = 0; u < n; ++u) {
        d.in_degree[u] = static_cast<double>(g.in_degree(u));
        d.out_degree[u] = static_cast<double>(g.out_degree(u));
    }
    return d;
}

Column average_neighbor_degree(const DirectedGraph &g) {
    const auto n = g.n_nodes();
    Column result(n, 0.0);
    for (NodeId u = 0; u < n; ++u) {
        auto nb = g.undirected(u);
        if (nb.empty()) {
            continue;
        }
        double total = 0.0;
        for (NodeId v : nb) {
            total += static_cast<double>(g.in_degree(v) + g.out_degree(v));
        }
        result[u] = total / static_cast<double>(nb.size());
    }
    return result;
}

Column betweenness_centrality(const DirectedGraph &g) {
    const auto n = g.n_nodes();
    Column result(n, 0.0);
    std::vector<std::int32_t> dist(n, unreachable);
    std::vector<double> sigma(n, 0.0);
    std::vector<double> delta(n, 0.0);
    std::vector<NodeId> order;

    for (NodeId s = 0; s < n; ++s) {
        // BFS with path counting.
        order.clear();
        dist[s] = 0;
        sigma[s] = 1.0;
        order.push_back(s);
        for (std::size_t head = 0; head < order.size(); ++head) {
            const NodeId u = order[head];
            for (NodeId v : g.out(u)) {
                if (dist[v] == unreachable) {
                    dist[v] = dist[u] + 1;
                    order.push_back(v);
                }
                if (dist[v] == dist[u] + 1) {
                    sigma[v] += sigma[u];
                }
            }
        }
        // Dependency accumulation in reverse BFS order; predecessors of w are
        // the in-neighbors one level closer to s.
        for (auto it = order.rbegin(); it != order.rend(); ++it) {
            const NodeId w = *it;
            for (NodeId v : g.in(w)) {
                if (dist[v] != unreachable && dist[v] + 1 == dist[w]) {
                    delta[v] += sigma[v] / sigma[w] * (1.0 + delta[w]);
                }
            }
            if (w != s) {
                result[w] += delta[w];
            }
        }
        for (NodeId v : order) {
            dist[v] = unreachable;
            sigma[v] = 0.0;
            delta[v] = 0.0;
        }
    }
    return result;
}

Column load_centrality(const DirectedGraph &g) {
    // For a fixed target t, the successors of u on shortest u->t paths do not
    // depend on the source, so the packets of all sources can be pushed toward
    // t together in decreasing order of distance to t.
    const auto n = g.n_nodes();
    Column result(n, 0.0);
    std::vector<std::int32_t> to_target(n, unreachable);
    std::vector<double> carried(n, 0.0);
    std::vector<NodeId> order;

    for (NodeId t = 0; t < n; ++t) {
        bfs(g, t, Walk::in, to_target, order);
        for (auto it = order.rbegin(); it != order.rend(); ++it) {
            const NodeId u = *it;
            if (u == t) {
                continue;
            }
            const double packets = carried[u] + 1.0;
            // Everything beyond u's own packet is transit load.
            result[u] += packets - 1.0;
            std::size_t next_hops = 0;
            for (NodeId w : g.out(u)) {
                if (to_target[w] == to_target[u] - 1) {
                    ++next_hops;
                }
            }
            const double share = packets / static_cast<double>(next_hops);
            for (NodeId w : g.out(u)) {
                if (to_target[w] == to_target[u] - 1) {
                    carried[w] += share;
                }
            }
        }
        for (NodeId v : order) {
            carried[v] = 0.0;
        }
        reset(to_target, order);
    }
    return result;
}

Column pagerank(const DirectedGraph &g, double damping, double tol) {
    const auto n = g.n_nodes();
    if (n == 0) {
        return {};
    }
    const double inv_n = 1.0 / static_cast<double>(n);
    Column rank(n, inv_n);
    Column next(n, 0.0);
    constexpr int max_iterations = 100000;
    for (int iter = 0; iter < max_iterations; ++iter) {
        double dangling = 0.0;
        for (NodeId u = 0; u < n; ++u) {
            if (g.out_degree(u) == 0) {
                dangling += rank[u];
            }
        }
        const double base = (1.0 - damping) * inv_n + damping * dangling * inv_n;
        for (NodeId v = 0; v < n; ++v) {
            double incoming = 0.0;
            for (NodeId u : g.in(v)) {
                incoming += rank[u] / static_cast<double>(g.out_degree(u));
            }
            next[v] = base + damping * incoming;
        }
        double change = 0.0;
        for (NodeId v = 0; v < n; ++v) {
            change += std::abs(next[v] - rank[v]);
        }
        rank.swap(next);
        if (change < tol) {
            break;
        }
    }
    return rank;
}

} // namespace topogcn
