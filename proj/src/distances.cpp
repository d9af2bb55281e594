// Shortest-path based node measures: closeness, eccentricity, distance
// moments, flow and attraction basin. All distances are BFS hop counts.

#include <algorithm>
#include <cmath>

#include "bfs.hpp"
#include "topogcn/features.hpp"

namespace topogcn {

using detail::bfs;
using detail::reset;
using detail::unreachable;
using detail::Walk;

Column closeness_centrality(const DirectedGraph &g) {
    const auto n = g.n_nodes();
    Column result(n, 0.0);
    std::vector<std::int32_t> dist(n, unreachable);
    std::vector<NodeId> order;
    for (NodeId s = 0; s < n; ++s) {
        bfs(g, s, Walk::out, dist, order);
        double total = 0.0;
        for (NodeId v : order) {
            total += dist[v];
        }
        const auto reached = order.size() - 1;
        result[s] = reached == 0 ? 0.0 : static_cast<double>(reached) / total;
        reset(dist, order);
    }
    return result;
}

Column eccentricity(const DirectedGraph &g) {
    const auto n = g.n_nodes();
    Column result(n, 0.0);
    std::vector<std::int32_t> dist(n, unreachable);
    std::vector<NodeId> order;
    for (NodeId s = 0; s < n; ++s) {
        bfs(g, s, Walk::out, dist, order);
        // BFS order is nondecreasing in distance.
        result[s] = dist[order.back()];
        reset(dist, order);
    }
    return result;
}

DistanceMoments bfs_moments(const DirectedGraph &g) {
    const auto n = g.n_nodes();
    DistanceMoments m{Column(n, 0.0), Column(n, 0.0)};
    std::vector<std::int32_t> dist(n, unreachable);
    std::vector<NodeId> order;
    for (NodeId s = 0; s < n; ++s) {
        bfs(g, s, Walk::out, dist, order);
        const auto reached = order.size() - 1;
        if (reached > 0) {
            double sum = 0.0;
            double sum_sq = 0.0;
            for (NodeId v : order) {
                sum += dist[v];
                sum_sq += static_cast<double>(dist[v]) * dist[v];
            }
            m.mean[s] = sum / static_cast<double>(reached);
            m.second_moment[s] = sum_sq / static_cast<double>(reached);
        }
        reset(dist, order);
    }
    return m;
}

Column flow(const DirectedGraph &g, double threshold) {
    const auto n = g.n_nodes();
    Column result(n, 0.0);
    std::vector<std::size_t> reach(n, 0);
    std::vector<double> ratio_sum(n, 0.0);

    std::vector<std::int32_t> dir(n, unreachable);
    std::vector<std::int32_t> und(n, unreachable);
    std::vector<NodeId> dir_order;
    std::vector<NodeId> und_order;
    for (NodeId s = 0; s < n; ++s) {
        bfs(g, s, Walk::out, dir, dir_order);
        bfs(g, s, Walk::undirected, und, und_order);
        reach[s] = dir_order.size() - 1;
        double total = 0.0;
        for (std::size_t k = 1; k < dir_order.size(); ++k) {
            const NodeId v = dir_order[k];
            total += static_cast<double>(und[v]) / static_cast<double>(dir[v]);
        }
        ratio_sum[s] = total;
        reset(dir, dir_order);
        reset(und, und_order);
    }

    const auto max_reach = n == 0 ? std::size_t{0} : *std::max_element(reach.begin(), reach.end());
    if (max_reach == 0) {
        return result;
    }
    for (NodeId s = 0; s < n; ++s) {
        const double share = static_cast<double>(reach[s]) / static_cast<double>(max_reach);
        if (reach[s] > 0 && share > threshold) {
            result[s] = ratio_sum[s] / static_cast<double>(reach[s]);
        }
    }
    return result;
}

namespace {

/// shells[u][m] = number of nodes at distance exactly m from u along `walk`.
std::vector<std::vector<double>> distance_shells(const DirectedGraph &g, Walk walk) {
    const auto n = g.n_nodes();
    std::vector<std::vector<double>> shells(n);
    std::vector<std::int32_t> dist(n, unreachable);
    std::vector<NodeId> order;
    for (NodeId s = 0; s < n; ++s) {
        bfs(g, s, walk, dist, order);
        auto &h = shells[s];
        h.assign(static_cast<std::size_t>(dist[order.back()]) + 1, 0.0);
        for (NodeId v : order) {
            h[static_cast<std::size_t>(dist[v])] += 1.0;
        }
        reset(dist, order);
    }
    return shells;
}

} // namespace

Column attraction_basin(const DirectedGraph &g, double alpha) {
    const auto n = g.n_nodes();
    Column result(n, 0.0);
    if (n == 0) {
        return result;
    }
    const auto out_shells = distance_shells(g, Walk::out);
    const auto in_shells = distance_shells(g, Walk::in);

    std::size_t diameter = 0;
    for (const auto &h : out_shells) {
        diameter = std::max(diameter, h.size() - 1);
    }
    std::vector<double> mean_out(diameter + 1, 0.0);
    std::vector<double> mean_in(diameter + 1, 0.0);
    for (NodeId u = 0; u < n; ++u) {
        for (std::size_t m = 1; m < out_shells[u].size(); ++m) {
            mean_out[m] += out_shells[u][m];
        }
        for (std::size_t m = 1; m < in_shells[u].size(); ++m) {
            mean_in[m] += in_shells[u][m];
        }
    }
    for (std::size_t m = 1; m <= diameter; ++m) {
        mean_out[m] /= static_cast<double>(n);
        mean_in[m] /= static_cast<double>(n);
    }

    for (NodeId u = 0; u < n; ++u) {
        double num = 0.0;
        double den = 0.0;
        double weight = 1.0;
        for (std::size_t m = 1; m <= diameter; ++m) {
            weight /= alpha;
            if (mean_in[m] > 0.0 && m < in_shells[u].size()) {
                num += in_shells[u][m] / mean_in[m] * weight;
            }
            if (mean_out[m] > 0.0 && m < out_shells[u].size()) {
                den += out_shells[u][m] / mean_out[m] * weight;
            }
        }
        result[u] = den > 0.0 ? num / den : 0.0;
    }
    return result;
}

} // namespace topogcn
