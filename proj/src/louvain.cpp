#include <algorithm>
#include <numeric>

#include "topogcn/features.hpp"
#include "topogcn/rng.hpp"

namespace topogcn {

namespace {

struct WeightedGraph {
    std::vector<std::vector<std::pair<std::uint32_t, double>>> adj; // no self entries
    std::vector<double> loop;   // A_ii: ordered internal weight folded into the node
    std::vector<double> degree; // k_i = sum_j w_ij + A_ii

    std::size_t size() const { return adj.size(); }
};

WeightedGraph from_graph(const DirectedGraph &g) {
    WeightedGraph w;
    const auto n = g.n_nodes();
    w.adj.resize(n);
    w.loop.assign(n, 0.0);
    w.degree.assign(n, 0.0);
    for (NodeId u = 0; u < n; ++u) {
        for (NodeId v : g.undirected(u)) {
            w.adj[u].emplace_back(v, 1.0);
        }
        w.degree[u] = static_cast<double>(g.undirected(u).size());
    }
    return w;
}

/// One round of local moving. Returns the community of each node (dense ids)
/// and whether anything moved.
bool local_moving(const WeightedGraph &g, Rng &rng, std::vector<std::uint32_t> &community) {
    const auto n = g.size();
    const double m2 = std::accumulate(g.degree.begin(), g.degree.end(), 0.0);
    community.resize(n);
    std::iota(community.begin(), community.end(), 0U);
    if (m2 == 0.0) {
        return false;
    }
    std::vector<double> tot(g.degree);

    std::vector<std::uint32_t> order(n);
    std::iota(order.begin(), order.end(), 0U);
    for (std::size_t i = n; i > 1; --i) {
        std::swap(order[i - 1], order[uniform_below(rng, i)]);
    }

    std::vector<double> link(n, 0.0);
    std::vector<std::uint32_t> touched;
    bool any_move = false;
    bool moved = true;
    while (moved) {
        moved = false;
        for (auto i : order) {
            const auto own = community[i];
            const double ki = g.degree[i];
            touched.clear();
            touched.push_back(own);
            for (const auto &[j, w] : g.adj[i]) {
                const auto c = community[j];
                if (c != own && link[c] == 0.0) {
                    touched.push_back(c);
                }
                link[c] += w;
            }
            tot[own] -= ki;

            auto best = own;
            double best_gain = link[own] - tot[own] * ki / m2;
            for (auto c : touched) {
                const double gain = link[c] - tot[c] * ki / m2;
                if (gain > best_gain) {
                    best_gain = gain;
                    best = c;
                }
            }
            tot[best] += ki;
            if (best != own) {
                community[i] = best;
                moved = true;
                any_move = true;
            }
            for (auto c : touched) {
                link[c] = 0.0;
            }
        }
    }

    // Renumber densely by first appearance in node order.
    std::vector<std::uint32_t> remap(n, static_cast<std::uint32_t>(-1));
    std::uint32_t next = 0;
    for (auto &c : community) {
        if (remap[c] == static_cast<std::uint32_t>(-1)) {
            remap[c] = next++;
        }
        c = remap[c];
    }
    return any_move;
}

WeightedGraph aggregate(const WeightedGraph &g, const std::vector<std::uint32_t> &community) {
    const auto k = *std::max_element(community.begin(), community.end()) + 1;
    WeightedGraph out;
    out.adj.resize(k);
    out.loop.assign(k, 0.0);
    out.degree.assign(k, 0.0);
    std::vector<double> acc(k, 0.0);
    std::vector<std::vector<std::uint32_t>> members(k);
    for (std::uint32_t i = 0; i < g.size(); ++i) {
        members[community[i]].push_back(i);
    }
    std::vector<std::uint32_t> seen;
    for (std::uint32_t c = 0; c < k; ++c) {
        seen.clear();
        for (auto i : members[c]) {
            out.loop[c] += g.loop[i];
            out.degree[c] += g.degree[i];
            for (const auto &[j, w] : g.adj[i]) {
                const auto d = community[j];
                if (d == c) {
                    out.loop[c] += w;
                } else {
                    if (acc[d] == 0.0) {
                        seen.push_back(d);
                    }
                    acc[d] += w;
                }
            }
        }
        std::sort(seen.begin(), seen.end());
        for (auto d : seen) {
            out.adj[c].emplace_back(d, acc[d]);
            acc[d] = 0.0;
        }
    }
    return out;
}

} // namespace

double modularity(const DirectedGraph &g, const std::vector<std::uint32_t> &community) {
    const auto n = g.n_nodes();
    double m2 = 0.0;
    std::uint32_t k = 0;
    for (NodeId u = 0; u < n; ++u) {
        m2 += static_cast<double>(g.undirected(u).size());
        k = std::max(k, community[u] + 1);
    }
    if (m2 == 0.0) {
        return 0.0;
    }
    std::vector<double> inside(k, 0.0);
    std::vector<double> tot(k, 0.0);
    for (NodeId u = 0; u < n; ++u) {
        tot[community[u]] += static_cast<double>(g.undirected(u).size());
        for (NodeId v : g.undirected(u)) {
            if (community[v] == community[u]) {
                inside[community[u]] += 1.0;
            }
        }
    }
    double q = 0.0;
    for (std::uint32_t c = 0; c < k; ++c) {
        q += inside[c] / m2 - (tot[c] / m2) * (tot[c] / m2);
    }
    return q;
}

LouvainResult louvain(const DirectedGraph &g, std::uint64_t seed) {
    const auto n = g.n_nodes();
    LouvainResult result;
    result.community.resize(n);
    std::iota(result.community.begin(), result.community.end(), 0U);

    Rng rng(seed);
    WeightedGraph level = from_graph(g);
    std::vector<std::uint32_t> assignment;
    while (level.size() > 0) {
        const bool moved = local_moving(level, rng, assignment);
        if (!moved) {
            break;
        }
        for (auto &c : result.community) {
            c = assignment[c];
        }
        level = aggregate(level, assignment);
    }

    std::vector<std::uint32_t> remap(n, static_cast<std::uint32_t>(-1));
    std::uint32_t next = 0;
    for (auto &c : result.community) {
        if (remap[c] == static_cast<std::uint32_t>(-1)) {
            remap[c] = next++;
        }
        c = remap[c];
    }
    result.community_sizes.assign(next, 0);
    for (auto c : result.community) {
        ++result.community_sizes[c];
    }
    result.modularity = modularity(g, result.community);
    return result;
}

LouvainColumns louvain_features(const DirectedGraph &g, std::uint64_t seed) {
    const auto r = louvain(g, seed);
    LouvainColumns cols{Column(g.n_nodes()), Column(g.n_nodes())};
    for (NodeId u = 0; u < g.n_nodes(); ++u) {
        cols.community_size[u] = static_cast<double>(r.community_sizes[r.community[u]]);
        cols.community_id[u] = static_cast<double>(r.community[u]);
    }
    return cols;
}

} // namespace topogcn
