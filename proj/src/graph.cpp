#include "topogcn/graph.hpp"

#include <algorithm>
#include <queue>
#include <stdexcept>
#include <string>

namespace topogcn {

namespace {

void build_csr(std::size_t n, std::vector<Edge> &sorted_edges, std::vector<std::size_t> &ptr,
               std::vector<NodeId> &idx) {
    ptr.assign(n + 1, 0);
    idx.clear();
    idx.reserve(sorted_edges.size());
    for (const auto &[u, v] : sorted_edges) {
        ++ptr[u + 1];
        idx.push_back(v);
    }
    for (std::size_t i = 0; i < n; ++i) {
        ptr[i + 1] += ptr[i];
    }
}

} // namespace

DirectedGraph::DirectedGraph(std::size_t n_nodes, std::span<const Edge> edges, EdgeCleanup *cleanup)
    : n_nodes_(n_nodes) {
    std::vector<Edge> out_edges;
    out_edges.reserve(edges.size());
    EdgeCleanup dropped;
    for (const auto &[u, v] : edges) {
        if (u >= n_nodes || v >= n_nodes) {
            throw std::out_of_range("DirectedGraph: edge (" + std::to_string(u) + ", " + std::to_string(v) +
                                    ") outside node range " + std::to_string(n_nodes));
        }
        if (u == v) {
            ++dropped.self_loops;
            continue;
        }
        out_edges.emplace_back(u, v);
    }
    std::sort(out_edges.begin(), out_edges.end());
    const auto before = out_edges.size();
    out_edges.erase(std::unique(out_edges.begin(), out_edges.end()), out_edges.end());
    dropped.duplicates = before - out_edges.size();
    if (cleanup != nullptr) {
        *cleanup = dropped;
    }

    std::vector<Edge> in_edges;
    in_edges.reserve(out_edges.size());
    for (const auto &[u, v] : out_edges) {
        in_edges.emplace_back(v, u);
    }
    std::sort(in_edges.begin(), in_edges.end());

    std::vector<Edge> und_edges;
    und_edges.reserve(2 * out_edges.size());
    und_edges.insert(und_edges.end(), out_edges.begin(), out_edges.end());
    und_edges.insert(und_edges.end(), in_edges.begin(), in_edges.end());
    std::sort(und_edges.begin(), und_edges.end());
    und_edges.erase(std::unique(und_edges.begin(), und_edges.end()), und_edges.end());

    build_csr(n_nodes, out_edges, out_ptr_, out_idx_);
    build_csr(n_nodes, in_edges, in_ptr_, in_idx_);
    build_csr(n_nodes, und_edges, und_ptr_, und_idx_);
}

bool DirectedGraph::has_edge(NodeId u, NodeId v) const {
    auto succ = out(u);
    return std::binary_search(succ.begin(), succ.end(), v);
}

std::vector<Edge> DirectedGraph::edges() const {
    std::vector<Edge> result;
    result.reserve(n_edges());
    for (NodeId u = 0; u < n_nodes_; ++u) {
        for (NodeId v : out(u)) {
            result.emplace_back(u, v);
        }
    }
    return result;
}

DirectedGraph DirectedGraph::reversed() const {
    auto e = edges();
    for (auto &[u, v] : e) {
        std::swap(u, v);
    }
    return DirectedGraph(n_nodes_, e);
}

DirectedGraph DirectedGraph::symmetrized() const {
    auto e = edges();
    const auto m = e.size();
    for (std::size_t i = 0; i < m; ++i) {
        e.emplace_back(e[i].second, e[i].first);
    }
    return DirectedGraph(n_nodes_, e);
}

DirectedGraph DirectedGraph::induced(std::span<const NodeId> nodes) const {
    constexpr NodeId absent = static_cast<NodeId>(-1);
    std::vector<NodeId> local(n_nodes_, absent);
    for (std::size_t k = 0; k < nodes.size(); ++k) {
        local[nodes[k]] = static_cast<NodeId>(k);
    }
    std::vector<Edge> e;
    for (NodeId u : nodes) {
        for (NodeId v : out(u)) {
            if (local[v] != absent) {
                e.emplace_back(local[u], local[v]);
            }
        }
    }
    return DirectedGraph(nodes.size(), e);
}

DirectedGraph DirectedGraph::permuted(std::span<const NodeId> perm) const {
    auto e = edges();
    for (auto &[u, v] : e) {
        u = perm[u];
        v = perm[v];
    }
    return DirectedGraph(n_nodes_, e);
}

std::vector<std::uint32_t> weak_components(const DirectedGraph &g) {
    constexpr auto unset = static_cast<std::uint32_t>(-1);
    std::vector<std::uint32_t> comp(g.n_nodes(), unset);
    std::vector<NodeId> stack;
    for (NodeId s = 0; s < g.n_nodes(); ++s) {
        if (comp[s] != unset) {
            continue;
        }
        comp[s] = s;
        stack.push_back(s);
        while (!stack.empty()) {
            NodeId u = stack.back();
            stack.pop_back();
            for (NodeId v : g.undirected(u)) {
                if (comp[v] == unset) {
                    comp[v] = s;
                    stack.push_back(v);
                }
            }
        }
    }
    return comp;
}

} // namespace topogcn
