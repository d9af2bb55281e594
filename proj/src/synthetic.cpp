#include "topogcn/synthetic.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

#include "topogcn/rng.hpp"

namespace topogcn {

LabeledDataset synthetic_citation_graph(const SyntheticParams &p) {
    if (p.n_nodes == 0 || p.n_classes == 0) {
        throw std::invalid_argument("synthetic graph needs nodes and classes");
    }
    for (double rate : {p.homophily, p.own_word_rate, p.other_word_rate}) {
        if (!(rate >= 0.0 && rate <= 1.0)) {
            throw std::invalid_argument("synthetic graph rates must lie in [0, 1]");
        }
    }
    Rng rng(mix_seed(p.seed, 0));
    LabeledDataset ds;
    ds.n_classes = p.n_classes;
    ds.labels.resize(p.n_nodes);
    std::vector<std::vector<NodeId>> members(p.n_classes);
    for (std::size_t i = 0; i < p.n_nodes; ++i) {
        ds.labels[i] = static_cast<ClassId>(uniform_below(rng, p.n_classes));
        ds.node_ids.push_back("n" + std::to_string(i));
    }
    for (std::size_t c = 0; c < p.n_classes; ++c) {
        ds.class_names.push_back("c" + std::to_string(c));
    }

    std::vector<Edge> edges;
    for (NodeId i = 0; i < p.n_nodes; ++i) {
        for (std::size_t k = 0; k < p.citations && i > 0; ++k) {
            const auto &same = members[ds.labels[i]];
            NodeId target;
            if (!same.empty() && uniform01(rng) < p.homophily) {
                target = same[uniform_below(rng, same.size())];
            } else {
                target = static_cast<NodeId>(uniform_below(rng, i));
            }
            edges.emplace_back(i, target);
        }
        members[ds.labels[i]].push_back(i);
    }
    EdgeCleanup cleanup;
    ds.graph = DirectedGraph(p.n_nodes, edges, &cleanup);
    ds.report.cite_lines = edges.size();
    ds.report.duplicates = cleanup.duplicates;
    ds.report.self_loops = cleanup.self_loops;
    ds.report.undirected_edges = ds.graph.n_undirected_edges();

    DenseMatrix bow(p.n_nodes, p.vocabulary);
    const std::size_t block = std::max<std::size_t>(1, p.vocabulary / p.n_classes);
    for (std::size_t i = 0; i < p.n_nodes; ++i) {
        for (std::size_t w = 0; w < p.vocabulary; ++w) {
            const bool own = w / block == ds.labels[i];
            bow(i, w) = uniform01(rng) < (own ? p.own_word_rate : p.other_word_rate) ? 1.0 : 0.0;
        }
    }
    ds.external_features = std::move(bow);
    ds.validate();
    return ds;
}

} // namespace topogcn
