#include <cmath>
#include <cstdio>
#include <stdexcept>

#include "topogcn/features.hpp"
#include "topogcn/motifs.hpp"

namespace topogcn {

void FeatureTable::add(std::string name, Column values) {
    if (values.size() != n_nodes_) {
        throw std::invalid_argument("FeatureTable: column `" + name + "` has " + std::to_string(values.size()) +
                                    " values for " + std::to_string(n_nodes_) + " nodes");
    }
    for (const auto &c : columns_) {
        if (c.name == name) {
            throw std::invalid_argument("FeatureTable: duplicate column `" + name + "`");
        }
    }
    for (double v : values) {
        if (!std::isfinite(v)) {
            throw std::invalid_argument("FeatureTable: column `" + name + "` has a non-finite value");
        }
    }
    columns_.push_back({std::move(name), std::move(values)});
}

const Column &FeatureTable::column(const std::string &name) const {
    for (const auto &c : columns_) {
        if (c.name == name) {
            return c.values;
        }
    }
    throw std::out_of_range("FeatureTable: no column `" + name + "`");
}

void FeatureTable::zscore() {
    if (n_nodes_ == 0) {
        return;
    }
    const double n = static_cast<double>(n_nodes_);
    for (auto &c : columns_) {
        double mean = 0.0;
        for (double v : c.values) {
            mean += v;
        }
        mean /= n;
        double var = 0.0;
        for (double v : c.values) {
            var += (v - mean) * (v - mean);
        }
        const double sd = std::sqrt(var / n);
        // Relative cutoff: a column that only differs by rounding is constant.
        const bool constant = sd <= 1e-12 * std::max(1.0, std::abs(mean));
        for (double &v : c.values) {
            v = constant ? 0.0 : (v - mean) / sd;
        }
    }
}

namespace {

std::string motif_name(int size, std::size_t id) {
    char buf[32];
    std::snprintf(buf, sizeof buf, size == 3 ? "motif3_%02zu" : "motif4_%03zu", id);
    return buf;
}

} // namespace

std::vector<std::string> feature_catalog(const FeatureParams &params) {
    std::vector<std::string> names = {
        "in_degree",          "out_degree",       "average_neighbor_degree", "betweenness",
        "load",               "closeness",        "eccentricity",            "dist_mean",
        "dist_second_moment", "flow",             "attraction_basin",        "k_core",
        "louvain_community_size", "louvain_community_id", "pagerank",      "fiedler",
    };
    for (int size : {3, 4}) {
        if ((size == 3 && !params.motif3) || (size == 4 && !params.motif4)) {
            continue;
        }
        const MotifCatalog catalog(size, !params.undirected_motifs);
        for (std::size_t id = 0; id < catalog.n_classes(); ++id) {
            names.push_back(motif_name(size, id));
        }
    }
    return names;
}

FeatureTable extract_all(const DirectedGraph &g, const FeatureParams &params) {
    FeatureTable table(g.n_nodes());
    auto deg = degree_features(g);
    table.add("in_degree", std::move(deg.in_degree));
    table.add("out_degree", std::move(deg.out_degree));
    table.add("average_neighbor_degree", average_neighbor_degree(g));
    table.add("betweenness", betweenness_centrality(g));
    table.add("load", load_centrality(g));
    table.add("closeness", closeness_centrality(g));
    table.add("eccentricity", eccentricity(g));
    auto moments = bfs_moments(g);
    table.add("dist_mean", std::move(moments.mean));
    table.add("dist_second_moment", std::move(moments.second_moment));
    table.add("flow", flow(g, params.flow_threshold));
    table.add("attraction_basin", attraction_basin(g, params.attraction_alpha));
    table.add("k_core", k_core(g));
    auto lv = louvain_features(g, params.louvain_seed);
    table.add("louvain_community_size", std::move(lv.community_size));
    table.add("louvain_community_id", std::move(lv.community_id));
    table.add("pagerank", pagerank(g, params.pagerank_damping, params.pagerank_tol));
    table.add("fiedler", fiedler_vector(g));

    for (int size : {3, 4}) {
        if ((size == 3 && !params.motif3) || (size == 4 && !params.motif4)) {
            continue;
        }
        const auto counts = motif_counts(g, size, !params.undirected_motifs);
        const std::size_t n_classes = counts.empty() ? MotifCatalog(size, !params.undirected_motifs).n_classes()
                                                     : counts.front().size();
        for (std::size_t id = 0; id < n_classes; ++id) {
            Column col(g.n_nodes());
            for (NodeId u = 0; u < g.n_nodes(); ++u) {
                col[u] = static_cast<double>(counts[u][id]);
            }
            table.add(motif_name(size, id), std::move(col));
        }
    }
    table.zscore();

    auto fmt = [](double v) {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.17g", v);
        return std::string(buf);
    };
    table.metadata["flow_threshold"] = fmt(params.flow_threshold);
    table.metadata["attraction_alpha"] = fmt(params.attraction_alpha);
    table.metadata["pagerank_damping"] = fmt(params.pagerank_damping);
    table.metadata["pagerank_tol"] = fmt(params.pagerank_tol);
    table.metadata["louvain_seed"] = std::to_string(params.louvain_seed);
    table.metadata["motif3"] = params.motif3 ? "true" : "false";
    table.metadata["motif4"] = params.motif4 ? "true" : "false";
    table.metadata["motif_mode"] = params.undirected_motifs ? "undirected" : "directed";
    table.metadata["normalization"] = "zscore";
    return table;
}

} // namespace topogcn
