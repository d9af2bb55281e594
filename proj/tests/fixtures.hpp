// Small shared fixtures: scratch directories, files, toy datasets.
#pragma once

#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "topogcn/dataset.hpp"
#include "topogcn/rng.hpp"

namespace fixture {

namespace fs = std::filesystem;

/// Fresh empty directory under the system temp dir.
inline fs::path scratch(const std::string &name) {
    auto dir = fs::temp_directory_path() / ("topogcn_test_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

inline fs::path write_file(const fs::path &path, const std::string &text) {
    std::ofstream(path, std::ios::binary) << text;
    return path;
}

inline std::string read_file(const fs::path &path) {
    std::ifstream in(path, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

/// Labeled dataset around an existing graph, labels drawn uniformly.
inline topogcn::LabeledDataset labeled(topogcn::DirectedGraph g, std::size_t n_classes, std::uint64_t seed) {
    topogcn::LabeledDataset ds;
    topogcn::Rng rng(seed);
    ds.n_classes = n_classes;
    for (std::size_t i = 0; i < g.n_nodes(); ++i) {
        ds.labels.push_back(static_cast<topogcn::ClassId>(topogcn::uniform_below(rng, n_classes)));
        ds.node_ids.push_back("v" + std::to_string(i));
    }
    for (std::size_t c = 0; c < n_classes; ++c) {
        ds.class_names.push_back("c" + std::to_string(c));
    }
    ds.graph = std::move(g);
    return ds;
}

/// The colored example graph: nodes 0 and 2 green (class 0), 1, 3, 4 blue
/// (class 1). It contains exactly one feed-forward triangle 0->1, 0->2->1,
/// originating at green node 0, plus the directed cycle 1->3->4->1.
inline topogcn::LabeledDataset colored_example() {
    std::vector<topogcn::Edge> edges{{0, 1}, {0, 2}, {2, 1}, {1, 3}, {3, 4}, {4, 1}};
    topogcn::LabeledDataset ds;
    ds.graph = topogcn::DirectedGraph(5, edges);
    ds.labels = {0, 1, 0, 1, 1};
    ds.n_classes = 2;
    ds.class_names = {"green", "blue"};
    ds.node_ids = {"0", "1", "2", "3", "4"};
    return ds;
}

} // namespace fixture
