#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "topogcn/graph.hpp"
#include "topogcn/matrix.hpp"

namespace topogcn {

/// Input data is malformed, inconsistent or missing.
class DataError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

using ClassId = std::uint32_t;

enum class CiteDirection {
    /// A cites line `a b` means b cites a; the edge is b -> a.
    citing_to_cited,
    /// A cites line `a b` means a cites b; the edge is a -> b.
    cited_to_citing,
};

/// What happened to the cites file while loading.
struct LoadReport {
    std::size_t cite_lines = 0;
    std::size_t unknown_endpoint = 0;
    std::size_t self_loops = 0;
    std::size_t duplicates = 0;
    /// Edges left after dropping unknown endpoints, before self-loop/duplicate removal.
    std::size_t raw_edges() const { return cite_lines - unknown_endpoint; }
    /// Edges between distinct node pairs counted once regardless of direction.
    std::size_t undirected_edges = 0;
};

struct LabeledDataset {
    DirectedGraph graph;
    std::vector<ClassId> labels;
    std::size_t n_classes = 0;
    std::vector<std::string> class_names;
    std::vector<std::string> node_ids;
    /// Binary bag-of-words, one row per node.
    std::optional<DenseMatrix> external_features;
    LoadReport report;

    std::size_t n_nodes() const { return graph.n_nodes(); }
    /// Throws DataError when the fields disagree on the node count.
    void validate() const;
};

LabeledDataset load_citation_dataset(const std::filesystem::path &content_path,
                                     const std::filesystem::path &cites_path,
                                     CiteDirection direction = CiteDirection::citing_to_cited);

/// Induced subgraph on the largest weakly connected component. Ties go to the
/// component containing the smallest node index. Node order is preserved.
LabeledDataset largest_connected_subgraph(const LabeledDataset &ds);

/// Plain dump: `<stem>.edges` holds `u v` per line (0-based indices) and
/// `<stem>.labels` holds `node_id label_name` per line in node order.
void write_edge_list(const LabeledDataset &ds, const std::filesystem::path &stem);
LabeledDataset read_edge_list(const std::filesystem::path &stem);

} // namespace topogcn
