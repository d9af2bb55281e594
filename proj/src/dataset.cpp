#include "topogcn/dataset.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>
#include <string_view>
#include <unordered_map>

namespace topogcn {

namespace {

std::vector<std::string_view> split_fields(std::string_view line) {
    std::vector<std::string_view> fields;
    std::size_t pos = 0;
    while (pos < line.size()) {
        while (pos < line.size() && (line[pos] == '\t' || line[pos] == ' ' || line[pos] == '\r')) {
            ++pos;
        }
        if (pos == line.size()) {
            break;
        }
        std::size_t end = pos;
        while (end < line.size() && line[end] != '\t' && line[end] != ' ' && line[end] != '\r') {
            ++end;
        }
        fields.push_back(line.substr(pos, end - pos));
        pos = end;
    }
    return fields;
}

std::ifstream open_input(const std::filesystem::path &path) {
    std::ifstream in(path);
    if (!in) {
        throw DataError("cannot open " + path.string());
    }
    return in;
}

[[noreturn]] void parse_error(const std::filesystem::path &path, std::size_t line_no, const std::string &what) {
    throw DataError(path.string() + ":" + std::to_string(line_no) + ": " + what);
}

} // namespace

void LabeledDataset::validate() const {
    const auto n = graph.n_nodes();
    if (labels.size() != n || node_ids.size() != n) {
        throw DataError("dataset: label/id count does not match node count " + std::to_string(n));
    }
    if (external_features && external_features->rows() != n) {
        throw DataError("dataset: external feature rows " + std::to_string(external_features->rows()) +
                        " != node count " + std::to_string(n));
    }
    for (auto c : labels) {
        if (c >= n_classes) {
            throw DataError("dataset: label index out of range");
        }
    }
}

LabeledDataset load_citation_dataset(const std::filesystem::path &content_path,
                                     const std::filesystem::path &cites_path, CiteDirection direction) {
    LabeledDataset ds;
    std::unordered_map<std::string, NodeId> index;
    std::unordered_map<std::string, ClassId> class_index;
    std::vector<double> bow;
    std::size_t n_features = 0;

    {
        auto in = open_input(content_path);
        std::string line;
        std::size_t line_no = 0;
        while (std::getline(in, line)) {
            ++line_no;
            auto fields = split_fields(line);
            if (fields.empty()) {
                continue;
            }
            if (fields.size() < 2) {
                parse_error(content_path, line_no, "expected `id [features...] label`");
            }
            const std::size_t f = fields.size() - 2;
            if (ds.node_ids.empty()) {
                n_features = f;
            } else if (f != n_features) {
                parse_error(content_path, line_no,
                            "expected " + std::to_string(n_features) + " features, found " + std::to_string(f));
            }
            std::string id(fields.front());
            if (!index.emplace(id, static_cast<NodeId>(ds.node_ids.size())).second) {
                parse_error(content_path, line_no, "duplicate node id `" + id + "`");
            }
            for (std::size_t k = 1; k <= f; ++k) {
                if (fields[k] == "0" || fields[k] == "0.0") {
                    bow.push_back(0.0);
                } else if (fields[k] == "1" || fields[k] == "1.0") {
                    bow.push_back(1.0);
                } else {
                    parse_error(content_path, line_no, "feature `" + std::string(fields[k]) + "` is not 0/1");
                }
            }
            std::string label(fields.back());
            auto [it, inserted] = class_index.emplace(label, static_cast<ClassId>(ds.class_names.size()));
            if (inserted) {
                ds.class_names.push_back(label);
            }
            ds.labels.push_back(it->second);
            ds.node_ids.push_back(std::move(id));
        }
        if (ds.node_ids.empty()) {
            throw DataError(content_path.string() + ": empty content file");
        }
    }
    ds.n_classes = ds.class_names.size();
    ds.external_features = DenseMatrix(ds.node_ids.size(), n_features, std::move(bow));

    std::vector<Edge> edges;
    {
        auto in = open_input(cites_path);
        std::string line;
        std::size_t line_no = 0;
        while (std::getline(in, line)) {
            ++line_no;
            auto fields = split_fields(line);
            if (fields.empty()) {
                continue;
            }
            if (fields.size() != 2) {
                parse_error(cites_path, line_no, "expected two ids");
            }
            ++ds.report.cite_lines;
            auto a = index.find(std::string(fields[0]));
            auto b = index.find(std::string(fields[1]));
            if (a == index.end() || b == index.end()) {
                ++ds.report.unknown_endpoint;
                continue;
            }
            if (direction == CiteDirection::citing_to_cited) {
                edges.emplace_back(b->second, a->second);
            } else {
                edges.emplace_back(a->second, b->second);
            }
        }
        if (ds.report.cite_lines == 0) {
            throw DataError(cites_path.string() + ": empty cites file");
        }
    }

    EdgeCleanup cleanup;
    ds.graph = DirectedGraph(ds.node_ids.size(), edges, &cleanup);
    ds.report.self_loops = cleanup.self_loops;
    ds.report.duplicates = cleanup.duplicates;
    ds.report.undirected_edges = ds.graph.n_undirected_edges();
    ds.validate();
    return ds;
}

LabeledDataset largest_connected_subgraph(const LabeledDataset &ds) {
    const auto comp = weak_components(ds.graph);
    std::vector<std::size_t> sizes(ds.n_nodes(), 0);
    for (auto c : comp) {
        ++sizes[c];
    }
    std::uint32_t best = 0;
    for (std::uint32_t c = 0; c < sizes.size(); ++c) {
        if (sizes[c] > sizes[best]) {
            best = c;
        }
    }
    std::vector<NodeId> keep;
    for (NodeId u = 0; u < ds.n_nodes(); ++u) {
        if (comp[u] == best) {
            keep.push_back(u);
        }
    }

    LabeledDataset out;
    out.graph = ds.graph.induced(keep);
    out.n_classes = ds.n_classes;
    out.class_names = ds.class_names;
    out.report = ds.report;
    out.report.undirected_edges = out.graph.n_undirected_edges();
    out.labels.reserve(keep.size());
    out.node_ids.reserve(keep.size());
    for (NodeId u : keep) {
        out.labels.push_back(ds.labels[u]);
        out.node_ids.push_back(ds.node_ids[u]);
    }
    if (ds.external_features) {
        const auto &src = *ds.external_features;
        DenseMatrix sub(keep.size(), src.cols());
        for (std::size_t k = 0; k < keep.size(); ++k) {
            auto row = src.row(keep[k]);
            std::copy(row.begin(), row.end(), sub.row(k).begin());
        }
        out.external_features = std::move(sub);
    }
    return out;
}

void write_edge_list(const LabeledDataset &ds, const std::filesystem::path &stem) {
    auto edges_path = stem;
    edges_path += ".edges";
    auto labels_path = stem;
    labels_path += ".labels";
    std::ofstream edges(edges_path);
    std::ofstream labels(labels_path);
    if (!edges || !labels) {
        throw DataError("cannot write " + stem.string() + ".{edges,labels}");
    }
    for (const auto &[u, v] : ds.graph.edges()) {
        edges << u << ' ' << v << '\n';
    }
    for (NodeId u = 0; u < ds.n_nodes(); ++u) {
        labels << ds.node_ids[u] << ' ' << ds.class_names[ds.labels[u]] << '\n';
    }
}

LabeledDataset read_edge_list(const std::filesystem::path &stem) {
    auto edges_path = stem;
    edges_path += ".edges";
    auto labels_path = stem;
    labels_path += ".labels";

    LabeledDataset ds;
    std::unordered_map<std::string, ClassId> class_index;
    {
        auto in = open_input(labels_path);
        std::string line;
        std::size_t line_no = 0;
        while (std::getline(in, line)) {
            ++line_no;
            auto fields = split_fields(line);
            if (fields.empty()) {
                continue;
            }
            if (fields.size() != 2) {
                parse_error(labels_path, line_no, "expected `node_id label`");
            }
            std::string label(fields[1]);
            auto [it, inserted] = class_index.emplace(label, static_cast<ClassId>(ds.class_names.size()));
            if (inserted) {
                ds.class_names.push_back(label);
            }
            ds.labels.push_back(it->second);
            ds.node_ids.emplace_back(fields[0]);
        }
    }
    ds.n_classes = ds.class_names.size();

    std::vector<Edge> edges;
    {
        auto in = open_input(edges_path);
        std::string line;
        std::size_t line_no = 0;
        while (std::getline(in, line)) {
            ++line_no;
            auto fields = split_fields(line);
            if (fields.empty()) {
                continue;
            }
            if (fields.size() != 2) {
                parse_error(edges_path, line_no, "expected `u v`");
            }
            try {
                auto u = std::stoul(std::string(fields[0]));
                auto v = std::stoul(std::string(fields[1]));
                if (u >= ds.node_ids.size() || v >= ds.node_ids.size()) {
                    parse_error(edges_path, line_no, "node index out of range");
                }
                edges.emplace_back(static_cast<NodeId>(u), static_cast<NodeId>(v));
            } catch (const std::logic_error &) {
                parse_error(edges_path, line_no, "node index is not an integer");
            }
        }
    }
    EdgeCleanup cleanup;
    ds.graph = DirectedGraph(ds.node_ids.size(), edges, &cleanup);
    ds.report.cite_lines = edges.size();
    ds.report.self_loops = cleanup.self_loops;
    ds.report.duplicates = cleanup.duplicates;
    ds.report.undirected_edges = ds.graph.n_undirected_edges();
    ds.validate();
    return ds;
}

} // namespace topogcn
