#include "topogcn/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>
#include <json.hpp>
#include <limits>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

#include "topogcn/csv.hpp"
#include "topogcn/propagation.hpp"
#include "topogcn/rng.hpp"
#include "topogcn/split.hpp"

#ifndef TOPOGCN_GIT_DESCRIBE
#define TOPOGCN_GIT_DESCRIBE "unknown"
#endif

namespace topogcn {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

enum class Input { bow, neighbors, topology, products };

struct ModelDef {
    const char *name;
    Architecture architecture;
    Input input;
};

const std::vector<ModelDef> &model_defs() {
    static const std::vector<ModelDef> defs{
        {"gcn_sym_bow", Architecture::gcn_sym, Input::bow},
        {"gcn_asym_bow", Architecture::gcn_asym, Input::bow},
        {"gcn_sym_topo", Architecture::gcn_sym, Input::neighbors},
        {"gcn_asym_topo", Architecture::gcn_asym, Input::neighbors},
        {"combined", Architecture::gcn_combined, Input::neighbors},
        {"ffn_bow", Architecture::ffn, Input::bow},
        {"ffn_topology", Architecture::ffn, Input::topology},
        {"ffn_neighbors", Architecture::ffn, Input::neighbors},
        {"ffn_products", Architecture::ffn, Input::products},
    };
    return defs;
}

const ModelDef &model_def(const std::string &name) {
    for (const auto &d : model_defs()) {
        if (name == d.name) {
            return d;
        }
    }
    throw ConfigError("unknown model '" + name + "'");
}

ModelSpec default_spec(const ModelDef &d) {
    if (std::string(d.name) == "gcn_sym_bow") {
        return ModelSpec::kipf_defaults();
    }
    if (d.architecture == Architecture::ffn) {
        return ModelSpec::ffn_defaults();
    }
    return ModelSpec::gcn_defaults(d.architecture);
}

json spec_json(const ModelSpec &s) {
    return {{"hidden", s.hidden},         {"external_width", s.external_width}, {"dropout", s.dropout},
            {"l2", s.l2},                 {"learning_rate", s.learning_rate},   {"epochs", s.epochs}};
}

void apply_spec_json(ModelSpec &s, const json &j) {
    // Changing the depth without new per-layer lists would leave them ragged.
    if (j.contains("hidden")) {
        s.hidden = j.at("hidden").get<std::vector<std::size_t>>();
        const auto layers = s.n_layers();
        if (!j.contains("dropout")) {
            s.dropout.assign(layers, s.dropout.empty() ? 0.0 : s.dropout.front());
        }
        if (!j.contains("l2")) {
            s.l2.assign(layers, s.l2.empty() ? 0.0 : s.l2.front());
        }
    }
    if (j.contains("external_width")) {
        s.external_width = j.at("external_width").get<std::size_t>();
    }
    if (j.contains("dropout")) {
        s.dropout = j.at("dropout").get<std::vector<double>>();
    }
    if (j.contains("l2")) {
        s.l2 = j.at("l2").get<std::vector<double>>();
    }
    if (j.contains("learning_rate")) {
        s.learning_rate = j.at("learning_rate").get<double>();
    }
    if (j.contains("epochs")) {
        s.epochs = j.at("epochs").get<int>();
    }
}

std::string direction_name(CiteDirection d) {
    return d == CiteDirection::citing_to_cited ? "citing_to_cited" : "cited_to_citing";
}

CiteDirection direction_from_name(const std::string &s) {
    if (s == "citing_to_cited") {
        return CiteDirection::citing_to_cited;
    }
    if (s == "cited_to_citing") {
        return CiteDirection::cited_to_citing;
    }
    throw ConfigError("unknown cite direction '" + s + "'");
}

json synthetic_json(const SyntheticParams &p) {
    return {{"n_nodes", p.n_nodes},       {"n_classes", p.n_classes},
            {"citations", p.citations},   {"homophily", p.homophily},
            {"vocabulary", p.vocabulary}, {"own_word_rate", p.own_word_rate},
            {"other_word_rate", p.other_word_rate}, {"seed", p.seed}};
}

SyntheticParams synthetic_from_json(const json &j) {
    SyntheticParams p;
    p.n_nodes = j.value("n_nodes", p.n_nodes);
    p.n_classes = j.value("n_classes", p.n_classes);
    p.citations = j.value("citations", p.citations);
    p.homophily = j.value("homophily", p.homophily);
    p.vocabulary = j.value("vocabulary", p.vocabulary);
    p.own_word_rate = j.value("own_word_rate", p.own_word_rate);
    p.other_word_rate = j.value("other_word_rate", p.other_word_rate);
    p.seed = j.value("seed", p.seed);
    return p;
}

json features_json(const FeatureParams &p) {
    return {{"flow_threshold", p.flow_threshold},     {"attraction_alpha", p.attraction_alpha},
            {"pagerank_damping", p.pagerank_damping}, {"pagerank_tol", p.pagerank_tol},
            {"louvain_seed", p.louvain_seed},         {"motif3", p.motif3},
            {"motif4", p.motif4},                     {"undirected_motifs", p.undirected_motifs}};
}

FeatureParams features_from_json(const json &j) {
    FeatureParams p;
    p.flow_threshold = j.value("flow_threshold", p.flow_threshold);
    p.attraction_alpha = j.value("attraction_alpha", p.attraction_alpha);
    p.pagerank_damping = j.value("pagerank_damping", p.pagerank_damping);
    p.pagerank_tol = j.value("pagerank_tol", p.pagerank_tol);
    p.louvain_seed = j.value("louvain_seed", p.louvain_seed);
    p.motif3 = j.value("motif3", p.motif3);
    p.motif4 = j.value("motif4", p.motif4);
    p.undirected_motifs = j.value("undirected_motifs", p.undirected_motifs);
    return p;
}

json config_json(const ExperimentConfig &c) {
    json ds;
    ds["name"] = c.dataset.name;
    switch (c.dataset.kind) {
    case DatasetSource::Kind::citation:
        ds["content"] = c.dataset.content.string();
        ds["cites"] = c.dataset.cites.string();
        ds["direction"] = direction_name(c.dataset.direction);
        break;
    case DatasetSource::Kind::edge_list:
        ds["edge_list"] = c.dataset.stem.string();
        break;
    case DatasetSource::Kind::synthetic:
        ds["synthetic"] = synthetic_json(c.dataset.synthetic);
        break;
    }
    json specs = json::object();
    for (const auto &name : c.models) {
        specs[name] = spec_json(c.model_spec(name));
    }
    json pairs = json::array();
    for (const auto &[a, b] : c.comparisons) {
        pairs.push_back({a, b});
    }
    return {{"dataset", ds},
            {"use_lcc", c.use_lcc},
            {"models", c.models},
            {"fractions", c.fractions},
            {"n_splits", c.n_splits},
            {"seed", c.seed},
            {"features", features_json(c.features)},
            {"model_specs", specs},
            {"comparisons", pairs},
            {"out_dir", c.out_dir.string()},
            {"cache_dir", c.cache_dir.string()},
            {"threads", c.threads},
            {"save_models", c.save_models}};
}

std::uint64_t fnv1a(const void *data, std::size_t size, std::uint64_t h = 0xcbf29ce484222325ULL) {
    const auto *p = static_cast<const unsigned char *>(data);
    for (std::size_t i = 0; i < size; ++i) {
        h ^= p[i];
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::string hex(std::uint64_t v) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

fs::path cache_directory(const ExperimentConfig &c) {
    return c.cache_dir.empty() ? c.out_dir / "cache" : c.cache_dir;
}

void ensure_directory(const fs::path &dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) {
        throw DataError("cannot create directory " + dir.string() + ": " + ec.message());
    }
}

void write_text(const fs::path &path, const std::string &text) {
    std::ofstream out(path, std::ios::binary);
    if (!out || !(out << text)) {
        throw DataError("cannot write " + path.string());
    }
}

void write_manifest(const ExperimentConfig &c, const std::string &command_line, const LabeledDataset &ds,
                    json extra = json::object()) {
    json m = {{"command", command_line},
              {"git_describe", TOPOGCN_GIT_DESCRIBE},
              {"seed", c.seed},
              {"dataset_hash", hex(dataset_hash(ds))},
              {"n_nodes", ds.n_nodes()},
              {"n_edges", ds.graph.n_edges()},
              {"config", config_json(c)}};
    m.update(extra);
    write_text(c.out_dir / "manifest.json", m.dump(2) + "\n");
}

DenseMatrix row_normalized(const DenseMatrix &m) {
    DenseMatrix out = m;
    for (std::size_t i = 0; i < out.rows(); ++i) {
        auto row = out.row(i);
        double sum = 0.0;
        for (double v : row) {
            sum += v;
        }
        if (sum != 0.0) {
            for (double &v : row) {
                v /= sum;
            }
        }
    }
    return out;
}

void standardize_columns(DenseMatrix &m) {
    const double n = static_cast<double>(m.rows());
    for (std::size_t j = 0; j < m.cols(); ++j) {
        double mean = 0.0;
        for (std::size_t i = 0; i < m.rows(); ++i) {
            mean += m(i, j);
        }
        mean /= n;
        double var = 0.0;
        for (std::size_t i = 0; i < m.rows(); ++i) {
            var += (m(i, j) - mean) * (m(i, j) - mean);
        }
        const double sd = std::sqrt(var / n);
        for (std::size_t i = 0; i < m.rows(); ++i) {
            m(i, j) = sd > 0.0 ? (m(i, j) - mean) / sd : 0.0;
        }
    }
}

DenseMatrix table_matrix(const FeatureTable &t) {
    DenseMatrix m(t.n_nodes(), t.n_columns());
    for (std::size_t j = 0; j < t.n_columns(); ++j) {
        const auto &col = t.column(j).values;
        for (std::size_t i = 0; i < t.n_nodes(); ++i) {
            m(i, j) = col[i];
        }
    }
    return m;
}

std::string fraction_tag(double f) {
    return format_number(f);
}

/// Everything a model run reads that does not depend on the split.
struct SharedInputs {
    const LabeledDataset *ds = nullptr;
    NormalizedAdjacency sym;
    NormalizedAdjacency asym;
    DenseMatrix bow;
    DenseMatrix topology;
};

SharedInputs shared_inputs(const LabeledDataset &ds, const ExperimentConfig &c, const std::vector<std::string> &models) {
    SharedInputs s;
    s.ds = &ds;
    bool need_bow = false;
    bool need_topology = false;
    for (const auto &name : models) {
        const auto &d = model_def(name);
        need_bow = need_bow || d.input == Input::bow || d.architecture == Architecture::gcn_combined;
        need_topology = need_topology || d.input == Input::topology;
    }
    if (need_bow) {
        if (!ds.external_features) {
            throw DataError("dataset '" + c.dataset.name + "' has no bag-of-words features");
        }
        s.bow = row_normalized(*ds.external_features);
    }
    if (need_topology) {
        s.topology = table_matrix(cached_features(ds, c));
    }
    s.sym = normalize_adjacency(ds.graph, AdjacencyMode::symmetric);
    s.asym = normalize_adjacency(ds.graph, AdjacencyMode::asymmetric);
    return s;
}

struct PreparedRun {
    ModelSpec spec;
    ModelInputs inputs;
    DenseMatrix primary;
};

PreparedRun prepare(const SharedInputs &s, const ExperimentConfig &c, const std::string &name, const SplitMask &split) {
    const auto &d = model_def(name);
    PreparedRun run;
    run.spec = c.model_spec(name);
    run.spec.seed = split.seed;
    switch (d.input) {
    case Input::bow:
        run.primary = s.bow;
        break;
    case Input::neighbors:
        run.primary = gcn_input(*s.ds, split);
        if (d.architecture == Architecture::ffn) {
            standardize_columns(run.primary);
        }
        break;
    case Input::topology:
        run.primary = s.topology;
        break;
    case Input::products:
        run.primary = product_features(*s.ds, split, default_words());
        standardize_columns(run.primary);
        break;
    }
    run.inputs.primary = &run.primary;
    run.inputs.adjacency = d.architecture == Architecture::gcn_sym ? &s.sym : &s.asym;
    if (d.architecture == Architecture::gcn_combined) {
        run.inputs.external = &s.bow;
    }
    return run;
}

fs::path model_path(const ExperimentConfig &c, const std::string &name, double fraction, std::size_t split) {
    return c.out_dir / "models" / (name + "_f" + fraction_tag(fraction) + "_s" + std::to_string(split) + ".json");
}

} // namespace

std::vector<double> default_train_fractions() {
    return {0.05, 0.10, 0.15, 0.20, 0.25, 0.30, 0.40, 0.50, 0.60, 0.70};
}

std::vector<std::string> known_models() {
    std::vector<std::string> names;
    for (const auto &d : model_defs()) {
        names.emplace_back(d.name);
    }
    return names;
}

ModelSpec ExperimentConfig::model_spec(const std::string &model) const {
    const auto &d = model_def(model);
    if (auto it = model_specs.find(model); it != model_specs.end()) {
        auto s = it->second;
        s.architecture = d.architecture;
        return s;
    }
    return default_spec(d);
}

void ExperimentConfig::validate() const {
    if (fractions.empty()) {
        throw ConfigError("no train fractions given");
    }
    for (double f : fractions) {
        if (!(f > 0.0 && f < 1.0)) {
            throw ConfigError("train fraction " + format_number(f) + " is outside (0, 1)");
        }
    }
    if (n_splits == 0) {
        throw ConfigError("n_splits must be at least 1");
    }
    if (models.empty()) {
        throw ConfigError("no models given");
    }
    for (const auto &m : models) {
        try {
            model_spec(m).validate();
        } catch (const std::invalid_argument &e) {
            throw ConfigError("model '" + m + "': " + e.what());
        }
    }
    for (const auto &[a, b] : comparisons) {
        model_def(a);
        model_def(b);
    }
    auto must_exist = [](const fs::path &p) {
        if (!fs::exists(p)) {
            throw ConfigError("missing file: " + p.string());
        }
    };
    switch (dataset.kind) {
    case DatasetSource::Kind::citation:
        must_exist(dataset.content);
        must_exist(dataset.cites);
        break;
    case DatasetSource::Kind::edge_list:
        must_exist(fs::path(dataset.stem.string() + ".edges"));
        must_exist(fs::path(dataset.stem.string() + ".labels"));
        break;
    case DatasetSource::Kind::synthetic:
        break;
    }
}

ExperimentConfig parse_config(const std::string &text, const fs::path &base_dir) {
    ExperimentConfig c;
    auto resolve = [&](const std::string &p) { return fs::path(p).is_absolute() ? fs::path(p) : base_dir / p; };
    try {
        const json j = json::parse(text);
        if (j.contains("dataset")) {
            const auto &d = j.at("dataset");
            c.dataset.name = d.value("name", c.dataset.name);
            if (d.contains("synthetic")) {
                c.dataset.kind = DatasetSource::Kind::synthetic;
                c.dataset.synthetic = synthetic_from_json(d.at("synthetic"));
            } else if (d.contains("edge_list")) {
                c.dataset.kind = DatasetSource::Kind::edge_list;
                c.dataset.stem = resolve(d.at("edge_list").get<std::string>());
            } else {
                c.dataset.kind = DatasetSource::Kind::citation;
                c.dataset.content = resolve(d.at("content").get<std::string>());
                c.dataset.cites = resolve(d.at("cites").get<std::string>());
                c.dataset.direction = direction_from_name(d.value("direction", "citing_to_cited"));
            }
        }
        c.use_lcc = j.value("use_lcc", c.use_lcc);
        if (j.contains("models")) {
            c.models = j.at("models").get<std::vector<std::string>>();
        }
        if (j.contains("fractions")) {
            c.fractions = j.at("fractions").get<std::vector<double>>();
        }
        c.n_splits = j.value("n_splits", c.n_splits);
        c.seed = j.value("seed", c.seed);
        if (j.contains("features")) {
            c.features = features_from_json(j.at("features"));
        }
        if (j.contains("model_specs")) {
            for (const auto &[name, spec] : j.at("model_specs").items()) {
                auto s = default_spec(model_def(name));
                apply_spec_json(s, spec);
                c.model_specs[name] = s;
            }
        }
        if (j.contains("comparisons")) {
            c.comparisons.clear();
            for (const auto &pair : j.at("comparisons")) {
                c.comparisons.emplace_back(pair.at(0).get<std::string>(), pair.at(1).get<std::string>());
            }
        }
        if (j.contains("out_dir")) {
            c.out_dir = resolve(j.at("out_dir").get<std::string>());
        }
        if (j.contains("cache_dir") && !j.at("cache_dir").get<std::string>().empty()) {
            c.cache_dir = resolve(j.at("cache_dir").get<std::string>());
        }
        c.threads = j.value("threads", c.threads);
        c.save_models = j.value("save_models", c.save_models);
    } catch (const json::exception &e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
    return c;
}

ExperimentConfig load_config(const fs::path &path) {
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("cannot open config " + path.string());
    }
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str(), path.parent_path());
}

std::string config_to_json(const ExperimentConfig &config) {
    return config_json(config).dump(2);
}

DatasetSource dataset_from_argument(const std::string &arg) {
    DatasetSource d;
    if (arg == "synthetic") {
        return d;
    }
    const fs::path p(arg);
    if (fs::is_directory(p)) {
        for (const auto &entry : fs::directory_iterator(p)) {
            if (entry.path().extension() == ".content") {
                d.kind = DatasetSource::Kind::citation;
                d.name = entry.path().stem().string();
                d.content = entry.path();
                d.cites = p / (d.name + ".cites");
                return d;
            }
        }
        throw ConfigError("no .content file in " + p.string());
    }
    if (fs::exists(fs::path(arg + ".edges"))) {
        d.kind = DatasetSource::Kind::edge_list;
        d.name = p.filename().string();
        d.stem = p;
        return d;
    }
    throw ConfigError("dataset not found: " + arg);
}

LabeledDataset load_dataset(const ExperimentConfig &c) {
    LabeledDataset ds;
    switch (c.dataset.kind) {
    case DatasetSource::Kind::citation:
        ds = load_citation_dataset(c.dataset.content, c.dataset.cites, c.dataset.direction);
        break;
    case DatasetSource::Kind::edge_list:
        ds = read_edge_list(c.dataset.stem);
        break;
    case DatasetSource::Kind::synthetic:
        ds = synthetic_citation_graph(c.dataset.synthetic);
        break;
    }
    return c.use_lcc ? largest_connected_subgraph(ds) : ds;
}

std::uint64_t dataset_hash(const LabeledDataset &ds) {
    std::uint64_t n = ds.n_nodes();
    std::uint64_t h = fnv1a(&n, sizeof n);
    for (const auto &[u, v] : ds.graph.edges()) {
        const std::uint32_t pair[2] = {u, v};
        h = fnv1a(pair, sizeof pair, h);
    }
    h = fnv1a(ds.labels.data(), ds.labels.size() * sizeof(ClassId), h);
    return h;
}

FeatureTable cached_features(const LabeledDataset &ds, const ExperimentConfig &c) {
    const std::string params = features_json(c.features).dump();
    const std::uint64_t key = fnv1a(params.data(), params.size(), dataset_hash(ds));
    const fs::path dir = cache_directory(c);
    const fs::path path = dir / ("features_" + hex(key) + ".csv");
    if (fs::exists(path)) {
        std::vector<std::string> ids;
        auto table = feature_table_from_csv(CsvTable::load(path), ids);
        if (table.n_nodes() == ds.n_nodes() && ids == ds.node_ids) {
            return table;
        }
    }
    auto table = extract_all(ds.graph, c.features);
    ensure_directory(dir);
    feature_csv(table, ds.node_ids).save(path);
    return table;
}

void cmd_features(const ExperimentConfig &c, const std::string &command_line) {
    c.validate();
    const auto ds = load_dataset(c);
    const auto table = cached_features(ds, c);
    ensure_directory(c.out_dir);
    feature_csv(table, ds.node_ids).save(c.out_dir / "features.csv");
    write_manifest(c, command_line, ds, {{"n_features", table.n_columns()}});
}

DenseMatrix stacked_class_means(const FeatureTable &table, std::span<const ClassId> labels, std::size_t n_classes) {
    DenseMatrix out(table.n_columns(), n_classes);
    std::vector<double> count(n_classes, 0.0);
    for (auto l : labels) {
        count[l] += 1.0;
    }
    for (std::size_t k = 0; k < table.n_columns(); ++k) {
        const auto &col = table.column(k).values;
        const auto [lo, hi] = std::minmax_element(col.begin(), col.end());
        const double range = col.empty() ? 0.0 : *hi - *lo;
        double total = 0.0;
        for (std::size_t i = 0; i < col.size() && range > 0.0; ++i) {
            out(k, labels[i]) += (col[i] - *lo) / range;
        }
        for (std::size_t c = 0; c < n_classes; ++c) {
            out(k, c) = count[c] > 0.0 ? out(k, c) / count[c] : 0.0;
            total += out(k, c);
        }
        for (std::size_t c = 0; c < n_classes; ++c) {
            out(k, c) = total > 0.0 ? out(k, c) / total : 1.0 / static_cast<double>(n_classes);
        }
    }
    return out;
}

StatsResult cmd_stats(const ExperimentConfig &c, const std::string &command_line) {
    c.validate();
    const auto ds = load_dataset(c);
    const std::set<ClassId> present(ds.labels.begin(), ds.labels.end());
    if (present.size() < 2) {
        throw DataError("need at least two classes with labeled nodes");
    }
    const auto table = cached_features(ds, c);

    StatsResult r;
    CsvTable kw{{"feature", "H", "p_value", "log10_p"}, {}};
    std::size_t significant = 0;
    for (const auto &col : table.columns()) {
        const auto t = kruskal_wallis(col.values, ds.labels);
        r.feature_names.push_back(col.name);
        r.kruskal.push_back(t);
        significant += t.p_value < 0.01 ? 1 : 0;
        const double log_p = std::log10(std::max(t.p_value, std::numeric_limits<double>::denorm_min()));
        kw.rows.push_back({col.name, format_number(t.statistic), format_number(t.p_value), format_number(log_p)});
    }
    r.fraction_significant =
        table.n_columns() == 0 ? 0.0 : static_cast<double>(significant) / static_cast<double>(table.n_columns());

    r.class_means = stacked_class_means(table, ds.labels, ds.n_classes);
    CsvTable means{{"feature"}, {}};
    means.header.insert(means.header.end(), ds.class_names.begin(), ds.class_names.end());
    for (std::size_t k = 0; k < table.n_columns(); ++k) {
        std::vector<std::string> row{table.column(k).name};
        for (std::size_t cl = 0; cl < ds.n_classes; ++cl) {
            row.push_back(format_number(r.class_means(k, cl)));
        }
        means.rows.push_back(std::move(row));
    }

    r.correlation = class_correlation(ds);
    CsvTable corr{{"class"}, {}};
    corr.header.insert(corr.header.end(), ds.class_names.begin(), ds.class_names.end());
    for (std::size_t j = 0; j < ds.n_classes; ++j) {
        std::vector<std::string> row{ds.class_names[j]};
        for (std::size_t i = 0; i < ds.n_classes; ++i) {
            row.push_back(format_number(r.correlation.fraction(j, i)));
        }
        corr.rows.push_back(std::move(row));
    }

    ensure_directory(c.out_dir);
    kw.save(c.out_dir / "kruskal_wallis.csv");
    means.save(c.out_dir / "class_feature_means.csv");
    corr.save(c.out_dir / "class_correlation.csv");
    const json summary = {{"diagonal_mass", r.correlation.diagonal_mass},
                          {"baseline_squared", r.correlation.baseline_squared},
                          {"baseline_uniform", r.correlation.baseline_uniform},
                          {"n_features", table.n_columns()},
                          {"fraction_significant_p001", r.fraction_significant}};
    write_text(c.out_dir / "stats_summary.json", summary.dump(2) + "\n");
    write_manifest(c, command_line, ds);
    return r;
}

const EvalReport &ExperimentResult::report(double fraction, const std::string &model) const {
    const auto f = std::find(fractions.begin(), fractions.end(), fraction);
    const auto m = std::find(models.begin(), models.end(), model);
    if (f == fractions.end() || m == models.end()) {
        throw std::out_of_range("no report for " + model + " at " + format_number(fraction));
    }
    return reports[f - fractions.begin()][m - models.begin()];
}

std::vector<SplitMask> experiment_splits(const LabeledDataset &ds, const ExperimentConfig &c, double fraction) {
    const auto salt = static_cast<std::uint64_t>(std::llround(fraction * 1e6));
    return make_splits(ds, fraction, c.n_splits, mix_seed(c.seed, salt));
}

ExperimentResult cmd_experiment(const ExperimentConfig &c, const std::string &command_line) {
    c.validate();
    const auto ds = load_dataset(c);
    const auto shared = shared_inputs(ds, c, c.models);

    struct Job {
        std::size_t fraction;
        std::size_t split;
        SplitMask mask;
    };
    std::vector<Job> jobs;
    for (std::size_t f = 0; f < c.fractions.size(); ++f) {
        auto splits = experiment_splits(ds, c, c.fractions[f]);
        for (std::size_t s = 0; s < splits.size(); ++s) {
            jobs.push_back({f, s, std::move(splits[s])});
        }
    }
    if (c.save_models) {
        ensure_directory(c.out_dir / "models");
    }

    // acc[job][model]
    std::vector<std::vector<double>> acc(jobs.size(), std::vector<double>(c.models.size()));
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_lock;
    auto worker = [&] {
        for (std::size_t j = next++; j < jobs.size(); j = next++) {
            try {
                const auto &job = jobs[j];
                for (std::size_t m = 0; m < c.models.size(); ++m) {
                    auto run = prepare(shared, c, c.models[m], job.mask);
                    try {
                        const auto model = train(run.spec, run.inputs, ds.labels, ds.n_classes, job.mask);
                        acc[j][m] = accuracy(predict(model, run.inputs), ds.labels, job.mask.test);
                        if (c.save_models) {
                            save_model(model, model_path(c, c.models[m], c.fractions[job.fraction], job.split));
                        }
                    } catch (const NumericalError &) {
                        acc[j][m] = std::numeric_limits<double>::quiet_NaN();
                    }
                }
            } catch (...) {
                std::lock_guard lock(failure_lock);
                if (!failure) {
                    failure = std::current_exception();
                }
                next = jobs.size();
            }
        }
    };
    const std::size_t n_threads =
        std::max<std::size_t>(1, std::min(jobs.size(), c.threads ? c.threads : std::thread::hardware_concurrency()));
    {
        std::vector<std::jthread> pool;
        for (std::size_t t = 1; t < n_threads; ++t) {
            pool.emplace_back(worker);
        }
        worker();
    }
    if (failure) {
        std::rethrow_exception(failure);
    }

    ExperimentResult result;
    result.fractions = c.fractions;
    result.models = c.models;
    result.reports.assign(c.fractions.size(), {});
    CsvTable table{{"fraction", "model", "mean", "std", "diverged"}, {}};
    for (std::size_t s = 0; s < c.n_splits; ++s) {
        table.header.push_back("split_" + std::to_string(s));
    }
    json split_seeds = json::object();
    for (std::size_t f = 0; f < c.fractions.size(); ++f) {
        std::vector<std::uint64_t> seeds;
        for (const auto &job : jobs) {
            if (job.fraction == f) {
                seeds.push_back(job.mask.seed);
            }
        }
        split_seeds[fraction_tag(c.fractions[f])] = seeds;
        for (std::size_t m = 0; m < c.models.size(); ++m) {
            std::vector<double> values;
            for (std::size_t j = 0; j < jobs.size(); ++j) {
                if (jobs[j].fraction == f) {
                    values.push_back(acc[j][m]);
                }
            }
            auto report = summarize(c.models[m], values, seeds);
            std::vector<std::string> row{fraction_tag(c.fractions[f]), c.models[m], format_number(report.mean),
                                         format_number(report.std_dev), std::to_string(report.diverged)};
            for (double v : report.accuracies) {
                row.push_back(format_number(v));
            }
            table.rows.push_back(std::move(row));
            result.reports[f].push_back(std::move(report));
        }
    }

    CsvTable comparisons{{"fraction", "model_a", "model_b", "mean_a", "mean_b", "U", "p_value"}, {}};
    auto finite = [](const std::vector<double> &v) {
        std::vector<double> out;
        std::copy_if(v.begin(), v.end(), std::back_inserter(out), [](double x) { return std::isfinite(x); });
        return out;
    };
    for (std::size_t f = 0; f < c.fractions.size(); ++f) {
        for (const auto &[a, b] : c.comparisons) {
            const auto ia = std::find(c.models.begin(), c.models.end(), a);
            const auto ib = std::find(c.models.begin(), c.models.end(), b);
            if (ia == c.models.end() || ib == c.models.end()) {
                continue;
            }
            const auto &ra = result.reports[f][ia - c.models.begin()];
            const auto &rb = result.reports[f][ib - c.models.begin()];
            const auto xa = finite(ra.accuracies);
            const auto xb = finite(rb.accuracies);
            if (xa.empty() || xb.empty()) {
                continue;
            }
            ComparisonRow row{c.fractions[f], a, b, ra.mean, rb.mean, mann_whitney(xa, xb)};
            comparisons.rows.push_back({fraction_tag(row.fraction), a, b, format_number(row.mean_a),
                                        format_number(row.mean_b), format_number(row.test.statistic),
                                        format_number(row.test.p_value)});
            result.comparisons.push_back(std::move(row));
        }
    }

    ensure_directory(c.out_dir);
    table.save(c.out_dir / "accuracy.csv");
    comparisons.save(c.out_dir / "comparisons.csv");
    write_manifest(c, command_line, ds, {{"split_seeds", split_seeds}});
    return result;
}

double evaluate_saved_model(const ExperimentConfig &c, const std::string &model_name, const fs::path &path,
                            double fraction, std::size_t split_index) {
    if (split_index >= c.n_splits) {
        throw ConfigError("split index " + std::to_string(split_index) + " is out of range");
    }
    const auto ds = load_dataset(c);
    const auto model = load_model(path);
    if (model.spec.architecture != model_def(model_name).architecture) {
        throw ConfigError(path.string() + " does not hold a " + model_name + " model");
    }
    const auto shared = shared_inputs(ds, c, {model_name});
    const auto splits = experiment_splits(ds, c, fraction);
    const auto &mask = splits[split_index];
    auto run = prepare(shared, c, model_name, mask);
    return accuracy(predict(model, run.inputs), ds.labels, mask.test);
}

} // namespace topogcn
