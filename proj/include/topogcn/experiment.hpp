#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "topogcn/dataset.hpp"
#include "topogcn/features.hpp"
#include "topogcn/neural.hpp"
#include "topogcn/stats.hpp"
#include "topogcn/synthetic.hpp"

namespace topogcn {

/// The configuration is inconsistent or names something that does not exist.
class ConfigError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

struct DatasetSource {
    enum class Kind { citation, edge_list, synthetic };
    Kind kind = Kind::synthetic;
    std::string name = "synthetic";
    std::filesystem::path content;
    std::filesystem::path cites;
    CiteDirection direction = CiteDirection::citing_to_cited;
    /// `<stem>.edges` / `<stem>.labels` for Kind::edge_list.
    std::filesystem::path stem;
    SyntheticParams synthetic;
};

std::vector<double> default_train_fractions();

/// Model names understood by the experiment runner, e.g. gcn_sym_bow,
/// gcn_asym_topo, gcn_sym_topo, combined, ffn_topology.
std::vector<std::string> known_models();

struct ExperimentConfig {
    DatasetSource dataset;
    bool use_lcc = true;
    std::vector<std::string> models{"gcn_sym_bow", "gcn_asym_topo", "gcn_sym_topo", "combined"};
    std::vector<double> fractions = default_train_fractions();
    std::size_t n_splits = 10;
    std::uint64_t seed = 0;
    FeatureParams features;
    /// Per-model hyperparameters replacing the defaults of known_models().
    std::map<std::string, ModelSpec> model_specs;
    /// Pairs compared with Mann-Whitney at every fraction.
    std::vector<std::pair<std::string, std::string>> comparisons{
        {"combined", "gcn_sym_bow"}, {"gcn_asym_topo", "gcn_sym_topo"}, {"gcn_asym_topo", "gcn_sym_bow"}};
    std::filesystem::path out_dir = "out";
    /// Feature CSV cache; empty means `<out_dir>/cache`.
    std::filesystem::path cache_dir;
    /// Worker threads for splits; 0 picks the hardware concurrency.
    std::size_t threads = 0;
    bool save_models = false;

    /// Hyperparameters for `model` (seed not yet set).
    ModelSpec model_spec(const std::string &model) const;
    /// Throws ConfigError.
    void validate() const;
};

/// Reads the JSON config. Relative paths resolve against the file's directory.
ExperimentConfig load_config(const std::filesystem::path &path);
ExperimentConfig parse_config(const std::string &text, const std::filesystem::path &base_dir = {});
/// Complete JSON form accepted back by parse_config.
std::string config_to_json(const ExperimentConfig &config);

/// Picks up `<dir>/<name>.content` and `<dir>/<name>.cites`, or `synthetic`.
DatasetSource dataset_from_argument(const std::string &arg);

/// Loads (or generates) the dataset and restricts it to the LCC when asked.
LabeledDataset load_dataset(const ExperimentConfig &config);

/// FNV-1a over node count, edges and labels.
std::uint64_t dataset_hash(const LabeledDataset &ds);

/// extract_all, read from or stored in the cache directory.
FeatureTable cached_features(const LabeledDataset &ds, const ExperimentConfig &config);

/// Writes features.csv and manifest.json into out_dir.
void cmd_features(const ExperimentConfig &config, const std::string &command_line = "features");

struct StatsResult {
    std::vector<std::string> feature_names;
    std::vector<TestResult> kruskal;
    /// feature x class; each row sums to 1.
    DenseMatrix class_means;
    ClassCorrelation correlation;
    /// Share of features with p < 0.01.
    double fraction_significant = 0.0;
};

/// Per-column class means after min-max scaling to [0, 1], each row divided by
/// its sum (uniform when the column is constant).
DenseMatrix stacked_class_means(const FeatureTable &table, std::span<const ClassId> labels, std::size_t n_classes);

/// kruskal_wallis.csv, class_feature_means.csv, class_correlation.csv,
/// stats_summary.json and manifest.json. Throws DataError on fewer than two classes.
StatsResult cmd_stats(const ExperimentConfig &config, const std::string &command_line = "stats");

struct ComparisonRow {
    double fraction = 0.0;
    std::string model_a;
    std::string model_b;
    double mean_a = 0.0;
    double mean_b = 0.0;
    TestResult test;
};

struct ExperimentResult {
    std::vector<double> fractions;
    std::vector<std::string> models;
    /// reports[f][m]
    std::vector<std::vector<EvalReport>> reports;
    std::vector<ComparisonRow> comparisons;

    const EvalReport &report(double fraction, const std::string &model) const;
};

/// Splits for one fraction; every model sees the same splits.
std::vector<SplitMask> experiment_splits(const LabeledDataset &ds, const ExperimentConfig &config, double fraction);

/// Trains every model on every split of every fraction. Writes accuracy.csv,
/// comparisons.csv and manifest.json. Diverged splits are recorded as NaN.
ExperimentResult cmd_experiment(const ExperimentConfig &config, const std::string &command_line = "experiment");

/// Test accuracy of a saved model of kind `model_name` on split `split_index`.
double evaluate_saved_model(const ExperimentConfig &config, const std::string &model_name,
                            const std::filesystem::path &model_path, double fraction, std::size_t split_index);

} // namespace topogcn
