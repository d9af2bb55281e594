// Command-line front end: features, stats, experiment, evaluate.
//
// Exit codes: 0 success, 1 usage or config error, 2 data error, 3 numerical failure.

#include <CLI11.hpp>
#include <iostream>
#include <optional>

#include "topogcn/csv.hpp"
#include "topogcn/experiment.hpp"

namespace {

using namespace topogcn;

struct CommonFlags {
    std::string config;
    std::string dataset;
    std::string out_dir;
    std::optional<std::uint64_t> seed;
    std::optional<bool> lcc;
};

void add_common(CLI::App *app, CommonFlags &flags) {
    app->add_option("--config", flags.config, "JSON experiment config");
    app->add_option("--dataset", flags.dataset, "directory holding <name>.content/.cites, an edge-list stem, or 'synthetic'");
    app->add_option("--out-dir", flags.out_dir, "output directory");
    app->add_option("--seed", flags.seed, "master seed");
    app->add_flag("--lcc,!--no-lcc", flags.lcc, "restrict to the largest weakly connected component");
}

ExperimentConfig resolve(const CommonFlags &flags) {
    ExperimentConfig c = flags.config.empty() ? ExperimentConfig{} : load_config(flags.config);
    if (!flags.dataset.empty()) {
        c.dataset = dataset_from_argument(flags.dataset);
    }
    if (!flags.out_dir.empty()) {
        c.out_dir = flags.out_dir;
    }
    if (flags.seed) {
        c.seed = *flags.seed;
    }
    if (flags.lcc) {
        c.use_lcc = *flags.lcc;
    }
    return c;
}

std::string joined_args(int argc, char **argv) {
    std::string s = "topogcn";
    for (int i = 1; i < argc; ++i) {
        s += ' ';
        s += argv[i];
    }
    return s;
}

} // namespace

int main(int argc, char **argv) {
    CLI::App app{"Topology-based node classification on citation graphs"};
    app.require_subcommand(1);

    CommonFlags flags;
    auto *features = app.add_subcommand("features", "extract the topological feature table");
    auto *stats = app.add_subcommand("stats", "feature/class association and neighbor-class tables");
    auto *experiment = app.add_subcommand("experiment", "accuracy sweep over train fractions");
    auto *evaluate = app.add_subcommand("evaluate", "test accuracy of a saved model on one split");
    for (auto *sub : {features, stats, experiment, evaluate}) {
        add_common(sub, flags);
    }

    std::vector<double> fractions;
    std::optional<std::size_t> n_splits;
    std::vector<std::string> models;
    bool save_models = false;
    experiment->add_option("--fractions", fractions, "train fractions");
    experiment->add_option("--splits", n_splits, "splits per fraction");
    experiment->add_option("--models", models, "model names")->check(CLI::IsMember(known_models()));
    experiment->add_flag("--save-models", save_models, "write every trained model under <out-dir>/models");

    std::string model_name;
    std::string model_file;
    double fraction = 0.0;
    std::size_t split_index = 0;
    evaluate->add_option("--model-name", model_name, "model kind")->required()->check(CLI::IsMember(known_models()));
    evaluate->add_option("--model", model_file, "saved model JSON")->required();
    evaluate->add_option("--fraction", fraction, "train fraction of the split")->required();
    evaluate->add_option("--split", split_index, "split index")->required();
    evaluate->add_option("--splits", n_splits, "splits per fraction the model was trained with");

    CLI11_PARSE(app, argc, argv);

    const std::string command_line = joined_args(argc, argv);
    try {
        auto config = resolve(flags);
        if (!fractions.empty()) {
            config.fractions = fractions;
        }
        if (n_splits) {
            config.n_splits = *n_splits;
        }
        if (!models.empty()) {
            config.models = models;
        }
        config.save_models = config.save_models || save_models;

        if (features->parsed()) {
            cmd_features(config, command_line);
            std::cout << (config.out_dir / "features.csv").string() << '\n';
        } else if (stats->parsed()) {
            const auto r = cmd_stats(config, command_line);
            std::cout << "diagonal mass " << format_number(r.correlation.diagonal_mass) << " (baseline sum p^2 "
                      << format_number(r.correlation.baseline_squared) << ", 1/C "
                      << format_number(r.correlation.baseline_uniform) << ")\n"
                      << "features with p < 0.01: " << format_number(r.fraction_significant) << '\n';
        } else if (experiment->parsed()) {
            const auto r = cmd_experiment(config, command_line);
            for (std::size_t f = 0; f < r.fractions.size(); ++f) {
                for (const auto &rep : r.reports[f]) {
                    std::cout << format_number(r.fractions[f]) << ' ' << rep.model << ' ' << format_number(rep.mean)
                              << " +- " << format_number(rep.std_dev) << '\n';
                }
            }
        } else if (evaluate->parsed()) {
            config.validate();
            std::cout << format_number(evaluate_saved_model(config, model_name, model_file, fraction, split_index))
                      << '\n';
        }
    } catch (const ConfigError &e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 1;
    } catch (const NumericalError &e) {
        std::cerr << "numerical failure at epoch " << e.epoch() << ": " << e.what() << '\n';
        return 3;
    } catch (const DataError &e) {
        std::cerr << "data error: " << e.what() << '\n';
        return 2;
    } catch (const std::invalid_argument &e) {
        std::cerr << "invalid argument: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
