#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <numeric>
#include <sstream>

#include "fixtures.hpp"
#include "topogcn/csv.hpp"
#include "topogcn/experiment.hpp"

using namespace topogcn;
namespace fs = std::filesystem;

namespace {

ExperimentConfig small_config(const fs::path &out) {
    ExperimentConfig c;
    c.dataset.kind = DatasetSource::Kind::synthetic;
    c.dataset.synthetic.n_nodes = 80;
    c.dataset.synthetic.seed = 4;
    c.fractions = {0.2, 0.5};
    c.n_splits = 3;
    c.seed = 12;
    c.features.motif4 = false;
    c.out_dir = out;
    for (const auto &m : c.models) {
        auto s = c.model_spec(m);
        s.epochs = 40;
        c.model_specs[m] = s;
    }
    return c;
}

std::vector<std::vector<std::string>> csv_rows(const fs::path &path) {
    std::vector<std::vector<std::string>> rows;
    std::istringstream in(fixture::read_file(path));
    std::string line;
    while (std::getline(in, line)) {
        std::vector<std::string> cells;
        std::istringstream ls(line);
        std::string cell;
        while (std::getline(ls, cell, ',')) {
            cells.push_back(cell);
        }
        rows.push_back(cells);
    }
    return rows;
}

int run_cli(const std::string &args) {
    const std::string cmd = std::string(TOPOGCN_CLI) + " " + args + " > /dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

} // namespace

TEST_CASE("configs survive a JSON round trip") {
    auto c = small_config("/tmp/out");
    c.comparisons = {{"combined", "gcn_sym_topo"}};
    c.features.flow_threshold = 0.25;
    auto back = parse_config(config_to_json(c));
    CHECK(config_to_json(back) == config_to_json(c));
    CHECK(back.model_spec("combined").epochs == 40);
    CHECK(back.features.flow_threshold == 0.25);
    CHECK(back.dataset.synthetic.n_nodes == 80);
}

TEST_CASE("config paths resolve against the config directory") {
    auto dir = fixture::scratch("cfg_paths");
    auto path = fixture::write_file(dir / "run.json", R"({"dataset": {"content": "d/x.content", "cites": "d/x.cites"},
                                                          "out_dir": "results"})");
    auto c = load_config(path);
    CHECK(c.dataset.kind == DatasetSource::Kind::citation);
    CHECK(c.dataset.content == dir / "d/x.content");
    CHECK(c.out_dir == dir / "results");
    CHECK_THROWS_WITH_AS(c.validate(), doctest::Contains("x.content"), ConfigError);
}

TEST_CASE("bad configs raise config errors") {
    CHECK_THROWS_WITH_AS(load_config("/nonexistent/run.json"), doctest::Contains("/nonexistent/run.json"),
                         ConfigError);
    CHECK_THROWS_AS(parse_config("{"), ConfigError);
    CHECK_THROWS_AS(parse_config(R"({"models": ["nope"]})").validate(), ConfigError);
    CHECK_THROWS_AS(parse_config(R"({"fractions": [0.0]})").validate(), ConfigError);
    CHECK_THROWS_AS(parse_config(R"({"model_specs": {"combined": {"external_width": 0}}})").validate(), ConfigError);
    CHECK_THROWS_AS(dataset_from_argument("/nonexistent/cora"), ConfigError);
    CHECK(dataset_from_argument("synthetic").kind == DatasetSource::Kind::synthetic);
}

TEST_CASE("datasets are found by directory or edge-list stem") {
    auto dir = fixture::scratch("ds_arg");
    fixture::write_file(dir / "toy.content", "a\t1\tx\nb\t0\ty\n");
    fixture::write_file(dir / "toy.cites", "a\tb\n");
    auto src = dataset_from_argument(dir.string());
    CHECK(src.kind == DatasetSource::Kind::citation);
    CHECK(src.name == "toy");
    CHECK(src.cites == dir / "toy.cites");

    ExperimentConfig c;
    c.dataset = src;
    auto ds = load_dataset(c);
    write_edge_list(ds, dir / "dump");
    auto stem = dataset_from_argument((dir / "dump").string());
    CHECK(stem.kind == DatasetSource::Kind::edge_list);
}

TEST_CASE("features are cached and reruns are byte identical") {
    auto dir = fixture::scratch("features_run");
    auto c = small_config(dir / "a");
    cmd_features(c);
    const auto first = fixture::read_file(dir / "a" / "features.csv");
    REQUIRE(!first.empty());
    const auto ds = load_dataset(c);
    const auto cache = c.out_dir / "cache";
    REQUIRE(fs::exists(cache));
    const auto n_cached = std::distance(fs::directory_iterator(cache), fs::directory_iterator());
    CHECK(n_cached == 1);
    auto cached = cached_features(ds, c);
    CHECK(cached.n_nodes() == ds.n_nodes());
    cmd_features(c);
    CHECK(fixture::read_file(dir / "a" / "features.csv") == first);

    auto d = small_config(dir / "b");
    cmd_features(d);
    CHECK(fixture::read_file(dir / "b" / "features.csv") == first);
    CHECK(fs::exists(dir / "b" / "manifest.json"));
}

TEST_CASE("dataset hash tracks edges and labels") {
    ExperimentConfig c;
    c.dataset.synthetic.n_nodes = 50;
    auto ds = load_dataset(c);
    const auto h = dataset_hash(ds);
    CHECK(dataset_hash(load_dataset(c)) == h);
    ds.labels[0] = static_cast<ClassId>((ds.labels[0] + 1) % ds.n_classes);
    CHECK(dataset_hash(ds) != h);
}

TEST_CASE("class mean profiles are row distributions") {
    auto c = small_config(fixture::scratch("means"));
    auto ds = load_dataset(c);
    auto table = cached_features(ds, c);
    auto m = stacked_class_means(table, ds.labels, ds.n_classes);
    REQUIRE(m.rows() == table.n_columns());
    REQUIRE(m.cols() == ds.n_classes);
    for (std::size_t r = 0; r < m.rows(); ++r) {
        auto row = m.row(r);
        CHECK(std::accumulate(row.begin(), row.end(), 0.0) == doctest::Approx(1.0).epsilon(1e-12));
        for (double v : row) {
            CHECK(v >= 0.0);
        }
    }
}

TEST_CASE("stats writes its tables and refuses a single class") {
    auto dir = fixture::scratch("stats_run");
    auto c = small_config(dir / "a");
    auto r = cmd_stats(c);
    CHECK(r.kruskal.size() == r.feature_names.size());
    CHECK(r.fraction_significant >= 0.0);
    CHECK(r.fraction_significant <= 1.0);
    for (const char *name :
         {"kruskal_wallis.csv", "class_feature_means.csv", "class_correlation.csv", "stats_summary.json", "manifest.json"}) {
        CHECK(fs::exists(dir / "a" / name));
    }
    const auto first = fixture::read_file(dir / "a" / "kruskal_wallis.csv");
    cmd_stats(c);
    CHECK(fixture::read_file(dir / "a" / "kruskal_wallis.csv") == first);
    // the synthetic graph is built with strong homophily
    CHECK(r.correlation.diagonal_mass > r.correlation.baseline_uniform);

    auto one = small_config(dir / "b");
    one.dataset.synthetic.n_classes = 1;
    CHECK_THROWS_WITH_AS(cmd_stats(one), doctest::Contains("two classes"), DataError);
}

TEST_CASE("experiment runs are reproducible and saved models re-evaluate") {
    auto dir = fixture::scratch("experiment_run");
    auto c = small_config(dir / "a");
    c.save_models = true;
    auto r = cmd_experiment(c);
    REQUIRE(r.reports.size() == 2);
    REQUIRE(r.reports[0].size() == 4);
    for (const auto &per_fraction : r.reports) {
        for (const auto &rep : per_fraction) {
            CHECK(rep.accuracies.size() == 3);
            CHECK(rep.diverged == 0);
            CHECK(rep.mean > 0.0);
            CHECK(rep.mean <= 1.0);
        }
    }
    CHECK(r.comparisons.size() == 6);
    const auto acc = fixture::read_file(dir / "a" / "accuracy.csv");
    const auto cmp = fixture::read_file(dir / "a" / "comparisons.csv");

    auto again = small_config(dir / "b");
    again.threads = 3;
    cmd_experiment(again);
    CHECK(fixture::read_file(dir / "b" / "accuracy.csv") == acc);
    CHECK(fixture::read_file(dir / "b" / "comparisons.csv") == cmp);

    auto rows = csv_rows(dir / "a" / "accuracy.csv");
    REQUIRE(rows.size() == 1 + 2 * 4);
    CHECK(rows[0][0] == "fraction");
    const auto &rep = r.report(0.5, "gcn_asym_topo");
    const auto path = dir / "a" / "models";
    REQUIRE(fs::exists(path));
    for (const auto &entry : fs::directory_iterator(path)) {
        const auto name = entry.path().filename().string();
        if (name.starts_with("gcn_asym_topo_f0.5_s1")) {
            CHECK(evaluate_saved_model(c, "gcn_asym_topo", entry.path(), 0.5, 1) == rep.accuracies[1]);
        }
    }
    CHECK(std::distance(fs::directory_iterator(path), fs::directory_iterator()) == 2 * 4 * 3);
}

TEST_CASE("splits depend on the seed and fraction only") {
    auto c = small_config("/tmp/unused");
    auto ds = load_dataset(c);
    auto a = experiment_splits(ds, c, 0.2);
    c.models = {"gcn_sym_bow"};
    auto b = experiment_splits(ds, c, 0.2);
    REQUIRE(a.size() == 3);
    for (std::size_t k = 0; k < 3; ++k) {
        CHECK(a[k].train == b[k].train);
    }
    CHECK(experiment_splits(ds, c, 0.5)[0].train != a[0].train);
}

TEST_CASE("command-line exit codes") {
    auto dir = fixture::scratch("cli");
    CHECK(run_cli("--help") == 0);
    CHECK(run_cli("") != 0);
    CHECK(run_cli("features --config " + (dir / "missing.json").string()) == 1);
    CHECK(run_cli("experiment --dataset synthetic --models lstm") != 0);
    fixture::write_file(dir / "bad.content", "a\t1\tx\nb\t9\ty\n");
    fixture::write_file(dir / "bad.cites", "a\tb\n");
    CHECK(run_cli("features --dataset " + dir.string() + " --out-dir " + (dir / "o").string()) == 2);
    fixture::write_file(dir / "cfg.json", R"({"dataset": {"synthetic": {"n_nodes": 60}},
                                             "features": {"motif4": false}})");
    CHECK(run_cli("stats --config " + (dir / "cfg.json").string() + " --out-dir " + (dir / "s").string()) == 0);
    CHECK(fs::exists(dir / "s" / "kruskal_wallis.csv"));
    CHECK(run_cli("experiment --config " + (dir / "cfg.json").string() + " --out-dir " + (dir / "e").string() +
                  " --fractions 0.5 --splits 1 --models gcn_sym_bow --save-models") == 0);
    CHECK(fs::exists(dir / "e" / "accuracy.csv"));
}
