#include <doctest.h>

#include <cmath>
#include <numeric>

#include "fixtures.hpp"
#include "gradcheck.hpp"
#include "oracles.hpp"
#include "topogcn/neural.hpp"

using namespace topogcn;

namespace {

DenseMatrix random_matrix(std::size_t rows, std::size_t cols, std::uint64_t seed, double zero_rate = 0.0) {
    Rng rng(seed);
    DenseMatrix m(rows, cols);
    for (double &v : m.data()) {
        v = uniform01(rng) < zero_rate ? 0.0 : 2.0 * uniform01(rng) - 1.0;
    }
    return m;
}

DenseMatrix naive_product(const DenseMatrix &a, const DenseMatrix &b) {
    DenseMatrix out(a.rows(), b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i) {
        for (std::size_t j = 0; j < b.cols(); ++j) {
            for (std::size_t k = 0; k < a.cols(); ++k) {
                out(i, j) += a(i, k) * b(k, j);
            }
        }
    }
    return out;
}

double max_abs_diff(const DenseMatrix &a, const DenseMatrix &b) {
    REQUIRE(a.rows() == b.rows());
    REQUIRE(a.cols() == b.cols());
    double worst = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        worst = std::max(worst, std::abs(a.data()[i] - b.data()[i]));
    }
    return worst;
}

/// D^-1/2 M D^-1/2 with D the row sums of M, on a dense matrix.
DenseMatrix dense_normalized(const std::vector<std::vector<double>> &m) {
    const std::size_t n = m.size();
    std::vector<double> d(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        d[i] = std::accumulate(m[i].begin(), m[i].end(), 0.0);
    }
    DenseMatrix out(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            out(i, j) = m[i][j] / std::sqrt(d[i] * d[j]);
        }
    }
    return out;
}

std::vector<std::vector<double>> as_double(const std::vector<std::vector<int>> &a) {
    std::vector<std::vector<double>> out(a.size(), std::vector<double>(a.size(), 0.0));
    for (std::size_t i = 0; i < a.size(); ++i) {
        for (std::size_t j = 0; j < a.size(); ++j) {
            out[i][j] = a[i][j];
        }
    }
    return out;
}

double spectral_radius_bound(const DenseMatrix &s) {
    DenseMatrix v(s.rows(), 1, 1.0);
    double norm = 0.0;
    for (int it = 0; it < 500; ++it) {
        v = naive_product(s, v);
        norm = std::sqrt(std::inner_product(v.data().begin(), v.data().end(), v.data().begin(), 0.0));
        for (double &x : v.data()) {
            x /= norm;
        }
    }
    return norm;
}

struct Toy {
    DirectedGraph graph;
    std::vector<ClassId> labels;
    DenseMatrix features;
    DenseMatrix external;
    SplitMask mask;
};

Toy toy(std::size_t n, std::uint64_t seed) {
    Toy t;
    t.graph = oracle::random_digraph(n, 0.3, seed);
    Rng rng(mix_seed(seed, 9));
    for (std::size_t i = 0; i < n; ++i) {
        t.labels.push_back(static_cast<ClassId>(uniform_below(rng, 3)));
    }
    t.features = random_matrix(n, 5, mix_seed(seed, 1));
    t.external = random_matrix(n, 4, mix_seed(seed, 2));
    for (NodeId i = 0; i < n; ++i) {
        (i % 3 == 2 ? t.mask.test : t.mask.train).push_back(i);
    }
    return t;
}

ModelSpec small_spec(Architecture a, std::vector<std::size_t> hidden) {
    ModelSpec s;
    s.architecture = a;
    s.hidden = std::move(hidden);
    s.external_width = 3;
    s.dropout.assign(s.n_layers(), 0.0);
    s.l2.assign(s.n_layers(), 0.05);
    s.seed = 17;
    return s;
}

TrainedModel perturbed_model(const ModelSpec &spec, std::size_t in, std::size_t ext, std::size_t c) {
    auto model = init_model(spec, in, ext, c);
    Rng rng(mix_seed(spec.seed, 5));
    for (auto &b : model.biases) {
        for (double &v : b) {
            v = 0.2 * (2.0 * uniform01(rng) - 1.0);
        }
    }
    return model;
}

} // namespace

TEST_CASE("dense products agree with the triple loop") {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        auto a = random_matrix(7, 5, seed, 0.3);
        auto b = random_matrix(5, 4, seed + 100);
        auto c = random_matrix(7, 4, seed + 200);
        CHECK(max_abs_diff(matmul(a, b), naive_product(a, b)) < 1e-12);
        CHECK(max_abs_diff(matmul_tn(a, c), naive_product(a.transposed(), c)) < 1e-12);
        CHECK(max_abs_diff(matmul_nt(c, b), naive_product(c, b.transposed())) < 1e-12);
    }
    CHECK_THROWS_AS(matmul(DenseMatrix(2, 3), DenseMatrix(2, 3)), ShapeError);
}

TEST_CASE("sparse products agree with dense ones") {
    auto g = oracle::random_digraph(9, 0.3, 4);
    auto adj = normalize_adjacency(g, AdjacencyMode::asymmetric);
    auto x = random_matrix(9, 3, 8);
    auto dense = adj.fwd.to_dense();
    CHECK(max_abs_diff(spmm(adj.fwd, x), naive_product(dense, x)) < 1e-12);
    CHECK(max_abs_diff(spmm_t(adj.fwd, x), naive_product(dense.transposed(), x)) < 1e-12);
    CHECK(adj.fwd.transposed().to_dense() == dense.transposed());
}

TEST_CASE("fold and unfold of stacked rows") {
    DenseMatrix stacked(2, 1, std::vector<double>{3.0, 5.0});
    auto folded = fold_stacked(stacked);
    CHECK(folded.rows() == 1);
    CHECK(folded.cols() == 2);
    CHECK(folded(0, 0) == 3.0);
    CHECK(folded(0, 1) == 5.0);

    auto x = random_matrix(8, 3, 1);
    auto f = fold_stacked(x);
    REQUIRE(f.rows() == 4);
    REQUIRE(f.cols() == 6);
    for (std::size_t i = 0; i < 4; ++i) {
        for (std::size_t j = 0; j < 3; ++j) {
            CHECK(f(i, j) == x(i, j));
            CHECK(f(i, 3 + j) == x(4 + i, j));
        }
    }
    CHECK(unfold_stacked(f) == x);
    CHECK_THROWS_AS(fold_stacked(DenseMatrix(3, 2)), ShapeError);
    CHECK_THROWS_AS(unfold_stacked(DenseMatrix(2, 3)), ShapeError);
}

TEST_CASE("normalized adjacency of an empty graph is the identity") {
    DirectedGraph g(4, std::vector<Edge>{});
    auto sym = normalize_adjacency(g, AdjacencyMode::symmetric);
    CHECK(sym.sym.to_dense() == DenseMatrix::identity(4));
    auto asym = normalize_adjacency(g, AdjacencyMode::asymmetric);
    CHECK(asym.fwd.to_dense() == DenseMatrix::identity(4));
    CHECK(asym.bwd.to_dense() == DenseMatrix::identity(4));
}

TEST_CASE("a single edge gives a uniform 2x2 operator") {
    DirectedGraph g(2, std::vector<Edge>{{0, 1}});
    auto s = normalize_adjacency(g, AdjacencyMode::symmetric).sym.to_dense();
    for (double v : s.data()) {
        CHECK(v == doctest::Approx(0.5).epsilon(1e-15));
    }
    auto a = normalize_adjacency(g, AdjacencyMode::asymmetric);
    auto fwd = a.fwd.to_dense();
    CHECK(fwd(0, 1) == doctest::Approx(1.0 / std::sqrt(2.0)));
    CHECK(fwd(1, 0) == 0.0);
    CHECK(fwd(1, 1) == 1.0);
    auto bwd = a.bwd.to_dense();
    CHECK(bwd(1, 0) == doctest::Approx(1.0 / std::sqrt(2.0)));
    CHECK(bwd(0, 1) == 0.0);
}

TEST_CASE("normalized adjacency matches the dense formula") {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        CAPTURE(seed);
        auto g = oracle::random_digraph(10, 0.25, seed);
        const auto a = as_double(oracle::adjacency(g));
        const std::size_t n = a.size();
        auto sym_in = a;
        auto fwd_in = a;
        auto bwd_in = a;
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < n; ++j) {
                sym_in[i][j] = a[i][j] + a[j][i];
                bwd_in[i][j] = a[j][i];
            }
            sym_in[i][i] += 1.0;
            fwd_in[i][i] += 1.0;
            bwd_in[i][i] += 1.0;
        }
        auto sym = normalize_adjacency(g, AdjacencyMode::symmetric).sym.to_dense();
        CHECK(max_abs_diff(sym, dense_normalized(sym_in)) < 1e-14);
        CHECK(sym == sym.transposed());
        CHECK(spectral_radius_bound(sym) <= 1.0 + 1e-9);
        auto asym = normalize_adjacency(g, AdjacencyMode::asymmetric);
        CHECK(max_abs_diff(asym.fwd.to_dense(), dense_normalized(fwd_in)) < 1e-14);
        CHECK(max_abs_diff(asym.bwd.to_dense(), dense_normalized(bwd_in)) < 1e-14);
    }
}

TEST_CASE("gcn layer matches the explicit product") {
    DirectedGraph empty(3, std::vector<Edge>{});
    auto id = normalize_adjacency(empty, AdjacencyMode::symmetric);
    auto x = random_matrix(3, 4, 2);
    auto w = random_matrix(4, 2, 3);
    CHECK(max_abs_diff(gcn_layer(id, x, w, Activation::identity), naive_product(x, w)) < 1e-14);

    auto g = oracle::random_digraph(8, 0.3, 6);
    auto x8 = random_matrix(8, 4, 7);
    auto sym = normalize_adjacency(g, AdjacencyMode::symmetric);
    auto want = naive_product(naive_product(sym.sym.to_dense(), x8), w);
    for (double &v : want.data()) {
        v = std::max(v, 0.0);
    }
    CHECK(max_abs_diff(gcn_layer(sym, x8, w, Activation::relu), want) < 1e-12);

    auto asym = normalize_adjacency(g, AdjacencyMode::asymmetric);
    auto out = gcn_layer(asym, x8, w, Activation::identity);
    REQUIRE(out.rows() == 16);
    auto top = naive_product(naive_product(asym.fwd.to_dense(), x8), w);
    auto bottom = naive_product(naive_product(asym.bwd.to_dense(), x8), w);
    CHECK(max_abs_diff(out, vconcat(top, bottom)) < 1e-12);

    CHECK_THROWS_AS(gcn_layer(sym, x8, random_matrix(3, 2, 1), Activation::relu), ShapeError);
    CHECK_THROWS_AS(gcn_layer(sym, x, w, Activation::relu), ShapeError);
}

TEST_CASE("model specs are validated") {
    auto s = ModelSpec::gcn_defaults(Architecture::gcn_combined);
    CHECK_NOTHROW(s.validate());
    CHECK(s.n_layers() == 3);
    s.external_width = 0;
    CHECK_THROWS_AS(s.validate(), std::invalid_argument);
    auto d = ModelSpec::gcn_defaults(Architecture::gcn_sym);
    d.dropout = {0.5};
    CHECK_THROWS_AS(d.validate(), std::invalid_argument);
    d.dropout = {1.0, 0.0};
    CHECK_THROWS_AS(d.validate(), std::invalid_argument);
    auto f = ModelSpec::ffn_defaults();
    CHECK(f.n_layers() == 3);
    f.hidden = {300, 0};
    CHECK_THROWS_AS(f.validate(), std::invalid_argument);
    auto e = ModelSpec::kipf_defaults();
    e.epochs = 0;
    CHECK_THROWS_AS(e.validate(), std::invalid_argument);
    CHECK(architecture_from_string("gcn_asym") == Architecture::gcn_asym);
    CHECK_THROWS_AS(architecture_from_string("lstm"), std::invalid_argument);
}

TEST_CASE("layer shapes follow the architecture") {
    auto sym = init_model(small_spec(Architecture::gcn_sym, {4}), 5, 0, 3);
    CHECK(sym.weights[0].rows() == 5);
    CHECK(sym.weights[1].rows() == 4);
    auto asym = init_model(small_spec(Architecture::gcn_asym, {4, 2}), 5, 0, 3);
    CHECK(asym.weights[1].rows() == 8);
    CHECK(asym.weights[2].rows() == 4);
    CHECK(asym.weights[2].cols() == 3);
    auto comb = init_model(small_spec(Architecture::gcn_combined, {4}), 5, 7, 3);
    REQUIRE(comb.weights.size() == 3);
    CHECK(comb.weights[0].rows() == 7);
    CHECK(comb.weights[0].cols() == 3);
    CHECK(comb.weights[1].rows() == 2 * 3 + 5);
    auto ffn = init_model(small_spec(Architecture::ffn, {4}), 5, 0, 3);
    CHECK(ffn.biases[0].size() == 4);
    CHECK(sym.biases[0].empty());
    for (std::size_t l = 0; l < asym.weights.size(); ++l) {
        const auto &w = asym.weights[l];
        const double range = std::sqrt(6.0 / static_cast<double>(w.rows() + w.cols()));
        for (double v : w.data()) {
            CHECK(std::abs(v) <= range);
        }
    }
}

TEST_CASE("analytic gradients match finite differences") {
    auto t = toy(9, 3);
    auto sym = normalize_adjacency(t.graph, AdjacencyMode::symmetric);
    auto asym = normalize_adjacency(t.graph, AdjacencyMode::asymmetric);
    auto zero_cols = DenseMatrix(9, 0);
    struct Case {
        const char *name;
        ModelSpec spec;
        ModelInputs inputs;
    };
    std::vector<Case> cases{
        {"ffn", small_spec(Architecture::ffn, {4, 3}), {nullptr, &t.features, nullptr}},
        {"gcn_sym", small_spec(Architecture::gcn_sym, {4}), {&sym, &t.features, nullptr}},
        {"gcn_sym_deep", small_spec(Architecture::gcn_sym, {4, 3}), {&sym, &t.features, nullptr}},
        {"gcn_asym", small_spec(Architecture::gcn_asym, {4}), {&asym, &t.features, nullptr}},
        {"gcn_asym_deep", small_spec(Architecture::gcn_asym, {4, 2}), {&asym, &t.features, nullptr}},
        {"gcn_asym_linear", small_spec(Architecture::gcn_asym, {}), {&asym, &t.features, nullptr}},
        {"combined", small_spec(Architecture::gcn_combined, {4}), {&asym, &t.features, &t.external}},
        {"combined_external_only", small_spec(Architecture::gcn_combined, {4}), {&asym, &zero_cols, &t.external}},
    };
    for (const auto &c : cases) {
        CAPTURE(c.name);
        auto model = perturbed_model(c.spec, c.inputs.primary->cols(),
                                     c.inputs.external ? c.inputs.external->cols() : 0, 3);
        CHECK(gradcheck::max_relative_error(model, c.inputs, t.labels, t.mask) < 1e-4);
    }
}

TEST_CASE("loss includes the halved L2 penalty") {
    auto t = toy(8, 5);
    auto spec = small_spec(Architecture::ffn, {});
    spec.l2 = {0.0};
    auto model = init_model(spec, 5, 0, 3);
    const ModelInputs in{nullptr, &t.features, nullptr};
    const double base = loss_and_gradient(model, in, t.labels, t.mask).loss;
    model.spec.l2 = {0.3};
    double sq = 0.0;
    for (double v : model.weights[0].data()) {
        sq += v * v;
    }
    CHECK(loss_and_gradient(model, in, t.labels, t.mask).loss == doctest::Approx(base + 0.15 * sq).epsilon(1e-12));
}

TEST_CASE("a separable problem is fit exactly") {
    const std::size_t n = 30;
    DenseMatrix x(n, 3);
    std::vector<ClassId> labels(n);
    SplitMask mask;
    for (NodeId i = 0; i < n; ++i) {
        labels[i] = static_cast<ClassId>(i % 3);
        x(i, labels[i]) = 1.0;
        mask.train.push_back(i);
    }
    auto spec = small_spec(Architecture::ffn, {8});
    spec.l2 = {0.0, 0.0};
    auto model = train_ffn(x, labels, 3, mask, spec);
    REQUIRE(model.loss_trace.size() == 200);
    CHECK(model.loss_trace.back() < model.loss_trace.front());
    auto p = predict(model, {nullptr, &x, nullptr});
    for (NodeId i = 0; i < n; ++i) {
        auto row = p.row(i);
        CHECK(std::max_element(row.begin(), row.end()) - row.begin() == labels[i]);
    }
}

TEST_CASE("zero input learns the training class frequencies") {
    const std::size_t n = 20;
    DenseMatrix x(n, 4);
    std::vector<ClassId> labels(n, 0);
    SplitMask mask;
    for (NodeId i = 0; i < n; ++i) {
        labels[i] = i < 15 ? 0 : 1;
        mask.train.push_back(i);
    }
    auto spec = small_spec(Architecture::ffn, {});
    spec.l2 = {0.0};
    spec.epochs = 2000;
    spec.learning_rate = 0.05;
    auto model = train_ffn(x, labels, 2, mask, spec);
    auto p = predict(model, {nullptr, &x, nullptr});
    for (NodeId i = 0; i < n; ++i) {
        CHECK(p(i, 0) == doctest::Approx(0.75).epsilon(1e-3));
    }
}

TEST_CASE("posteriors are distributions and training is deterministic") {
    auto t = toy(12, 8);
    auto asym = normalize_adjacency(t.graph, AdjacencyMode::asymmetric);
    auto spec = ModelSpec::gcn_defaults(Architecture::gcn_combined);
    spec.epochs = 30;
    auto a = train_combined(asym, t.features, t.external, t.labels, 3, t.mask, spec);
    auto b = train_combined(asym, t.features, t.external, t.labels, 3, t.mask, spec);
    CHECK(a.weights == b.weights);
    CHECK(a.loss_trace == b.loss_trace);
    auto p = predict(a, {&asym, &t.features, &t.external});
    for (std::size_t i = 0; i < p.rows(); ++i) {
        auto row = p.row(i);
        CHECK(std::accumulate(row.begin(), row.end(), 0.0) == doctest::Approx(1.0).epsilon(1e-12));
        for (double v : row) {
            CHECK(v >= 0.0);
        }
    }
    spec.seed = 99;
    auto c = train_combined(asym, t.features, t.external, t.labels, 3, t.mask, spec);
    CHECK(c.weights != a.weights);
}

TEST_CASE("test labels do not influence training") {
    auto t = toy(12, 2);
    auto sym = normalize_adjacency(t.graph, AdjacencyMode::symmetric);
    auto spec = ModelSpec::gcn_defaults(Architecture::gcn_sym);
    spec.epochs = 20;
    auto a = train_gcn(sym, t.features, t.labels, 3, t.mask, spec);
    auto relabeled = t.labels;
    for (NodeId i : t.mask.test) {
        relabeled[i] = static_cast<ClassId>((relabeled[i] + 1) % 3);
    }
    auto b = train_gcn(sym, t.features, relabeled, 3, t.mask, spec);
    CHECK(a.weights == b.weights);
}

TEST_CASE("posteriors are equivariant under node relabeling") {
    auto t = toy(10, 4);
    std::vector<NodeId> perm{3, 7, 0, 9, 1, 5, 2, 8, 6, 4};
    auto g2 = t.graph.permuted(perm);
    DenseMatrix x2(10, t.features.cols());
    std::vector<ClassId> labels2(10);
    SplitMask mask2;
    for (NodeId i = 0; i < 10; ++i) {
        std::copy(t.features.row(i).begin(), t.features.row(i).end(), x2.row(perm[i]).begin());
        labels2[perm[i]] = t.labels[i];
    }
    for (NodeId i : t.mask.train) {
        mask2.train.push_back(perm[i]);
    }
    auto spec = small_spec(Architecture::gcn_asym, {4});
    spec.epochs = 25;
    auto a1 = normalize_adjacency(t.graph, AdjacencyMode::asymmetric);
    auto a2 = normalize_adjacency(g2, AdjacencyMode::asymmetric);
    auto m1 = train_gcn(a1, t.features, t.labels, 3, t.mask, spec);
    auto m2 = train_gcn(a2, x2, labels2, 3, mask2, spec);
    auto p1 = predict(m1, {&a1, &t.features, nullptr});
    auto p2 = predict(m2, {&a2, &x2, nullptr});
    for (NodeId i = 0; i < 10; ++i) {
        for (std::size_t c = 0; c < 3; ++c) {
            CHECK(p1(i, c) == doctest::Approx(p2(perm[i], c)).epsilon(1e-8));
        }
    }
}

TEST_CASE("a non-finite input raises a numerical error") {
    auto t = toy(8, 1);
    t.features(0, 0) = std::nan("");
    auto spec = small_spec(Architecture::ffn, {});
    try {
        train_ffn(t.features, t.labels, 3, t.mask, spec);
        FAIL("expected NumericalError");
    } catch (const NumericalError &e) {
        CHECK(e.epoch() == 1);
    }
}

TEST_CASE("inputs are checked") {
    auto t = toy(8, 1);
    auto sym = normalize_adjacency(t.graph, AdjacencyMode::symmetric);
    auto asym_spec = small_spec(Architecture::gcn_asym, {4});
    CHECK_THROWS_AS(train_gcn(sym, t.features, t.labels, 3, t.mask, asym_spec), ShapeError);
    SplitMask empty;
    CHECK_THROWS_AS(train_gcn(sym, t.features, t.labels, 3, empty, small_spec(Architecture::gcn_sym, {4})),
                    std::invalid_argument);
    std::vector<ClassId> short_labels(3, 0);
    CHECK_THROWS_AS(train_gcn(sym, t.features, short_labels, 3, t.mask, small_spec(Architecture::gcn_sym, {4})),
                    ShapeError);
    auto model = init_model(small_spec(Architecture::gcn_sym, {4}), 5, 0, 3);
    auto wrong = random_matrix(8, 2, 1);
    CHECK_THROWS_AS(predict(model, {&sym, &wrong, nullptr}), ShapeError);
}

TEST_CASE("saved models load back unchanged") {
    auto t = toy(10, 6);
    auto asym = normalize_adjacency(t.graph, AdjacencyMode::asymmetric);
    auto spec = ModelSpec::gcn_defaults(Architecture::gcn_combined);
    spec.epochs = 15;
    auto model = train_combined(asym, t.features, t.external, t.labels, 3, t.mask, spec);
    auto dir = fixture::scratch("model_io");
    save_model(model, dir / "m.json");
    auto back = load_model(dir / "m.json");
    CHECK(back.weights == model.weights);
    CHECK(back.loss_trace == model.loss_trace);
    CHECK(back.spec.architecture == model.spec.architecture);
    CHECK(back.spec.dropout == model.spec.dropout);
    CHECK(predict(back, {&asym, &t.features, &t.external}) == predict(model, {&asym, &t.features, &t.external}));

    auto ffn = train_ffn(t.features, t.labels, 3, t.mask, small_spec(Architecture::ffn, {3}));
    save_model(ffn, dir / "f.json");
    CHECK(load_model(dir / "f.json").biases == ffn.biases);

    CHECK_THROWS_AS(load_model(dir / "missing.json"), DataError);
    CHECK_THROWS_AS(load_model(fixture::write_file(dir / "bad.json", "{not json")), DataError);
    CHECK_THROWS_AS(load_model(fixture::write_file(dir / "other.json", "{\"a\": 1}")), DataError);
}
