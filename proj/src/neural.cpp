#include "topogcn/neural.hpp"

#include <algorithm>
#include <cmath>

#include "topogcn/rng.hpp"

namespace topogcn {

// ---------------------------------------------------------------------------
// Adjacency normalization and the single-layer transform

namespace {

/// D^-1/2 (M + I) D^-1/2 where M is given as sorted neighbor lists per row.
template <class Neighbors>
SparseMatrix normalized_with_self_loops(std::size_t n, Neighbors &&neighbors) {
    SparseMatrix s;
    s.rows = n;
    s.cols = n;
    s.row_ptr.assign(n + 1, 0);
    std::vector<double> inv_sqrt(n);
    for (NodeId u = 0; u < n; ++u) {
        inv_sqrt[u] = 1.0 / std::sqrt(static_cast<double>(neighbors(u).size()) + 1.0);
    }
    for (NodeId u = 0; u < n; ++u) {
        auto nb = neighbors(u);
        bool self_done = false;
        auto emit = [&](NodeId v) {
            s.col_idx.push_back(v);
            s.values.push_back(inv_sqrt[u] * inv_sqrt[v]);
        };
        for (NodeId v : nb) {
            if (!self_done && v > u) {
                emit(u);
                self_done = true;
            }
            emit(v);
        }
        if (!self_done) {
            emit(u);
        }
        s.row_ptr[u + 1] = s.col_idx.size();
    }
    return s;
}

} // namespace

NormalizedAdjacency normalize_adjacency(const DirectedGraph &g, AdjacencyMode mode) {
    NormalizedAdjacency adj;
    adj.mode = mode;
    adj.n = g.n_nodes();
    if (mode == AdjacencyMode::symmetric) {
        // A + A^T has entry 2 where both directions exist.
        SparseMatrix s;
        const auto n = g.n_nodes();
        s.rows = n;
        s.cols = n;
        s.row_ptr.assign(n + 1, 0);
        std::vector<double> degree(n, 1.0);
        for (NodeId u = 0; u < n; ++u) {
            degree[u] += static_cast<double>(g.out_degree(u) + g.in_degree(u));
        }
        for (NodeId u = 0; u < n; ++u) {
            bool self_done = false;
            for (NodeId v : g.undirected(u)) {
                if (!self_done && v > u) {
                    s.col_idx.push_back(u);
                    s.values.push_back(1.0 / degree[u]);
                    self_done = true;
                }
                const double weight = (g.has_edge(u, v) ? 1.0 : 0.0) + (g.has_edge(v, u) ? 1.0 : 0.0);
                s.col_idx.push_back(v);
                s.values.push_back(weight / std::sqrt(degree[u] * degree[v]));
            }
            if (!self_done) {
                s.col_idx.push_back(u);
                s.values.push_back(1.0 / degree[u]);
            }
            s.row_ptr[u + 1] = s.col_idx.size();
        }
        adj.sym = std::move(s);
    } else {
        adj.fwd = normalized_with_self_loops(g.n_nodes(), [&](NodeId u) { return g.out(u); });
        adj.bwd = normalized_with_self_loops(g.n_nodes(), [&](NodeId u) { return g.in(u); });
    }
    return adj;
}

NormalizedAdjacency identity_adjacency(std::size_t n) {
    NormalizedAdjacency adj;
    adj.mode = AdjacencyMode::symmetric;
    adj.n = n;
    adj.sym.rows = n;
    adj.sym.cols = n;
    adj.sym.row_ptr.resize(n + 1);
    for (std::size_t i = 0; i < n; ++i) {
        adj.sym.row_ptr[i + 1] = i + 1;
        adj.sym.col_idx.push_back(static_cast<std::uint32_t>(i));
        adj.sym.values.push_back(1.0);
    }
    return adj;
}

namespace {

void apply(Activation a, DenseMatrix &m) {
    if (a == Activation::relu) {
        for (double &v : m.data()) {
            v = v > 0.0 ? v : 0.0;
        }
    }
}

} // namespace

DenseMatrix gcn_layer(const NormalizedAdjacency &adj, const DenseMatrix &x, const DenseMatrix &w,
                      Activation activation) {
    if (x.rows() != adj.n) {
        throw ShapeError("gcn_layer: input has " + std::to_string(x.rows()) + " rows for " + std::to_string(adj.n) +
                         " nodes");
    }
    const DenseMatrix xw = matmul(x, w);
    DenseMatrix out = adj.mode == AdjacencyMode::symmetric ? spmm(adj.sym, xw)
                                                          : vconcat(spmm(adj.fwd, xw), spmm(adj.bwd, xw));
    apply(activation, out);
    return out;
}

// ---------------------------------------------------------------------------
// Model specs

std::string to_string(Architecture a) {
    switch (a) {
    case Architecture::ffn:
        return "ffn";
    case Architecture::gcn_sym:
        return "gcn_sym";
    case Architecture::gcn_asym:
        return "gcn_asym";
    case Architecture::gcn_combined:
        return "gcn_combined";
    }
    return "?";
}

Architecture architecture_from_string(const std::string &s) {
    for (auto a : {Architecture::ffn, Architecture::gcn_sym, Architecture::gcn_asym, Architecture::gcn_combined}) {
        if (to_string(a) == s) {
            return a;
        }
    }
    throw std::invalid_argument("unknown architecture `" + s + "`");
}

std::size_t ModelSpec::n_layers() const {
    return hidden.size() + 1 + (architecture == Architecture::gcn_combined ? 1 : 0);
}

void ModelSpec::validate() const {
    for (auto w : hidden) {
        if (w < 1) {
            throw std::invalid_argument("ModelSpec: hidden widths must be at least 1");
        }
    }
    if (architecture == Architecture::gcn_combined && external_width < 1) {
        throw std::invalid_argument("ModelSpec: external layer width must be at least 1");
    }
    if (dropout.size() != n_layers() || l2.size() != n_layers()) {
        throw std::invalid_argument("ModelSpec: expected " + std::to_string(n_layers()) +
                                    " dropout and L2 entries, got " + std::to_string(dropout.size()) + " and " +
                                    std::to_string(l2.size()));
    }
    for (double p : dropout) {
        if (!(p >= 0.0 && p < 1.0)) {
            throw std::invalid_argument("ModelSpec: dropout must lie in [0, 1)");
        }
    }
    for (double l : l2) {
        if (!(l >= 0.0)) {
            throw std::invalid_argument("ModelSpec: L2 weights must be nonnegative");
        }
    }
    if (!(learning_rate > 0.0) || epochs < 1) {
        throw std::invalid_argument("ModelSpec: need a positive learning rate and at least one epoch");
    }
}

ModelSpec ModelSpec::ffn_defaults() {
    ModelSpec s;
    s.architecture = Architecture::ffn;
    s.hidden = {300, 100};
    s.dropout.assign(3, 0.1);
    s.l2.assign(3, 0.2);
    return s;
}

ModelSpec ModelSpec::gcn_defaults(Architecture architecture) {
    ModelSpec s;
    s.architecture = architecture;
    s.hidden = {16};
    s.external_width = 16;
    s.dropout.assign(s.n_layers(), 0.4);
    s.l2.assign(s.n_layers(), 0.001);
    return s;
}

ModelSpec ModelSpec::kipf_defaults() {
    ModelSpec s;
    s.architecture = Architecture::gcn_sym;
    s.hidden = {16};
    s.dropout = {0.5, 0.5};
    s.l2 = {5e-4, 0.0};
    return s;
}

// ---------------------------------------------------------------------------
// Forward / backward

namespace {

enum class Propagation { none, sym, asym_fold, asym_sum };

struct LayerPlan {
    LayerShape shape;
    Propagation propagation = Propagation::none;
    Activation activation = Activation::identity;
};

struct Plan {
    std::vector<LayerPlan> layers;
    /// Number of leading layers that form the external-feature branch.
    std::size_t branch_layers = 0;
};

Plan make_plan(const ModelSpec &spec, std::size_t input_width, std::size_t external_width, std::size_t n_classes) {
    Plan plan;
    std::size_t width = input_width;
    Propagation hidden_prop = Propagation::sym;
    Propagation last_prop = Propagation::sym;
    bool bias = false;
    switch (spec.architecture) {
    case Architecture::ffn:
        hidden_prop = last_prop = Propagation::none;
        bias = true;
        break;
    case Architecture::gcn_sym:
        break;
    case Architecture::gcn_asym:
    case Architecture::gcn_combined:
        hidden_prop = Propagation::asym_fold;
        last_prop = Propagation::asym_sum;
        break;
    }
    if (spec.architecture == Architecture::gcn_combined) {
        plan.layers.push_back({{external_width, spec.external_width, false}, Propagation::asym_fold, Activation::relu});
        plan.branch_layers = 1;
        width = 2 * spec.external_width + input_width;
    }
    for (auto h : spec.hidden) {
        plan.layers.push_back({{width, h, bias}, hidden_prop, Activation::relu});
        width = hidden_prop == Propagation::asym_fold ? 2 * h : h;
    }
    plan.layers.push_back({{width, n_classes, bias}, last_prop, Activation::identity});
    return plan;
}

struct LayerCache {
    DenseMatrix input;          // after dropout
    std::vector<std::uint8_t> kept;
    double keep_scale = 1.0;
    bool dropped = false;
    DenseMatrix pre_activation; // n x o or 2n x o
};

class Network {
  public:
    Network(const TrainedModel &model, const ModelInputs &inputs)
        : model_(model), inputs_(inputs),
          plan_(make_plan(model.spec, model.input_width, model.external_input_width, model.n_classes)) {
        check_inputs();
    }

    /// Logits n x C. With `rng` set, dropout is active.
    DenseMatrix forward(Rng *rng) {
        caches_.assign(plan_.layers.size(), {});
        DenseMatrix h;
        if (plan_.branch_layers > 0) {
            DenseMatrix b = *inputs_.external;
            for (std::size_t l = 0; l < plan_.branch_layers; ++l) {
                b = layer_forward(l, std::move(b), rng);
            }
            branch_width_ = b.cols();
            h = inputs_.primary->cols() == 0 ? std::move(b) : hconcat(b, *inputs_.primary);
        } else {
            h = *inputs_.primary;
        }
        for (std::size_t l = plan_.branch_layers; l < plan_.layers.size(); ++l) {
            h = layer_forward(l, std::move(h), rng);
        }
        return h;
    }

    /// Gradients for d(loss)/d(logits) = `grad`; data term only (no L2).
    void backward(DenseMatrix grad, std::vector<DenseMatrix> &dw, std::vector<std::vector<double>> &db) {
        dw.assign(plan_.layers.size(), {});
        db.assign(plan_.layers.size(), {});
        for (std::size_t l = plan_.layers.size(); l-- > plan_.branch_layers;) {
            grad = layer_backward(l, std::move(grad), dw[l], db[l], l > 0);
        }
        if (plan_.branch_layers > 0) {
            // Split the concatenated gradient and keep the branch part.
            DenseMatrix gb(grad.rows(), branch_width_);
            for (std::size_t r = 0; r < grad.rows(); ++r) {
                auto src = grad.row(r);
                std::copy(src.begin(), src.begin() + static_cast<std::ptrdiff_t>(branch_width_), gb.row(r).begin());
            }
            grad = std::move(gb);
            for (std::size_t l = plan_.branch_layers; l-- > 0;) {
                grad = layer_backward(l, std::move(grad), dw[l], db[l], l > 0);
            }
        }
    }

  private:
    void check_inputs() const {
        const auto &spec = model_.spec;
        if (inputs_.primary == nullptr) {
            throw ShapeError("model input matrix missing");
        }
        const auto n = inputs_.primary->rows();
        if (inputs_.primary->cols() != model_.input_width) {
            throw ShapeError("model expects " + std::to_string(model_.input_width) + " input columns, got " +
                             std::to_string(inputs_.primary->cols()));
        }
        if (spec.architecture != Architecture::ffn) {
            if (inputs_.adjacency == nullptr || inputs_.adjacency->n != n) {
                throw ShapeError("adjacency missing or sized for a different node count");
            }
            const bool want_asym = spec.architecture == Architecture::gcn_asym ||
                                   spec.architecture == Architecture::gcn_combined;
            if (want_asym != (inputs_.adjacency->mode == AdjacencyMode::asymmetric)) {
                throw ShapeError(to_string(spec.architecture) + " needs a " +
                                 (want_asym ? "asymmetric" : "symmetric") + " adjacency");
            }
        }
        if (spec.architecture == Architecture::gcn_combined) {
            if (inputs_.external == nullptr || inputs_.external->rows() != n ||
                inputs_.external->cols() != model_.external_input_width) {
                throw ShapeError("combined model needs an external matrix of " + std::to_string(n) + " x " +
                                 std::to_string(model_.external_input_width));
            }
        }
    }

    DenseMatrix propagate(Propagation p, const DenseMatrix &z) const {
        const auto &adj = *inputs_.adjacency;
        switch (p) {
        case Propagation::none:
            return z;
        case Propagation::sym:
            return spmm(adj.sym, z);
        case Propagation::asym_fold:
            return vconcat(spmm(adj.fwd, z), spmm(adj.bwd, z));
        case Propagation::asym_sum: {
            DenseMatrix a = spmm(adj.fwd, z);
            const DenseMatrix b = spmm(adj.bwd, z);
            for (std::size_t i = 0; i < a.size(); ++i) {
                a.data()[i] += b.data()[i];
            }
            return a;
        }
        }
        return z;
    }

    DenseMatrix propagate_back(Propagation p, const DenseMatrix &g) const {
        const auto &adj = *inputs_.adjacency;
        switch (p) {
        case Propagation::none:
            return g;
        case Propagation::sym:
            return spmm_t(adj.sym, g);
        case Propagation::asym_fold: {
            const std::size_t n = g.rows() / 2;
            DenseMatrix top(n, g.cols());
            DenseMatrix bottom(n, g.cols());
            std::copy(g.data().begin(), g.data().begin() + static_cast<std::ptrdiff_t>(n * g.cols()),
                      top.data().begin());
            std::copy(g.data().begin() + static_cast<std::ptrdiff_t>(n * g.cols()), g.data().end(),
                      bottom.data().begin());
            DenseMatrix a = spmm_t(adj.fwd, top);
            const DenseMatrix b = spmm_t(adj.bwd, bottom);
            for (std::size_t i = 0; i < a.size(); ++i) {
                a.data()[i] += b.data()[i];
            }
            return a;
        }
        case Propagation::asym_sum: {
            DenseMatrix a = spmm_t(adj.fwd, g);
            const DenseMatrix b = spmm_t(adj.bwd, g);
            for (std::size_t i = 0; i < a.size(); ++i) {
                a.data()[i] += b.data()[i];
            }
            return a;
        }
        }
        return g;
    }

    DenseMatrix layer_forward(std::size_t l, DenseMatrix h, Rng *rng) {
        const auto &plan = plan_.layers[l];
        auto &cache = caches_[l];
        const double p = model_.spec.dropout[l];
        if (rng != nullptr && p > 0.0) {
            // Only nonzero entries draw; a zero stays zero whatever the mask.
            cache.dropped = true;
            cache.keep_scale = 1.0 / (1.0 - p);
            cache.kept.assign(h.size(), 1);
            for (std::size_t i = 0; i < h.size(); ++i) {
                double &v = h.data()[i];
                if (v == 0.0) {
                    continue;
                }
                if (uniform01(*rng) < p) {
                    cache.kept[i] = 0;
                    v = 0.0;
                } else {
                    v *= cache.keep_scale;
                }
            }
        }
        DenseMatrix z = matmul(h, model_.weights[l]);
        if (plan.shape.bias) {
            const auto &b = model_.biases[l];
            for (std::size_t r = 0; r < z.rows(); ++r) {
                auto row = z.row(r);
                for (std::size_t c = 0; c < row.size(); ++c) {
                    row[c] += b[c];
                }
            }
        }
        cache.input = std::move(h);
        DenseMatrix pre = propagate(plan.propagation, z);
        DenseMatrix out = pre;
        apply(plan.activation, out);
        cache.pre_activation = std::move(pre);
        if (plan.propagation == Propagation::asym_fold) {
            out = fold_stacked(out);
        }
        return out;
    }

    DenseMatrix layer_backward(std::size_t l, DenseMatrix grad, DenseMatrix &dw, std::vector<double> &db,
                               bool need_input_grad) {
        const auto &plan = plan_.layers[l];
        auto &cache = caches_[l];
        if (plan.propagation == Propagation::asym_fold) {
            grad = unfold_stacked(grad);
        }
        if (plan.activation == Activation::relu) {
            for (std::size_t i = 0; i < grad.size(); ++i) {
                if (cache.pre_activation.data()[i] <= 0.0) {
                    grad.data()[i] = 0.0;
                }
            }
        }
        const DenseMatrix dz = propagate_back(plan.propagation, grad);
        dw = matmul_tn(cache.input, dz);
        if (plan.shape.bias) {
            db.assign(dz.cols(), 0.0);
            for (std::size_t r = 0; r < dz.rows(); ++r) {
                auto row = dz.row(r);
                for (std::size_t c = 0; c < row.size(); ++c) {
                    db[c] += row[c];
                }
            }
        }
        if (!need_input_grad) {
            return {};
        }
        DenseMatrix dh = matmul_nt(dz, model_.weights[l]);
        if (cache.dropped) {
            for (std::size_t i = 0; i < dh.size(); ++i) {
                dh.data()[i] = cache.kept[i] ? dh.data()[i] * cache.keep_scale : 0.0;
            }
        }
        return dh;
    }

    const TrainedModel &model_;
    ModelInputs inputs_;
    Plan plan_;
    std::vector<LayerCache> caches_;
    std::size_t branch_width_ = 0;
};

/// Mean cross-entropy over training rows; writes d(loss)/d(logits) into `grad`.
double softmax_cross_entropy(const DenseMatrix &logits, std::span<const ClassId> labels, const SplitMask &mask,
                             DenseMatrix &grad) {
    grad = DenseMatrix(logits.rows(), logits.cols());
    const double scale = 1.0 / static_cast<double>(mask.train.size());
    double loss = 0.0;
    for (NodeId i : mask.train) {
        auto z = logits.row(i);
        const double zmax = *std::max_element(z.begin(), z.end());
        double total = 0.0;
        for (double v : z) {
            total += std::exp(v - zmax);
        }
        const double log_total = std::log(total) + zmax;
        loss -= (z[labels[i]] - log_total) * scale;
        auto g = grad.row(i);
        for (std::size_t c = 0; c < z.size(); ++c) {
            g[c] = std::exp(z[c] - log_total) * scale;
        }
        g[labels[i]] -= scale;
    }
    return loss;
}

double l2_penalty(const TrainedModel &model) {
    double total = 0.0;
    for (std::size_t l = 0; l < model.weights.size(); ++l) {
        double sq = 0.0;
        for (double v : model.weights[l].data()) {
            sq += v * v;
        }
        total += 0.5 * model.spec.l2[l] * sq;
    }
    return total;
}

void check_labels(std::span<const ClassId> labels, std::size_t n_nodes, std::size_t n_classes,
                  const SplitMask &mask) {
    if (labels.size() != n_nodes) {
        throw ShapeError("labels: " + std::to_string(labels.size()) + " entries for " + std::to_string(n_nodes) +
                         " nodes");
    }
    if (mask.train.empty()) {
        throw std::invalid_argument("training mask is empty");
    }
    for (NodeId i : mask.train) {
        if (i >= n_nodes || labels[i] >= n_classes) {
            throw std::invalid_argument("training node or label out of range");
        }
    }
}

} // namespace

TrainedModel init_model(const ModelSpec &spec, std::size_t input_width, std::size_t external_input_width,
                        std::size_t n_classes) {
    spec.validate();
    TrainedModel model;
    model.spec = spec;
    model.n_classes = n_classes;
    model.input_width = input_width;
    model.external_input_width = spec.architecture == Architecture::gcn_combined ? external_input_width : 0;
    const auto plan = make_plan(spec, input_width, model.external_input_width, n_classes);
    Rng rng(mix_seed(spec.seed, 0));
    for (const auto &layer : plan.layers) {
        model.shapes.push_back(layer.shape);
        DenseMatrix w(layer.shape.in, layer.shape.out);
        const double range = std::sqrt(6.0 / static_cast<double>(layer.shape.in + layer.shape.out));
        for (double &v : w.data()) {
            v = (2.0 * uniform01(rng) - 1.0) * range;
        }
        model.weights.push_back(std::move(w));
        model.biases.emplace_back(layer.shape.bias ? layer.shape.out : 0, 0.0);
    }
    return model;
}

TrainedModel train(const ModelSpec &spec, const ModelInputs &inputs, std::span<const ClassId> labels,
                   std::size_t n_classes, const SplitMask &mask) {
    if (inputs.primary == nullptr) {
        throw ShapeError("train: input matrix missing");
    }
    const std::size_t external_width = inputs.external != nullptr ? inputs.external->cols() : 0;
    TrainedModel model = init_model(spec, inputs.primary->cols(), external_width, n_classes);
    check_labels(labels, inputs.primary->rows(), n_classes, mask);
    Network net(model, inputs);

    constexpr double beta1 = 0.9;
    constexpr double beta2 = 0.999;
    constexpr double eps = 1e-8;
    std::vector<std::vector<double>> m_w(model.weights.size());
    std::vector<std::vector<double>> v_w(model.weights.size());
    std::vector<std::vector<double>> m_b(model.weights.size());
    std::vector<std::vector<double>> v_b(model.weights.size());
    for (std::size_t l = 0; l < model.weights.size(); ++l) {
        m_w[l].assign(model.weights[l].size(), 0.0);
        v_w[l].assign(model.weights[l].size(), 0.0);
        m_b[l].assign(model.biases[l].size(), 0.0);
        v_b[l].assign(model.biases[l].size(), 0.0);
    }

    auto adam = [&](std::vector<double> &param, const std::vector<double> &grad, std::vector<double> &m,
                    std::vector<double> &v, double step) {
        for (std::size_t i = 0; i < param.size(); ++i) {
            m[i] = beta1 * m[i] + (1.0 - beta1) * grad[i];
            v[i] = beta2 * v[i] + (1.0 - beta2) * grad[i] * grad[i];
            param[i] -= step * m[i] / (std::sqrt(v[i]) + eps);
        }
    };

    Rng dropout_rng(mix_seed(spec.seed, 1));
    std::vector<DenseMatrix> dw;
    std::vector<std::vector<double>> db;
    DenseMatrix dlogits;
    double beta1_t = 1.0;
    double beta2_t = 1.0;
    for (int epoch = 0; epoch < spec.epochs; ++epoch) {
        const DenseMatrix logits = net.forward(&dropout_rng);
        const double loss = softmax_cross_entropy(logits, labels, mask, dlogits) + l2_penalty(model);
        if (!std::isfinite(loss)) {
            throw NumericalError("non-finite training loss at epoch " + std::to_string(epoch + 1), epoch + 1);
        }
        model.loss_trace.push_back(loss);
        net.backward(std::move(dlogits), dw, db);

        beta1_t *= beta1;
        beta2_t *= beta2;
        const double step = spec.learning_rate * std::sqrt(1.0 - beta2_t) / (1.0 - beta1_t);
        for (std::size_t l = 0; l < model.weights.size(); ++l) {
            auto &grad = dw[l].data();
            const double lambda = spec.l2[l];
            const auto &w = model.weights[l].data();
            for (std::size_t i = 0; i < grad.size(); ++i) {
                grad[i] += lambda * w[i];
            }
            adam(model.weights[l].data(), grad, m_w[l], v_w[l], step);
            if (!db[l].empty()) {
                adam(model.biases[l], db[l], m_b[l], v_b[l], step);
            }
        }
    }
    for (const auto &w : model.weights) {
        if (!w.all_finite()) {
            throw NumericalError("non-finite weights after training", spec.epochs);
        }
    }
    return model;
}

TrainedModel train_ffn(const DenseMatrix &features, std::span<const ClassId> labels, std::size_t n_classes,
                       const SplitMask &mask, const ModelSpec &spec) {
    if (spec.architecture != Architecture::ffn) {
        throw std::invalid_argument("train_ffn: spec architecture is " + to_string(spec.architecture));
    }
    return train(spec, ModelInputs{nullptr, &features, nullptr}, labels, n_classes, mask);
}

TrainedModel train_gcn(const NormalizedAdjacency &adj, const DenseMatrix &input, std::span<const ClassId> labels,
                       std::size_t n_classes, const SplitMask &mask, const ModelSpec &spec) {
    if (spec.architecture != Architecture::gcn_sym && spec.architecture != Architecture::gcn_asym) {
        throw std::invalid_argument("train_gcn: spec architecture is " + to_string(spec.architecture));
    }
    return train(spec, ModelInputs{&adj, &input, nullptr}, labels, n_classes, mask);
}

TrainedModel train_combined(const NormalizedAdjacency &adj, const DenseMatrix &topo_input,
                            const DenseMatrix &external, std::span<const ClassId> labels, std::size_t n_classes,
                            const SplitMask &mask, const ModelSpec &spec) {
    if (spec.architecture != Architecture::gcn_combined) {
        throw std::invalid_argument("train_combined: spec architecture is " + to_string(spec.architecture));
    }
    if (topo_input.rows() != external.rows()) {
        throw ShapeError("train_combined: topology and external inputs disagree on row count");
    }
    return train(spec, ModelInputs{&adj, &topo_input, &external}, labels, n_classes, mask);
}

DenseMatrix predict_logits(const TrainedModel &model, const ModelInputs &inputs) {
    Network net(model, inputs);
    return net.forward(nullptr);
}

DenseMatrix predict(const TrainedModel &model, const ModelInputs &inputs) {
    DenseMatrix p = predict_logits(model, inputs);
    for (std::size_t r = 0; r < p.rows(); ++r) {
        auto row = p.row(r);
        const double zmax = *std::max_element(row.begin(), row.end());
        double total = 0.0;
        for (double &v : row) {
            v = std::exp(v - zmax);
            total += v;
        }
        for (double &v : row) {
            v /= total;
        }
    }
    return p;
}

LossGradient loss_and_gradient(const TrainedModel &model, const ModelInputs &inputs,
                               std::span<const ClassId> labels, const SplitMask &mask) {
    check_labels(labels, inputs.primary->rows(), model.n_classes, mask);
    Network net(model, inputs);
    const DenseMatrix logits = net.forward(nullptr);
    DenseMatrix dlogits;
    LossGradient out;
    out.loss = softmax_cross_entropy(logits, labels, mask, dlogits) + l2_penalty(model);
    net.backward(std::move(dlogits), out.weights, out.biases);
    for (std::size_t l = 0; l < model.weights.size(); ++l) {
        auto &g = out.weights[l].data();
        const auto &w = model.weights[l].data();
        for (std::size_t i = 0; i < g.size(); ++i) {
            g[i] += model.spec.l2[l] * w[i];
        }
    }
    return out;
}

} // namespace topogcn
