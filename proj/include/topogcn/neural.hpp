#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "topogcn/dataset.hpp"
#include "topogcn/matrix.hpp"
#include "topogcn/split.hpp"

namespace topogcn {

/// Training produced a non-finite loss or parameter.
class NumericalError : public std::runtime_error {
  public:
    NumericalError(const std::string &what, int epoch) : std::runtime_error(what), epoch_(epoch) {}
    int epoch() const { return epoch_; }

  private:
    int epoch_;
};

enum class AdjacencyMode { symmetric, asymmetric };

/// Symmetric mode: S = D^-1/2 (A + A^T + I) D^-1/2 with D the row sums of
/// A + A^T + I. Asymmetric mode: fwd = D_f^-1/2 (A + I) D_f^-1/2 with D_f the
/// row sums of A + I, and bwd built the same way from A^T. Conceptually the
/// asymmetric operator is the 2n x n stack [fwd; bwd].
struct NormalizedAdjacency {
    AdjacencyMode mode = AdjacencyMode::symmetric;
    std::size_t n = 0;
    SparseMatrix sym;
    SparseMatrix fwd;
    SparseMatrix bwd;
};

NormalizedAdjacency normalize_adjacency(const DirectedGraph &g, AdjacencyMode mode);
/// The identity operator in symmetric mode, turning a GCN into a plain MLP.
NormalizedAdjacency identity_adjacency(std::size_t n);

enum class Activation { identity, relu };

/// sigma(S X W) in symmetric mode (n x o); [sigma(fwd X W); sigma(bwd X W)]
/// in asymmetric mode (2n x o).
DenseMatrix gcn_layer(const NormalizedAdjacency &adj, const DenseMatrix &x, const DenseMatrix &w,
                      Activation activation);

enum class Architecture { ffn, gcn_sym, gcn_asym, gcn_combined };

std::string to_string(Architecture a);
Architecture architecture_from_string(const std::string &s);

/// Hyperparameters. Layer lists are ordered input to output; for
/// gcn_combined the external-feature layer comes first.
struct ModelSpec {
    Architecture architecture = Architecture::gcn_sym;
    /// Hidden widths of the main stack (the output width is the class count).
    std::vector<std::size_t> hidden;
    /// Width L1 of the external-feature layer (gcn_combined only).
    std::size_t external_width = 16;
    /// Dropout rate applied to each layer's input during training.
    std::vector<double> dropout;
    /// L2 coefficient per layer; the penalty is l2/2 * ||W||^2.
    std::vector<double> l2;
    double learning_rate = 0.01;
    int epochs = 200;
    std::uint64_t seed = 0;

    /// Number of weight layers the spec describes.
    std::size_t n_layers() const;
    /// Throws std::invalid_argument when widths, rates or list lengths are inconsistent.
    void validate() const;

    /// 300/100 ReLU MLP, dropout 0.1, L2 0.2.
    static ModelSpec ffn_defaults();
    /// Two layers, hidden 16, dropout 0.4, L2 0.001.
    static ModelSpec gcn_defaults(Architecture architecture);
    /// Two symmetric layers, hidden 16, dropout 0.5, L2 5e-4 on the first layer only.
    static ModelSpec kipf_defaults();
};

/// Shapes of one weight layer as built from a spec.
struct LayerShape {
    std::size_t in = 0;
    std::size_t out = 0;
    bool bias = false;
};

struct TrainedModel {
    ModelSpec spec;
    std::size_t n_classes = 0;
    std::size_t input_width = 0;
    std::size_t external_input_width = 0;
    std::vector<LayerShape> shapes;
    std::vector<DenseMatrix> weights;
    std::vector<std::vector<double>> biases;
    std::vector<double> loss_trace;
};

/// The matrices a model reads. `adjacency` is ignored by the FFN; `external`
/// is only read by the combined model.
struct ModelInputs {
    const NormalizedAdjacency *adjacency = nullptr;
    const DenseMatrix *primary = nullptr;
    const DenseMatrix *external = nullptr;
};

/// Fresh model with initialized weights (uniform, scaled by
/// sqrt(6 / (fan_in + fan_out))).
TrainedModel init_model(const ModelSpec &spec, std::size_t input_width, std::size_t external_input_width,
                        std::size_t n_classes);

/// Full-batch Adam on the masked softmax cross-entropy plus L2. Deterministic
/// for a fixed spec.seed. Throws NumericalError on a non-finite loss.
TrainedModel train(const ModelSpec &spec, const ModelInputs &inputs, std::span<const ClassId> labels,
                   std::size_t n_classes, const SplitMask &mask);

TrainedModel train_ffn(const DenseMatrix &features, std::span<const ClassId> labels, std::size_t n_classes,
                       const SplitMask &mask, const ModelSpec &spec);
TrainedModel train_gcn(const NormalizedAdjacency &adj, const DenseMatrix &input, std::span<const ClassId> labels,
                       std::size_t n_classes, const SplitMask &mask, const ModelSpec &spec);
TrainedModel train_combined(const NormalizedAdjacency &adj, const DenseMatrix &topo_input,
                            const DenseMatrix &external, std::span<const ClassId> labels, std::size_t n_classes,
                            const SplitMask &mask, const ModelSpec &spec);

/// Class posteriors (n x C softmax rows), dropout disabled.
DenseMatrix predict(const TrainedModel &model, const ModelInputs &inputs);
/// Raw output scores before the softmax.
DenseMatrix predict_logits(const TrainedModel &model, const ModelInputs &inputs);

struct LossGradient {
    double loss = 0.0;
    std::vector<DenseMatrix> weights;
    std::vector<std::vector<double>> biases;
};

/// Training objective and its exact gradient at the model's current
/// parameters, with dropout disabled.
LossGradient loss_and_gradient(const TrainedModel &model, const ModelInputs &inputs,
                               std::span<const ClassId> labels, const SplitMask &mask);

/// JSON container: spec, layer shapes, row-major weights, loss trace.
void save_model(const TrainedModel &model, const std::filesystem::path &path);
TrainedModel load_model(const std::filesystem::path &path);

} // namespace topogcn
