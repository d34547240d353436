#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "shotrf/error.hpp"
#include "shotrf/features.hpp"

namespace shotrf {

inline constexpr double kRfMin = 0.0;
inline constexpr double kRfMax = 51.0;

/// y = weight * x + bias, weight is out x in.
struct Dense {
  Eigen::MatrixXd weight;
  Eigen::VectorXd bias;
};

struct ResidualBlock {
  Dense first;
  Dense second;
};

/// Every tensor the optimizer updates. Gradients and Adam moments share
/// this layout.
struct Weights {
  Eigen::VectorXd bn_gamma;
  Eigen::VectorXd bn_beta;
  Dense attention_in;   // D -> A, followed by ReLU
  Dense attention_out;  // A -> D, followed by sigmoid
  Dense projection;     // D -> H
  std::vector<ResidualBlock> blocks;
  Dense head;  // H -> 1

  /// Visits every tensor as a flat span, in a fixed order.
  template <class F>
  void for_each(F&& f) {
    visit_tensors(*this, f);
  }
  template <class F>
  void for_each(F&& f) const {
    visit_tensors(*this, f);
  }

  Weights zeros_like() const;
  std::size_t parameter_count() const;

 private:
  template <class Self, class F>
  static void visit_tensors(Self& w, F& f) {
    auto visit = [&](auto& t) { f(std::span(t.data(), static_cast<std::size_t>(t.size()))); };
    auto dense = [&](auto& d) {
      visit(d.weight);
      visit(d.bias);
    };
    visit(w.bn_gamma);
    visit(w.bn_beta);
    dense(w.attention_in);
    dense(w.attention_out);
    dense(w.projection);
    for (auto& b : w.blocks) {
      dense(b.first);
      dense(b.second);
    }
    dense(w.head);
  }
};

struct ModelShape {
  std::size_t input_dim = 0;
  std::size_t attention_dim = 0;
  std::size_t width = 256;
  std::size_t blocks = 3;

  /// Bottleneck of D/4 (at least 1).
  static ModelShape for_input(std::size_t input_dim, std::size_t width, std::size_t blocks);
  friend bool operator==(const ModelShape&, const ModelShape&) = default;
};

/// One RF prediction network: batch norm, sigmoid attention gate, ReLU
/// projection, residual trunk, scalar head.
struct ModelParams {
  std::string schema_version;
  Weights weights;
  Eigen::VectorXd running_mean;
  Eigen::VectorXd running_var;
  double bn_eps = 1e-5;
  // When set, this raw input is added to the head output, so the network
  // predicts a correction to it. Pass-2 models use the first-pass RF.
  std::optional<std::size_t> offset_feature;

  static ModelParams init(const ModelShape& shape, std::string schema_version, std::uint64_t seed);
  ModelShape shape() const;
  /// Throws ModelFormatError on inconsistent shapes, non-finite tensors, or running_var <= 0.
  void validate() const;
};

enum class Mode { Train, Infer };

/// Intermediate activations of one forward pass; columns are examples.
struct ForwardTrace {
  Eigen::MatrixXd input;
  Eigen::VectorXd batch_mean;  // statistics used for normalization
  Eigen::VectorXd batch_var;
  Eigen::MatrixXd normalized;  // before gamma/beta
  Eigen::MatrixXd bn_out;
  Eigen::MatrixXd attention_pre;
  Eigen::MatrixXd attention_hidden;
  Eigen::MatrixXd mask;
  Eigen::MatrixXd gated;
  Eigen::MatrixXd projection_pre;
  Eigen::MatrixXd projection_out;
  struct Block {
    Eigen::MatrixXd first_pre;
    Eigen::MatrixXd first_out;
    Eigen::MatrixXd sum;
    Eigen::MatrixXd out;
  };
  std::vector<Block> blocks;
  Eigen::RowVectorXd output;  // unclamped
};

/// Train mode normalizes with batch statistics, infer mode with running ones.
ForwardTrace trace_forward(const ModelParams& m, const Eigen::MatrixXd& batch, Mode mode);

/// Predicted RF per column. Infer mode clamps to [0, 51] and evaluates each
/// column independently, so results do not depend on batch composition.
Eigen::VectorXd forward(const ModelParams& m, const Eigen::MatrixXd& batch, Mode mode);

/// Single-example inference.
double predict(const ModelParams& m, std::span<const double> x);
/// Same, after checking the vector's schema against the model's.
double predict(const ModelParams& m, const FeatureVector& x);

/// Mean squared error.
double mse_loss(std::span<const double> predictions, std::span<const double> labels);

struct BatchGradients {
  Weights grads;
  double loss = 0;
  ForwardTrace trace;
};

/// Exact reverse-mode gradients of the train-mode MSE loss.
BatchGradients gradients(const ModelParams& m, const Eigen::MatrixXd& batch, std::span<const double> labels);

struct TrainConfig {
  double learning_rate = 1e-4;
  std::size_t batch_size = 32;
  std::size_t epochs = 100;
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  double adam_eps = 1e-8;
  std::uint64_t seed = 0;
  double bn_momentum = 0.1;
  double bn_eps = 1e-5;
  std::size_t width = 256;
  std::size_t blocks = 3;
  double weight_decay = 0.0;  // L2 on dense weight matrices, added to their gradients
  std::optional<std::size_t> offset_feature;
};

struct LabeledExample {
  FeatureVector features;
  double rf_label = 0;
};

struct TrainResult {
  ModelParams model;
  std::vector<double> loss_trace;  // mean training loss per epoch
};

class TrainingError : public Error {
 public:
  TrainingError(const std::string& what, std::size_t epoch) : Error(what), epoch_(epoch) {}
  std::size_t epoch() const { return epoch_; }

 private:
  std::size_t epoch_;
};

/// Adam over seeded-shuffle mini-batches. Throws TrainingError when the loss
/// stops being finite.
TrainResult train(std::span<const LabeledExample> dataset, const TrainConfig& cfg);

class ModelFormatError : public Error {
 public:
  using Error::Error;
};

class IncompatibleModel : public Error {
 public:
  using Error::Error;
};

/// Binary layout (all integers and floats little-endian):
///   "SHOTRFNN" | u32 version=1 | u32 len | schema_version bytes |
///   u64 input_dim | u64 attention_dim | u64 width | u64 blocks | f64 bn_eps |
///   i64 offset_feature (-1 for none) |
///   f64 arrays: bn_gamma, bn_beta, running_mean, running_var,
///     attention_in (W row-major, b), attention_out (W, b), projection (W, b),
///     per block: first (W, b), second (W, b), head (W, b)
void save_model(const ModelParams& m, std::ostream& out);
void save_model_file(const ModelParams& m, const std::string& path);

/// Throws ModelFormatError on bad magic, version, shapes or truncation, and
/// IncompatibleModel when expected_schema is given and differs.
ModelParams load_model(std::istream& in, const std::optional<std::string>& expected_schema = std::nullopt);
ModelParams load_model_file(const std::string& path, const std::optional<std::string>& expected_schema = std::nullopt);

}  // namespace shotrf
