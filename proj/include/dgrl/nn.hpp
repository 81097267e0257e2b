#pragma once

// Small feed-forward network engine: dense layers, exact backprop, Adam,
// Huber loss and decoupled Fourier features. Everything is double precision;
// batched evaluation stores one sample per column.

#include <Eigen/Dense>

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <random>
#include <span>
#include <vector>

namespace dgrl {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;
using Rng = std::mt19937_64;

enum class Activation { kIdentity, kRelu, kTanh };

struct Layer {
  Mat weight;  // out x in
  Vec bias;    // out
};

/// Parameter-shaped container; used for parameters, gradients and moments.
using LayerStack = std::vector<Layer>;

LayerStack zeros_like(const LayerStack& layers);
std::size_t parameter_count(const LayerStack& layers);
bool all_finite(const LayerStack& layers);

struct MlpGradients {
  LayerStack layers;
  Vec input;
};

/// Multilayer perceptron with one hidden activation and one output activation.
class Mlp {
 public:
  Mlp() = default;

  /// Uniform init in [-1/sqrt(fan_in), 1/sqrt(fan_in)]. `sizes` lists
  /// input, hidden..., output widths.
  Mlp(std::span<const int> sizes, Activation hidden, Activation output, Rng& rng);

  /// Wraps explicit layers; throws DimensionError if shapes do not chain.
  static Mlp from_layers(LayerStack layers, Activation hidden, Activation output);

  Vec forward(const Vec& input) const;
  Mat forward_batch(const Mat& inputs) const;

  /// Gradients of dot(forward(input), output_grad) w.r.t. all parameters and the input.
  MlpGradients backward(const Vec& input, const Vec& output_grad) const;

  /// Accumulates parameter gradients into `accum` (same shapes) and returns the input gradient.
  Vec backward_into(const Vec& input, const Vec& output_grad, LayerStack& accum) const;

  int input_dim() const;
  int output_dim() const;
  bool empty() const { return layers_.empty(); }

  const LayerStack& layers() const { return layers_; }
  LayerStack& layers() { return layers_; }
  Activation hidden_activation() const { return hidden_; }
  Activation output_activation() const { return output_; }

  void save(std::ostream& out) const;
  static Mlp load(std::istream& in);

 private:
  Activation activation_for(std::size_t layer) const;

  LayerStack layers_;
  Activation hidden_ = Activation::kRelu;
  Activation output_ = Activation::kIdentity;
};

struct AdamState {
  LayerStack first_moment;
  LayerStack second_moment;
  std::int64_t step_count = 0;
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;

  static AdamState for_params(const LayerStack& params, double learning_rate);
};

/// Bias-corrected Adam update, in place. Throws NumericError on non-finite
/// gradients and DimensionError on shape mismatch.
void adam_step(AdamState& state, LayerStack& params, const LayerStack& grads);

struct LossResult {
  double loss = 0.0;
  Vec grad;  // d loss / d pred
};

/// Elementwise Huber loss, summed.
LossResult huber_loss(const Vec& pred, const Vec& target, double delta = 1.0);

/// Half squared error, summed.
LossResult squared_loss(const Vec& pred, const Vec& target);

struct FourierConfig {
  int order = 3;
  int input_dim = 1;

  int output_dim() const { return input_dim * (order + 1); }
};

/// Decoupled cosine basis: cos(i*pi*s_j) for every coordinate j and i in 0..order,
/// grouped by coordinate. Entries of `state` must lie in [0, 1].
Vec fourier_features(const Vec& state, const FourierConfig& cfg);

using AnalyticGradient = std::function<MlpGradients(const Mlp&, const Vec&, const Vec&)>;

/// Max relative error between an analytic gradient and central differences of
/// sum(forward(input)) over every parameter and input entry.
double compare_gradients(const Mlp& net, const Vec& input, double eps,
                         const AnalyticGradient& analytic);

/// compare_gradients with Mlp::backward as the analytic side.
double grad_check(const Mlp& net, const Vec& input, double eps = 1e-5);

}  // namespace dgrl
