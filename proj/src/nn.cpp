#include "dgrl/nn.hpp"

#include "dgrl/errors.hpp"

#include <cmath>
#include <istream>
#include <limits>
#include <numbers>
#include <ostream>
#include <string>

namespace dgrl {

namespace {

Vec activate(const Vec& z, Activation act) {
  switch (act) {
    case Activation::kRelu:
      return z.cwiseMax(0.0);
    case Activation::kTanh:
      return z.array().tanh().matrix();
    case Activation::kIdentity:
      break;
  }
  return z;
}

Mat activate(const Mat& z, Activation act) {
  switch (act) {
    case Activation::kRelu:
      return z.cwiseMax(0.0);
    case Activation::kTanh:
      return z.array().tanh().matrix();
    case Activation::kIdentity:
      break;
  }
  return z;
}

// Derivative expressed through the activation output `a` (and pre-activation `z` for relu).
Vec activation_derivative(const Vec& z, const Vec& a, Activation act) {
  switch (act) {
    case Activation::kRelu:
      return (z.array() > 0.0).cast<double>().matrix();
    case Activation::kTanh:
      return (1.0 - a.array().square()).matrix();
    case Activation::kIdentity:
      break;
  }
  return Vec::Ones(z.size());
}

const char* activation_name(Activation act) {
  switch (act) {
    case Activation::kRelu:
      return "relu";
    case Activation::kTanh:
      return "tanh";
    case Activation::kIdentity:
      break;
  }
  return "identity";
}

Activation parse_activation(const std::string& name) {
  if (name == "relu") return Activation::kRelu;
  if (name == "tanh") return Activation::kTanh;
  if (name == "identity") return Activation::kIdentity;
  throw FormatError("unknown activation '" + name + "'");
}

void check_chain(const LayerStack& layers) {
  for (std::size_t i = 0; i < layers.size(); ++i) {
    const auto& l = layers[i];
    if (l.bias.size() != l.weight.rows()) {
      throw DimensionError("layer " + std::to_string(i) + ": bias length " +
                           std::to_string(l.bias.size()) + " != weight rows " +
                           std::to_string(l.weight.rows()));
    }
    if (i > 0 && layers[i - 1].weight.rows() != l.weight.cols()) {
      throw DimensionError("layer " + std::to_string(i) + ": input width " +
                           std::to_string(l.weight.cols()) + " != previous output " +
                           std::to_string(layers[i - 1].weight.rows()));
    }
  }
}

}  // namespace

LayerStack zeros_like(const LayerStack& layers) {
  LayerStack out;
  out.reserve(layers.size());
  for (const auto& l : layers) {
    out.push_back({Mat::Zero(l.weight.rows(), l.weight.cols()), Vec::Zero(l.bias.size())});
  }
  return out;
}

std::size_t parameter_count(const LayerStack& layers) {
  std::size_t n = 0;
  for (const auto& l : layers) n += static_cast<std::size_t>(l.weight.size() + l.bias.size());
  return n;
}

bool all_finite(const LayerStack& layers) {
  for (const auto& l : layers) {
    if (!l.weight.allFinite() || !l.bias.allFinite()) return false;
  }
  return true;
}

Mlp::Mlp(std::span<const int> sizes, Activation hidden, Activation output, Rng& rng)
    : hidden_(hidden), output_(output) {
  if (sizes.size() < 2) throw DimensionError("an Mlp needs at least input and output widths");
  for (std::size_t i = 0; i + 1 < sizes.size(); ++i) {
    const int fan_in = sizes[i];
    const int fan_out = sizes[i + 1];
    if (fan_in <= 0 || fan_out <= 0) throw DimensionError("layer widths must be positive");
    const double bound = 1.0 / std::sqrt(static_cast<double>(fan_in));
    std::uniform_real_distribution<double> dist(-bound, bound);
    Layer l{Mat(fan_out, fan_in), Vec(fan_out)};
    for (Eigen::Index c = 0; c < l.weight.cols(); ++c) {
      for (Eigen::Index r = 0; r < l.weight.rows(); ++r) l.weight(r, c) = dist(rng);
    }
    for (Eigen::Index r = 0; r < l.bias.size(); ++r) l.bias(r) = dist(rng);
    layers_.push_back(std::move(l));
  }
}

Mlp Mlp::from_layers(LayerStack layers, Activation hidden, Activation output) {
  if (layers.empty()) throw DimensionError("an Mlp needs at least one layer");
  check_chain(layers);
  Mlp net;
  net.layers_ = std::move(layers);
  net.hidden_ = hidden;
  net.output_ = output;
  return net;
}

Activation Mlp::activation_for(std::size_t layer) const {
  return layer + 1 == layers_.size() ? output_ : hidden_;
}

int Mlp::input_dim() const {
  return layers_.empty() ? 0 : static_cast<int>(layers_.front().weight.cols());
}

int Mlp::output_dim() const {
  return layers_.empty() ? 0 : static_cast<int>(layers_.back().weight.rows());
}

Vec Mlp::forward(const Vec& input) const {
  if (input.size() != input_dim()) {
    throw DimensionError("forward: input length " + std::to_string(input.size()) +
                         " != network input " + std::to_string(input_dim()));
  }
  Vec x = input;
  for (std::size_t i = 0; i < layers_.size(); ++i) {
    x = activate(Vec(layers_[i].weight * x + layers_[i].bias), activation_for(i));
  }
  return x;
}

Mat Mlp::forward_batch(const Mat& inputs) const {
  if (inputs.rows() != input_dim()) {
    throw DimensionError("forward_batch: input rows " + std::to_string(inputs.rows()) +
                         " != network input " + std::to_string(input_dim()));
  }
  Mat x = inputs;
  for (std::size_t i = 0; i < layers_.size(); ++i) {
    Mat z = layers_[i].weight * x;
    z.colwise() += layers_[i].bias;
    x = activate(z, activation_for(i));
  }
  return x;
}

Vec Mlp::backward_into(const Vec& input, const Vec& output_grad, LayerStack& accum) const {
  if (input.size() != input_dim()) throw DimensionError("backward: input length mismatch");
  if (output_grad.size() != output_dim()) {
    throw DimensionError("backward: output gradient length mismatch");
  }
  if (accum.size() != layers_.size()) throw DimensionError("backward: accumulator shape mismatch");

  std::vector<Vec> pre(layers_.size());
  std::vector<Vec> post(layers_.size() + 1);
  post[0] = input;
  for (std::size_t i = 0; i < layers_.size(); ++i) {
    pre[i] = layers_[i].weight * post[i] + layers_[i].bias;
    post[i + 1] = activate(pre[i], activation_for(i));
  }

  Vec delta = output_grad;
  for (std::size_t k = layers_.size(); k-- > 0;) {
    delta = delta.cwiseProduct(activation_derivative(pre[k], post[k + 1], activation_for(k)));
    accum[k].weight.noalias() += delta * post[k].transpose();
    accum[k].bias += delta;
    delta = layers_[k].weight.transpose() * delta;
  }
  return delta;
}

MlpGradients Mlp::backward(const Vec& input, const Vec& output_grad) const {
  MlpGradients g{zeros_like(layers_), Vec()};
  g.input = backward_into(input, output_grad, g.layers);
  return g;
}

void Mlp::save(std::ostream& out) const {
  out.precision(17);
  out << "mlp " << layers_.size() << ' ' << activation_name(hidden_) << ' '
      << activation_name(output_) << '\n';
  for (const auto& l : layers_) {
    out << l.weight.rows() << ' ' << l.weight.cols() << '\n';
    for (Eigen::Index r = 0; r < l.weight.rows(); ++r) {
      for (Eigen::Index c = 0; c < l.weight.cols(); ++c) out << l.weight(r, c) << ' ';
      out << '\n';
    }
    for (Eigen::Index r = 0; r < l.bias.size(); ++r) out << l.bias(r) << ' ';
    out << '\n';
  }
}

Mlp Mlp::load(std::istream& in) {
  std::string tag, hidden, output;
  std::size_t count = 0;
  if (!(in >> tag >> count >> hidden >> output) || tag != "mlp") {
    throw FormatError("expected an 'mlp' header");
  }
  LayerStack layers;
  for (std::size_t i = 0; i < count; ++i) {
    Eigen::Index rows = 0, cols = 0;
    if (!(in >> rows >> cols) || rows <= 0 || cols <= 0) throw FormatError("bad layer shape");
    Layer l{Mat(rows, cols), Vec(rows)};
    for (Eigen::Index r = 0; r < rows; ++r) {
      for (Eigen::Index c = 0; c < cols; ++c) {
        if (!(in >> l.weight(r, c))) throw FormatError("truncated weight matrix");
      }
    }
    for (Eigen::Index r = 0; r < rows; ++r) {
      if (!(in >> l.bias(r))) throw FormatError("truncated bias vector");
    }
    layers.push_back(std::move(l));
  }
  return from_layers(std::move(layers), parse_activation(hidden), parse_activation(output));
}

AdamState AdamState::for_params(const LayerStack& params, double learning_rate) {
  if (!(learning_rate > 0.0)) throw ParameterError("Adam learning rate must be positive");
  AdamState s;
  s.first_moment = zeros_like(params);
  s.second_moment = zeros_like(params);
  s.learning_rate = learning_rate;
  return s;
}

void adam_step(AdamState& state, LayerStack& params, const LayerStack& grads) {
  if (params.size() != grads.size() || state.first_moment.size() != params.size() ||
      state.second_moment.size() != params.size()) {
    throw DimensionError("adam_step: parameter/gradient/moment layer counts differ");
  }
  for (std::size_t i = 0; i < params.size(); ++i) {
    if (grads[i].weight.rows() != params[i].weight.rows() ||
        grads[i].weight.cols() != params[i].weight.cols() ||
        grads[i].bias.size() != params[i].bias.size() ||
        state.first_moment[i].weight.size() != params[i].weight.size()) {
      throw DimensionError("adam_step: shape mismatch in layer " + std::to_string(i));
    }
  }
  if (!all_finite(grads)) throw NumericError("adam_step: non-finite gradient");

  state.step_count += 1;
  const double t = static_cast<double>(state.step_count);
  const double c1 = 1.0 - std::pow(state.beta1, t);
  const double c2 = 1.0 - std::pow(state.beta2, t);
  const double b1 = state.beta1;
  const double b2 = state.beta2;
  const double lr = state.learning_rate;
  const double eps = state.epsilon;

  auto update = [&](auto& p, auto& m, auto& v, const auto& g) {
    m = b1 * m + (1.0 - b1) * g;
    v = b2 * v + (1.0 - b2) * g.cwiseProduct(g);
    p.array() -= lr * (m.array() / c1) / ((v.array() / c2).sqrt() + eps);
  };
  for (std::size_t i = 0; i < params.size(); ++i) {
    update(params[i].weight, state.first_moment[i].weight, state.second_moment[i].weight,
           grads[i].weight);
    update(params[i].bias, state.first_moment[i].bias, state.second_moment[i].bias,
           grads[i].bias);
  }
}

LossResult huber_loss(const Vec& pred, const Vec& target, double delta) {
  if (!(delta > 0.0)) throw ParameterError("huber_loss: delta must be positive");
  if (pred.size() != target.size()) throw DimensionError("huber_loss: length mismatch");
  LossResult out{0.0, Vec(pred.size())};
  for (Eigen::Index i = 0; i < pred.size(); ++i) {
    const double r = pred(i) - target(i);
    const double a = std::abs(r);
    if (a <= delta) {
      out.loss += 0.5 * r * r;
      out.grad(i) = r;
    } else {
      out.loss += delta * (a - 0.5 * delta);
      out.grad(i) = r > 0.0 ? delta : -delta;
    }
  }
  return out;
}

LossResult squared_loss(const Vec& pred, const Vec& target) {
  if (pred.size() != target.size()) throw DimensionError("squared_loss: length mismatch");
  Vec r = pred - target;
  return {0.5 * r.squaredNorm(), r};
}

Vec fourier_features(const Vec& state, const FourierConfig& cfg) {
  if (cfg.order < 0) throw ParameterError("fourier order must be >= 0");
  if (state.size() != cfg.input_dim) throw DimensionError("fourier_features: input length mismatch");
  const int width = cfg.order + 1;
  Vec out(cfg.output_dim());
  for (Eigen::Index j = 0; j < state.size(); ++j) {
    const double s = state(j);
    if (!(s >= 0.0 && s <= 1.0)) {
      throw DomainError("fourier_features: state entry " + std::to_string(j) +
                        " outside [0, 1]: " + std::to_string(s));
    }
    for (int i = 0; i < width; ++i) {
      out(j * width + i) = std::cos(i * std::numbers::pi * s);
    }
  }
  return out;
}

double compare_gradients(const Mlp& net, const Vec& input, double eps,
                         const AnalyticGradient& analytic) {
  if (!(eps > 0.0 && eps <= 1e-3)) throw ParameterError("grad_check: eps must lie in (0, 1e-3]");
  const Vec ones = Vec::Ones(net.output_dim());
  const MlpGradients g = analytic(net, input, ones);

  double worst = 0.0;
  auto record = [&worst](double a, double n) {
    const double denom = std::max(std::abs(a) + std::abs(n), 1e-6);
    worst = std::max(worst, std::abs(a - n) / denom);
  };

  Mlp probe = net;
  auto objective = [&probe](const Vec& x) { return probe.forward(x).sum(); };
  for (std::size_t k = 0; k < probe.layers().size(); ++k) {
    auto& layer = probe.layers()[k];
    for (Eigen::Index i = 0; i < layer.weight.size(); ++i) {
      double& w = layer.weight.data()[i];
      const double saved = w;
      w = saved + eps;
      const double up = objective(input);
      w = saved - eps;
      const double down = objective(input);
      w = saved;
      record(g.layers[k].weight.data()[i], (up - down) / (2.0 * eps));
    }
    for (Eigen::Index i = 0; i < layer.bias.size(); ++i) {
      double& b = layer.bias(i);
      const double saved = b;
      b = saved + eps;
      const double up = objective(input);
      b = saved - eps;
      const double down = objective(input);
      b = saved;
      record(g.layers[k].bias(i), (up - down) / (2.0 * eps));
    }
  }
  Vec x = input;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    const double saved = x(i);
    x(i) = saved + eps;
    const double up = objective(x);
    x(i) = saved - eps;
    const double down = objective(x);
    x(i) = saved;
    record(g.input(i), (up - down) / (2.0 * eps));
  }
  return worst;
}

double grad_check(const Mlp& net, const Vec& input, double eps) {
  return compare_gradients(net, input, eps, [](const Mlp& n, const Vec& x, const Vec& g) {
    return n.backward(x, g);
  });
}

}  // namespace dgrl
