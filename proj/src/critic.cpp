#include "dgrl/critic.hpp"

#include "dgrl/errors.hpp"

#include <array>
#include <cmath>

namespace dgrl {

namespace {

void blend(LayerStack& target, const LayerStack& source, double rho) {
  for (std::size_t i = 0; i < target.size(); ++i) {
    target[i].weight = (1.0 - rho) * target[i].weight + rho * source[i].weight;
    target[i].bias = (1.0 - rho) * target[i].bias + rho * source[i].bias;
  }
}

}  // namespace

CriticNet::CriticNet(const CriticArchitecture& arch, Rng& rng) : arch_(arch) {
  if (arch.state_dim <= 0 || arch.action_dim <= 0 || arch.width <= 0) {
    throw DimensionError("critic dimensions must be positive");
  }
  const int w = arch.width;
  if (arch.encode_state_first) {
    const std::array<int, 2> enc{arch.state_dim, w};
    encoder_ = Mlp(enc, arch.hidden, arch.hidden, rng);
    const std::array<int, 4> head{w + arch.action_dim, w, w, 1};
    head_ = Mlp(head, arch.hidden, Activation::kIdentity, rng);
  } else {
    const std::array<int, 5> head{arch.state_dim + arch.action_dim, w, w, w, 1};
    head_ = Mlp(head, arch.hidden, Activation::kIdentity, rng);
  }
}

Mat CriticNet::head_inputs(const Vec& state, const Mat& actions) const {
  if (state.size() != arch_.state_dim) throw DimensionError("critic: state length mismatch");
  if (actions.rows() != arch_.action_dim) throw DimensionError("critic: action length mismatch");
  const Vec front = encoder_.empty() ? state : encoder_.forward(state);
  Mat in(front.size() + actions.rows(), actions.cols());
  in.topRows(front.size()) = front.replicate(1, actions.cols());
  in.bottomRows(actions.rows()) = actions;
  return in;
}

double CriticNet::value(const Vec& state, const Vec& action) const {
  return values(state, action)(0);
}

Vec CriticNet::values(const Vec& state, const Mat& actions) const {
  return head_.forward_batch(head_inputs(state, actions)).row(0).transpose();
}

CriticNet::Grads CriticNet::zero_grads() const {
  return {zeros_like(encoder_.layers()), zeros_like(head_.layers())};
}

void CriticNet::accumulate_gradient(const Vec& state, const Vec& action, double dq,
                                    Grads& grads) const {
  const Vec in = head_inputs(state, action);
  const Vec upstream = head_.backward_into(in, Vec::Constant(1, dq), grads.head);
  if (!encoder_.empty()) {
    encoder_.backward_into(state, upstream.head(arch_.width), grads.encoder);
  }
}

CriticNet::Optimizer CriticNet::make_optimizer(double learning_rate) const {
  Optimizer opt{AdamState::for_params(encoder_.layers(), learning_rate),
                AdamState::for_params(head_.layers(), learning_rate)};
  return opt;
}

void CriticNet::apply(Optimizer& opt, const Grads& grads) {
  if (!encoder_.empty()) adam_step(opt.encoder, encoder_.layers(), grads.encoder);
  adam_step(opt.head, head_.layers(), grads.head);
}

void CriticNet::set_learning_rate(Optimizer& opt, double learning_rate) const {
  if (!(learning_rate > 0.0)) throw ParameterError("critic learning rate must be positive");
  opt.encoder.learning_rate = learning_rate;
  opt.head.learning_rate = learning_rate;
}

void CriticNet::blend_from(const CriticNet& source, double rho) {
  blend(encoder_.layers(), source.encoder_.layers(), rho);
  blend(head_.layers(), source.head_.layers(), rho);
}

CriticPair::CriticPair(const CriticArchitecture& arch, Rng& rng, double polyak_rate)
    : q1(arch, rng), q2(arch, rng), q1_target(q1), q2_target(q2), polyak(polyak_rate) {
  if (!(polyak_rate > 0.0 && polyak_rate < 1.0)) {
    throw ParameterError("polyak rate must lie in (0, 1)");
  }
}

Vec CriticPair::min_online(const Vec& state, const Mat& actions) const {
  return q1.values(state, actions).cwiseMin(q2.values(state, actions));
}

Vec CriticPair::min_target(const Vec& state, const Mat& actions) const {
  return q1_target.values(state, actions).cwiseMin(q2_target.values(state, actions));
}

double td_target(double reward, bool terminal, double next_q_min, double gamma) {
  if (!(gamma >= 0.0 && gamma <= 1.0)) throw ParameterError("gamma must lie in [0, 1]");
  return terminal ? reward : reward + gamma * next_q_min;
}

void polyak_update(CriticPair& critics) {
  critics.q1_target.blend_from(critics.q1, critics.polyak);
  critics.q2_target.blend_from(critics.q2, critics.polyak);
}

CriticOptimizers make_critic_optimizers(const CriticPair& critics, double learning_rate) {
  return {critics.q1.make_optimizer(learning_rate), critics.q2.make_optimizer(learning_rate)};
}

Mat action_matrix(std::span<const ExecutableAction> actions, const ActionSpaceSpec& spec) {
  Mat m(spec.total_dims(), static_cast<Eigen::Index>(actions.size()));
  for (std::size_t i = 0; i < actions.size(); ++i) {
    m.col(static_cast<Eigen::Index>(i)) = normalize_action(actions[i], spec);
  }
  return m;
}

double critic_update(CriticPair& critics, std::span<const Transition> batch,
                     const ActionSpaceSpec& spec, const NextActionSelector& select_next,
                     double gamma, CriticOptimizers& optimizers, double huber_delta) {
  if (batch.empty()) throw StateError("critic_update: empty batch");
  const double scale = 1.0 / static_cast<double>(batch.size());

  auto g1 = critics.q1.zero_grads();
  auto g2 = critics.q2.zero_grads();
  double total_loss = 0.0;
  for (const auto& t : batch) {
    double y = t.reward;
    if (!t.terminal) {
      const ExecutableAction next = select_next(t.next_state);
      const Vec next_a = normalize_action(next, spec);
      const double q_min = std::min(critics.q1_target.value(t.next_state, next_a),
                                    critics.q2_target.value(t.next_state, next_a));
      y = td_target(t.reward, false, q_min, gamma);
    }
    if (!std::isfinite(y)) throw NumericError("critic_update: non-finite TD target");
    const Vec a = normalize_action(t.action, spec);
    const Vec target = Vec::Constant(1, y);
    const LossResult l1 = huber_loss(Vec::Constant(1, critics.q1.value(t.state, a)), target, huber_delta);
    const LossResult l2 = huber_loss(Vec::Constant(1, critics.q2.value(t.state, a)), target, huber_delta);
    critics.q1.accumulate_gradient(t.state, a, l1.grad(0) * scale, g1);
    critics.q2.accumulate_gradient(t.state, a, l2.grad(0) * scale, g2);
    total_loss += 0.5 * (l1.loss + l2.loss);
  }
  critics.q1.apply(optimizers.q1, g1);
  critics.q2.apply(optimizers.q2, g2);
  return total_loss * scale;
}

}  // namespace dgrl
