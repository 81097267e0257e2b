#pragma once

// Critic networks, clipped double-Q targets and polyak-averaged target copies.

#include "dgrl/action_space.hpp"
#include "dgrl/nn.hpp"
#include "dgrl/replay_buffer.hpp"

#include <functional>
#include <span>

namespace dgrl {

struct CriticArchitecture {
  int state_dim = 1;
  int action_dim = 1;
  int width = 64;
  // When set, the first hidden layer sees only the state and the action joins
  // at the second layer. Otherwise state and action enter together.
  bool encode_state_first = false;
  Activation hidden = Activation::kRelu;
};

/// Q(s, a) with actions given in normalized [0, 1] coordinates. Three hidden layers.
class CriticNet {
 public:
  struct Grads {
    LayerStack encoder;
    LayerStack head;
  };
  struct Optimizer {
    AdamState encoder;
    AdamState head;
  };

  CriticNet() = default;
  CriticNet(const CriticArchitecture& arch, Rng& rng);

  double value(const Vec& state, const Vec& action) const;
  /// One candidate per column of `actions`.
  Vec values(const Vec& state, const Mat& actions) const;

  Grads zero_grads() const;
  /// Adds dq * dQ(state, action)/dparams into `grads`.
  void accumulate_gradient(const Vec& state, const Vec& action, double dq, Grads& grads) const;

  Optimizer make_optimizer(double learning_rate) const;
  void apply(Optimizer& opt, const Grads& grads);
  void set_learning_rate(Optimizer& opt, double learning_rate) const;

  /// this <- (1 - rho) * this + rho * source.
  void blend_from(const CriticNet& source, double rho);

  const Mlp& encoder() const { return encoder_; }
  const Mlp& head() const { return head_; }
  Mlp& encoder() { return encoder_; }
  Mlp& head() { return head_; }
  const CriticArchitecture& architecture() const { return arch_; }

 private:
  Mat head_inputs(const Vec& state, const Mat& actions) const;

  CriticArchitecture arch_;
  Mlp encoder_;  // empty when !encode_state_first
  Mlp head_;
};

/// Two online critics, their target copies and the polyak rate.
struct CriticPair {
  CriticNet q1, q2;
  CriticNet q1_target, q2_target;
  double polyak = 0.02;

  CriticPair() = default;
  CriticPair(const CriticArchitecture& arch, Rng& rng, double polyak_rate = 0.02);

  /// Elementwise min of the two online critics over candidate columns.
  Vec min_online(const Vec& state, const Mat& actions) const;
  /// Elementwise min of the two target critics over candidate columns.
  Vec min_target(const Vec& state, const Mat& actions) const;
};

/// y = r when terminal, else r + gamma * next_q_min.
double td_target(double reward, bool terminal, double next_q_min, double gamma);

/// Moves both target critics toward their online critics by the pair's polyak rate.
void polyak_update(CriticPair& critics);

using NextActionSelector = std::function<ExecutableAction(const Vec& next_state)>;

struct CriticOptimizers {
  CriticNet::Optimizer q1;
  CriticNet::Optimizer q2;
};

CriticOptimizers make_critic_optimizers(const CriticPair& critics, double learning_rate);

/// Regresses both online critics toward the shared clipped double-Q target with a
/// Huber loss (one Adam step each). Returns the mean loss over both critics.
/// Target networks are left untouched.
double critic_update(CriticPair& critics, std::span<const Transition> batch,
                     const ActionSpaceSpec& spec, const NextActionSelector& select_next,
                     double gamma, CriticOptimizers& optimizers, double huber_delta = 1.0);

/// Stacks normalized candidate actions as columns.
Mat action_matrix(std::span<const ExecutableAction> actions, const ActionSpaceSpec& spec);

}  // namespace dgrl
