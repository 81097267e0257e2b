#pragma once

// Distance-based actor updates: perturb and round the proto-action, weight the
// rounded candidates by a softmax over critic values, regress the actor toward
// the weighted average.

#include "dgrl/action_space.hpp"
#include "dgrl/nn.hpp"
#include "dgrl/sdn.hpp"

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

namespace dgrl {

enum class DistanceLoss { kHuber, kSquared };

struct DbuConfig {
  double perturbation_std = 0.5;  // sigma_b, actor-output frame
  int candidates = 10;            // M
  double temperature = 1.0;       // tau
  DistanceLoss loss = DistanceLoss::kHuber;
  double huber_delta = 1.0;

  void validate() const;
};

/// M candidates round(scale(clip(proto + N(0, sigma_b^2 I)))), clipped to bounds.
/// Duplicates are kept. Continuous dims are scaled and clipped but not rounded.
std::vector<ExecutableAction> perturb_candidates(const Vec& proto, const DbuConfig& cfg,
                                                 const ActionSpaceSpec& spec, Rng& rng);

/// sum_i softmax(q / tau)_i * a_i in action-space coordinates.
Vec softmax_target(std::span<const ExecutableAction> candidates, std::span<const double> q_values,
                   double tau);

/// Loss between actor output and target (both in the actor frame), summed over dims.
LossResult distance_loss(const Vec& pred, const Vec& target, const DbuConfig& cfg);

struct HybridLoss {
  double discrete = 0.0;
  double continuous = 0.0;
  double total = 0.0;
};

/// distance_loss split into the first `discrete_dims` entries and the rest.
HybridLoss hybrid_distance_loss(const Vec& pred, const Vec& target, int discrete_dims,
                                const DbuConfig& cfg);

/// Target for one state in the actor frame: perturb, score, softmax-average, unscale.
Vec build_dbu_target(const Vec& state, const Mlp& actor, const ActionScorer& scorer,
                     const DbuConfig& cfg, const ActionSpaceSpec& spec, Rng& rng);

/// One Adam step on the batch-mean distance loss. Targets are constants.
/// Returns the mean loss before the step.
double dbu_actor_update(Mlp& actor, AdamState& optimizer, std::span<const Vec> states,
                        std::span<const Vec> targets, const DbuConfig& cfg);

/// Critic over normalized actions, used by the variance probe.
using NormalizedCritic = std::function<double(const Vec& normalized_action)>;

struct VarianceProbe {
  std::vector<int> sizes;
  std::vector<double> dbu_variance;             // trace of the actor-gradient covariance
  std::vector<double> score_function_variance;  // contrast estimator, same spaces
};

/// For each per-dimension size m, builds the space {0..m-1}^dims, resamples DBU
/// targets `trials` times at a fixed state and measures the trace of the
/// covariance of the actor parameter gradient. The contrast is the estimator
/// Q(a) e_a / pi(a) with a drawn from the uniform policy over the full space.
VarianceProbe dbu_gradient_variance_probe(const Vec& state, const Mlp& actor,
                                          const NormalizedCritic& critic, const DbuConfig& cfg,
                                          int dims, std::span<const int> per_dim_sizes,
                                          int trials, std::uint64_t seed);

}  // namespace dgrl
