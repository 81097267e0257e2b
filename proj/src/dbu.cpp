#include "dgrl/dbu.hpp"

#include "dgrl/errors.hpp"

#include <algorithm>
#include <cmath>

namespace dgrl {

namespace {

// Trace of the sample covariance of the columns of `samples`.
double covariance_trace(const Mat& samples) {
  const double n = static_cast<double>(samples.cols());
  if (n < 2) return 0.0;
  const Vec mean = samples.rowwise().mean();
  return (samples.colwise() - mean).squaredNorm() / (n - 1.0);
}

Vec flatten(const LayerStack& layers) {
  Vec out(static_cast<Eigen::Index>(parameter_count(layers)));
  Eigen::Index pos = 0;
  for (const auto& l : layers) {
    out.segment(pos, l.weight.size()) = l.weight.reshaped();
    pos += l.weight.size();
    out.segment(pos, l.bias.size()) = l.bias;
    pos += l.bias.size();
  }
  return out;
}

}  // namespace

void DbuConfig::validate() const {
  if (!(perturbation_std > 0.0)) throw ParameterError("DBU perturbation std must be > 0");
  if (candidates < 2) throw ParameterError("DBU needs at least two candidates");
  if (!(temperature > 0.0)) throw ParameterError("DBU temperature must be > 0");
  if (!(huber_delta > 0.0)) throw ParameterError("Huber delta must be > 0");
}

std::vector<ExecutableAction> perturb_candidates(const Vec& proto, const DbuConfig& cfg,
                                                 const ActionSpaceSpec& spec, Rng& rng) {
  cfg.validate();
  if (proto.size() != spec.total_dims()) throw DimensionError("perturb_candidates: length mismatch");
  std::normal_distribution<double> gauss(0.0, cfg.perturbation_std);
  std::vector<ExecutableAction> out;
  out.reserve(static_cast<std::size_t>(cfg.candidates));
  Vec noisy(proto.size());
  for (int i = 0; i < cfg.candidates; ++i) {
    for (Eigen::Index d = 0; d < proto.size(); ++d) noisy(d) = proto(d) + gauss(rng);
    out.push_back(nearest_neighbor(scale_proto(noisy, spec), spec));
  }
  return out;
}

Vec softmax_target(std::span<const ExecutableAction> candidates, std::span<const double> q_values,
                   double tau) {
  if (candidates.empty() || candidates.size() != q_values.size()) {
    throw DimensionError("softmax_target: candidates and Q-values must be non-empty and aligned");
  }
  if (!(tau > 0.0)) throw ParameterError("softmax_target: tau must be > 0");
  for (double q : q_values) {
    if (!std::isfinite(q)) throw NumericError("softmax_target: non-finite Q-value");
  }
  const double top = *std::max_element(q_values.begin(), q_values.end());
  Vec target = Vec::Zero(to_vector(candidates.front()).size());
  double total = 0.0;
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    const double w = std::exp((q_values[i] - top) / tau);
    target += w * to_vector(candidates[i]);
    total += w;
  }
  return target / total;
}

LossResult distance_loss(const Vec& pred, const Vec& target, const DbuConfig& cfg) {
  if (pred.size() != target.size()) throw DimensionError("distance_loss: length mismatch");
  return cfg.loss == DistanceLoss::kHuber ? huber_loss(pred, target, cfg.huber_delta)
                                          : squared_loss(pred, target);
}

HybridLoss hybrid_distance_loss(const Vec& pred, const Vec& target, int discrete_dims,
                                const DbuConfig& cfg) {
  if (discrete_dims < 0 || discrete_dims > pred.size()) {
    throw DimensionError("hybrid_distance_loss: bad split");
  }
  const auto tail = pred.size() - discrete_dims;
  HybridLoss out;
  out.discrete = distance_loss(pred.head(discrete_dims), target.head(discrete_dims), cfg).loss;
  out.continuous = distance_loss(pred.tail(tail), target.tail(tail), cfg).loss;
  out.total = out.discrete + out.continuous;
  return out;
}

Vec build_dbu_target(const Vec& state, const Mlp& actor, const ActionScorer& scorer,
                     const DbuConfig& cfg, const ActionSpaceSpec& spec, Rng& rng) {
  const Vec proto = clip_proto(actor.forward(state));
  const auto candidates = perturb_candidates(proto, cfg, spec, rng);
  const Vec q = scorer(state, candidates);
  const Vec target = softmax_target(candidates, std::span<const double>(q.data(), q.size()),
                                    cfg.temperature);
  return unscale_action(target, spec);
}

double dbu_actor_update(Mlp& actor, AdamState& optimizer, std::span<const Vec> states,
                        std::span<const Vec> targets, const DbuConfig& cfg) {
  if (states.empty() || states.size() != targets.size()) {
    throw DimensionError("dbu_actor_update: states and targets must be non-empty and aligned");
  }
  const double scale = 1.0 / static_cast<double>(states.size());
  LayerStack grads = zeros_like(actor.layers());
  double total = 0.0;
  for (std::size_t i = 0; i < states.size(); ++i) {
    const LossResult l = distance_loss(actor.forward(states[i]), targets[i], cfg);
    actor.backward_into(states[i], l.grad * scale, grads);
    total += l.loss;
  }
  adam_step(optimizer, actor.layers(), grads);
  return total * scale;
}

VarianceProbe dbu_gradient_variance_probe(const Vec& state, const Mlp& actor,
                                          const NormalizedCritic& critic, const DbuConfig& cfg,
                                          int dims, std::span<const int> per_dim_sizes,
                                          int trials, std::uint64_t seed) {
  cfg.validate();
  if (dims < 1 || trials < 2) throw ParameterError("variance probe needs dims >= 1 and trials >= 2");
  if (actor.output_dim() != dims) throw DimensionError("variance probe: actor output != dims");
  VarianceProbe out;
  const Vec proto = clip_proto(actor.forward(state));
  for (int m : per_dim_sizes) {
    if (m < 2) throw ParameterError("variance probe sizes must be >= 2");
    const ActionSpaceSpec spec = ActionSpaceSpec::uniform(dims, 0, m - 1);
    Rng rng(seed);
    const auto params = static_cast<Eigen::Index>(parameter_count(actor.layers()));

    Mat dbu(params, trials);
    for (int t = 0; t < trials; ++t) {
      const auto candidates = perturb_candidates(proto, cfg, spec, rng);
      std::vector<double> q;
      q.reserve(candidates.size());
      for (const auto& a : candidates) q.push_back(critic(normalize_action(a, spec)));
      const Vec target = unscale_action(softmax_target(candidates, q, cfg.temperature), spec);
      const LossResult l = distance_loss(proto, target, cfg);
      dbu.col(t) = flatten(actor.backward(state, l.grad).layers);
    }

    // Score function in the probability parameterization over the joint space.
    const double cardinality = std::pow(static_cast<double>(m), dims);
    const auto joint = static_cast<Eigen::Index>(cardinality);
    std::uniform_int_distribution<int> coord(0, m - 1);
    Vec sum = Vec::Zero(joint);
    Vec sum_sq = Vec::Zero(joint);
    ExecutableAction a;
    a.discrete.resize(static_cast<std::size_t>(dims));
    for (int t = 0; t < trials; ++t) {
      Eigen::Index index = 0;
      for (int d = 0; d < dims; ++d) {
        a.discrete[static_cast<std::size_t>(d)] = coord(rng);
        index = index * m + a.discrete[static_cast<std::size_t>(d)];
      }
      const double g = critic(normalize_action(a, spec)) * cardinality;
      sum(index) += g;
      sum_sq(index) += g * g;
    }
    // Only one entry per draw is non-zero, so per-entry moments come from running sums.
    const double n = static_cast<double>(trials);
    const double sf_trace = ((sum_sq - sum.cwiseAbs2() / n) / (n - 1.0)).sum();

    out.sizes.push_back(m);
    out.dbu_variance.push_back(covariance_trace(dbu));
    out.score_function_variance.push_back(sf_trace);
  }
  return out;
}

}  // namespace dgrl
