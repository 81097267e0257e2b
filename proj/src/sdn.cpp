#include "dgrl/sdn.hpp"

#include "dgrl/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

namespace dgrl {

namespace {

// Membership slack for |z - coord| <= radius against rounding in the affine map.
constexpr double kBallSlack = 1e-9;

std::size_t draw_index(std::span<const double> probabilities, Rng& rng) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double u = unit(rng);
  double acc = 0.0;
  for (std::size_t i = 0; i < probabilities.size(); ++i) {
    acc += probabilities[i];
    if (u < acc) return i;
  }
  return probabilities.size() - 1;
}

Vec perturbed_proto(const Vec& state, const Mlp& actor, double noise, SelectionMode mode,
                    Rng* rng) {
  Vec proto = actor.forward(state);
  if (mode == SelectionMode::kTrain && noise > 0.0) {
    if (rng == nullptr) throw StateError("train-mode selection needs an rng");
    std::normal_distribution<double> gauss(0.0, noise);
    for (Eigen::Index i = 0; i < proto.size(); ++i) proto(i) += gauss(*rng);
  }
  return clip_proto(proto);
}

ExecutableAction choose(const Vec& state, const ActionScorer& scorer, CandidateSet& set,
                        const SdnConfig& cfg, SelectionMode mode, Rng& rng,
                        CandidateSet* inspected) {
  const Vec q = scorer(state, set.actions);
  if (q.size() != static_cast<Eigen::Index>(set.actions.size())) {
    throw DimensionError("scorer returned the wrong number of Q-values");
  }
  set.q_values.assign(q.data(), q.data() + q.size());
  for (double v : set.q_values) {
    if (!std::isfinite(v)) throw NumericError("non-finite Q-value during selection");
  }
  const std::size_t idx = mode == SelectionMode::kEval
                              ? argmax_first(set.q_values)
                              : rank_selection(set.q_values, cfg.exploration_temperature, rng);
  if (inspected != nullptr) *inspected = set;
  return set.actions[idx];
}

}  // namespace

void SdnConfig::validate() const {
  if (radius < 1) throw ParameterError("SDN radius L must be >= 1");
  if (samples < 1) throw ParameterError("SDN sample count K must be >= 1");
  if (!(sampling_temperature > 0.0)) throw ParameterError("sampling temperature must be > 0");
  if (!(exploration_temperature > 0.0 && exploration_temperature <= 1.0)) {
    throw ParameterError("exploration temperature must lie in (0, 1]");
  }
  if (!(proto_noise >= 0.0)) throw ParameterError("proto noise must be >= 0");
}

CoordinateOptions coordinate_options(double coord, int radius, int lo, int hi, double temperature,
                                     SamplingScheme scheme) {
  if (radius < 1) throw ParameterError("coordinate_options: radius must be >= 1");
  if (!(temperature > 0.0)) throw ParameterError("coordinate_options: temperature must be > 0");
  if (lo > hi) throw ParameterError("coordinate_options: lo > hi");
  const double c = std::clamp(coord, static_cast<double>(lo), static_cast<double>(hi));
  const int first = std::max(lo, static_cast<int>(std::ceil(c - radius - kBallSlack)));
  const int last = std::min(hi, static_cast<int>(std::floor(c + radius + kBallSlack)));

  CoordinateOptions out;
  double total = 0.0;
  for (int z = first; z <= last; ++z) {
    const double dist = std::abs(z - c);
    const double w = scheme == SamplingScheme::kLinear
                         ? std::max(0.0, radius - dist) + temperature
                         : std::exp(-dist / temperature);
    out.values.push_back(z);
    out.probabilities.push_back(w);
    total += w;
  }
  for (double& p : out.probabilities) p /= total;
  return out;
}

std::vector<CoordinateOptions> neighborhood_options(const Vec& scaled, const SdnConfig& cfg,
                                                    const ActionSpaceSpec& spec) {
  std::vector<CoordinateOptions> options;
  options.reserve(static_cast<std::size_t>(spec.discrete_dims()));
  for (int d = 0; d < spec.discrete_dims(); ++d) {
    const auto i = static_cast<std::size_t>(d);
    options.push_back(coordinate_options(scaled(d), cfg.radius, spec.lower[i], spec.upper[i],
                                         cfg.sampling_temperature, cfg.scheme));
  }
  return options;
}

std::vector<int> sample_coordinates(std::span<const CoordinateOptions> options, Rng& rng) {
  std::vector<int> out;
  out.reserve(options.size());
  for (const auto& o : options) out.push_back(o.values[draw_index(o.probabilities, rng)]);
  return out;
}

CandidateSet sample_neighborhood(const Vec& scaled, const SdnConfig& cfg,
                                 const ActionSpaceSpec& spec, Rng& rng) {
  cfg.validate();
  if (scaled.size() != spec.total_dims()) throw DimensionError("sample_neighborhood: length mismatch");
  const int n = spec.discrete_dims();
  const auto options = neighborhood_options(scaled, cfg, spec);
  const ExecutableAction nn = nearest_neighbor(scaled, spec);
  const Vec center = scaled.head(n);

  CandidateSet set;
  std::set<std::vector<int>> seen;
  const int draws = 2 * cfg.samples;
  for (int k = 0; k < draws; ++k) {
    std::vector<int> point = sample_coordinates(options, rng);
    if (seen.contains(point)) continue;
    if (spec.metric != Metric::kChebyshev) {
      Vec v(n);
      for (int d = 0; d < n; ++d) v(d) = point[static_cast<std::size_t>(d)];
      if (distance(v, center, spec.metric) > cfg.radius + kBallSlack) continue;
    }
    seen.insert(point);
    set.actions.push_back({std::move(point), nn.continuous});
  }
  if (static_cast<int>(set.actions.size()) > cfg.samples) {
    set.actions.resize(static_cast<std::size_t>(cfg.samples));
  }
  const bool has_nn = std::any_of(set.actions.begin(), set.actions.end(),
                                  [&nn](const ExecutableAction& a) { return a.discrete == nn.discrete; });
  if (!has_nn) set.actions.insert(set.actions.begin(), nn);
  return set;
}

std::vector<double> rank_probabilities(std::span<const double> q_values, double tau_e) {
  if (q_values.empty()) throw StateError("rank_probabilities: no candidates");
  if (!(tau_e > 0.0 && tau_e <= 1.0)) throw ParameterError("tau_e must lie in (0, 1]");
  std::vector<std::size_t> order(q_values.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&q_values](std::size_t a, std::size_t b) { return q_values[a] > q_values[b]; });
  std::vector<double> probs(q_values.size());
  double total = 0.0;
  for (std::size_t rank = 0; rank < order.size(); ++rank) {
    const double w = std::pow(tau_e, static_cast<double>(rank));
    probs[order[rank]] = w;
    total += w;
  }
  for (double& p : probs) p /= total;
  return probs;
}

std::size_t rank_selection(std::span<const double> q_values, double tau_e, Rng& rng) {
  const auto probs = rank_probabilities(q_values, tau_e);
  return draw_index(probs, rng);
}

std::size_t argmax_first(std::span<const double> values) {
  if (values.empty()) throw StateError("argmax of an empty list");
  std::size_t best = 0;
  for (std::size_t i = 1; i < values.size(); ++i) {
    if (values[i] > values[best]) best = i;
  }
  return best;
}

Vec scaled_proto_action(const Vec& state, const Mlp& actor, const ActionSpaceSpec& spec,
                        double proto_noise, SelectionMode mode, Rng& rng) {
  return scale_proto(perturbed_proto(state, actor, proto_noise, mode, &rng), spec);
}

ExecutableAction sdn_select(const Vec& state, const Mlp& actor, const ActionScorer& scorer,
                            const SdnConfig& cfg, const ActionSpaceSpec& spec,
                            SelectionMode mode, Rng& rng, CandidateSet* inspected) {
  const Vec scaled = scaled_proto_action(state, actor, spec, cfg.proto_noise, mode, rng);
  CandidateSet set = sample_neighborhood(scaled, cfg, spec, rng);
  return choose(state, scorer, set, cfg, mode, rng, inspected);
}

ExecutableAction hybrid_select(const Vec& state, const Mlp& actor, const ActionScorer& scorer,
                               const SdnConfig& cfg, const ActionSpaceSpec& spec,
                               double continuous_noise, SelectionMode mode, Rng& rng,
                               CandidateSet* inspected) {
  if (spec.continuous_dims() < 1) throw ParameterError("hybrid_select needs continuous dims");
  if (!(continuous_noise >= 0.0)) throw ParameterError("continuous noise must be >= 0");
  const Vec scaled = scaled_proto_action(state, actor, spec, cfg.proto_noise, mode, rng);
  CandidateSet set = sample_neighborhood(scaled, cfg, spec, rng);
  if (continuous_noise > 0.0) {
    std::normal_distribution<double> gauss(0.0, continuous_noise);
    for (auto& a : set.actions) {
      for (std::size_t c = 0; c < a.continuous.size(); ++c) {
        a.continuous[c] = std::clamp(a.continuous[c] + gauss(rng), spec.continuous_lower[c],
                                     spec.continuous_upper[c]);
      }
    }
  }
  return choose(state, scorer, set, cfg, mode, rng, inspected);
}

std::vector<ExecutableAction> axial_neighbors(const ExecutableAction& center, int radius,
                                              const ActionSpaceSpec& spec) {
  if (radius < 1) throw ParameterError("axial_neighbors: radius must be >= 1");
  std::vector<ExecutableAction> out;
  for (std::size_t d = 0; d < center.discrete.size(); ++d) {
    for (int step = -radius; step <= radius; ++step) {
      if (step == 0) continue;
      const int v = center.discrete[d] + step;
      if (v < spec.lower[d] || v > spec.upper[d]) continue;
      ExecutableAction a = center;
      a.discrete[d] = v;
      out.push_back(std::move(a));
    }
  }
  return out;
}

ExecutableAction axial_greedy_baseline(const Vec& state, const Mlp& actor,
                                       const ActionScorer& scorer, int steps,
                                       const ActionSpaceSpec& spec, double proto_noise,
                                       SelectionMode mode, Rng* rng) {
  if (steps < 1) throw ParameterError("axial greedy search needs at least one step");
  const Vec scaled = scale_proto(perturbed_proto(state, actor, proto_noise, mode, rng), spec);
  ExecutableAction current = nearest_neighbor(scaled, spec);
  double current_q = scorer(state, std::span<const ExecutableAction>(&current, 1))(0);
  for (int s = 0; s < steps; ++s) {
    const auto neighbors = axial_neighbors(current, 1, spec);
    if (neighbors.empty()) break;
    const Vec q = scorer(state, neighbors);
    Eigen::Index best = 0;
    for (Eigen::Index i = 1; i < q.size(); ++i) {
      if (q(i) > q(best)) best = i;
    }
    if (!(q(best) > current_q)) break;
    current = neighbors[static_cast<std::size_t>(best)];
    current_q = q(best);
  }
  return current;
}

ExecutableAction round_only_baseline(const Vec& state, const Mlp& actor,
                                     const ActionSpaceSpec& spec, double proto_noise,
                                     SelectionMode mode, Rng* rng) {
  return nearest_neighbor(scale_proto(perturbed_proto(state, actor, proto_noise, mode, rng), spec),
                          spec);
}

}  // namespace dgrl
