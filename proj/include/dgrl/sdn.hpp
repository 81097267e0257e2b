#pragma once

// Sampled dynamic neighborhoods: candidate discrete actions drawn coordinate by
// coordinate inside a radius-L box around the scaled proto-action, scored by the
// critic. Also hosts the axial-greedy and round-only baselines.

#include "dgrl/action_space.hpp"
#include "dgrl/nn.hpp"

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace dgrl {

enum class SamplingScheme { kLinear, kSoftmax };
enum class SelectionMode { kTrain, kEval };

struct SdnConfig {
  int radius = 1;                      // L
  int samples = 10;                    // K
  double sampling_temperature = 1.0;   // tau_s
  double exploration_temperature = 0.8;  // tau_e, rank-based selection
  double proto_noise = 0.0;            // sigma_f, actor-output frame
  SamplingScheme scheme = SamplingScheme::kLinear;

  void validate() const;
};

struct CoordinateOptions {
  std::vector<int> values;
  std::vector<double> probabilities;
};

/// Integers z in [lo, hi] with |z - coord| <= radius, weighted by
/// radius - |z - coord| + temperature (linear) or exp(-|z - coord| / temperature)
/// (softmax), normalized.
CoordinateOptions coordinate_options(double coord, int radius, int lo, int hi, double temperature,
                                     SamplingScheme scheme = SamplingScheme::kLinear);

/// Per-dimension options for the discrete part of a scaled proto-action.
std::vector<CoordinateOptions> neighborhood_options(const Vec& scaled, const SdnConfig& cfg,
                                                    const ActionSpaceSpec& spec);

/// One draw of the product distribution over the per-dimension options.
std::vector<int> sample_coordinates(std::span<const CoordinateOptions> options, Rng& rng);

struct CandidateSet {
  std::vector<ExecutableAction> actions;
  std::vector<double> q_values;
};

/// Draws 2K candidates, drops duplicates (and, for non-Chebyshev metrics, points
/// outside the metric ball), keeps the first K and puts the nearest neighbor
/// first when it is not already present. Continuous dims carry the clipped proto.
CandidateSet sample_neighborhood(const Vec& scaled, const SdnConfig& cfg,
                                 const ActionSpaceSpec& spec, Rng& rng);

/// p(i) proportional to tau_e^rank(i), rank 0 = highest Q; ties go to the lower index.
std::vector<double> rank_probabilities(std::span<const double> q_values, double tau_e);
std::size_t rank_selection(std::span<const double> q_values, double tau_e, Rng& rng);

/// First index of the maximum.
std::size_t argmax_first(std::span<const double> values);

/// Scores candidate actions for a state (e.g. min of two critics).
using ActionScorer =
    std::function<Vec(const Vec& state, std::span<const ExecutableAction> candidates)>;

/// Actor output (plus Gaussian noise in train mode), clipped and scaled.
Vec scaled_proto_action(const Vec& state, const Mlp& actor, const ActionSpaceSpec& spec,
                        double proto_noise, SelectionMode mode, Rng& rng);

/// Full selection path: proto, neighborhood, critic scoring, argmax (eval) or
/// rank-based draw (train).
ExecutableAction sdn_select(const Vec& state, const Mlp& actor, const ActionScorer& scorer,
                            const SdnConfig& cfg, const ActionSpaceSpec& spec,
                            SelectionMode mode, Rng& rng, CandidateSet* inspected = nullptr);

/// sdn_select for hybrid spaces: each candidate's continuous part is the scaled
/// continuous proto plus N(0, continuous_noise) in action units, clipped to bounds.
ExecutableAction hybrid_select(const Vec& state, const Mlp& actor, const ActionScorer& scorer,
                               const SdnConfig& cfg, const ActionSpaceSpec& spec,
                               double continuous_noise, SelectionMode mode, Rng& rng,
                               CandidateSet* inspected = nullptr);

/// Points reached from `center` by moving a single coordinate by 1..radius,
/// within bounds. The center itself is not included.
std::vector<ExecutableAction> axial_neighbors(const ExecutableAction& center, int radius,
                                              const ActionSpaceSpec& spec);

/// Greedy hill climbing over single-coordinate +-1 moves starting from the
/// nearest neighbor of the proto-action; at most `steps` moves.
ExecutableAction axial_greedy_baseline(const Vec& state, const Mlp& actor,
                                       const ActionScorer& scorer, int steps,
                                       const ActionSpaceSpec& spec, double proto_noise = 0.0,
                                       SelectionMode mode = SelectionMode::kEval,
                                       Rng* rng = nullptr);

/// Scale and round; no critic involved.
ExecutableAction round_only_baseline(const Vec& state, const Mlp& actor,
                                     const ActionSpaceSpec& spec, double proto_noise = 0.0,
                                     SelectionMode mode = SelectionMode::kEval,
                                     Rng* rng = nullptr);

}  // namespace dgrl
