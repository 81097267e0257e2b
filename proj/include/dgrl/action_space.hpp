#pragma once

#include "dgrl/nn.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace dgrl {

enum class Metric { kChebyshev, kEuclidean, kManhattan };

Metric parse_metric(const std::string& name);
std::string to_string(Metric metric);

/// Integer vector (discrete part) plus optional real vector (continuous part).
struct ExecutableAction {
  std::vector<int> discrete;
  std::vector<double> continuous;

  bool operator==(const ExecutableAction&) const = default;
  auto operator<=>(const ExecutableAction&) const = default;
};

/// Bounds and structure of a (possibly hybrid) multivariate action space.
struct ActionSpaceSpec {
  std::vector<int> lower;  // per discrete dim, inclusive
  std::vector<int> upper;
  std::vector<double> continuous_lower;
  std::vector<double> continuous_upper;
  // Optional relabeling per discrete dim: permutation[d][label - lower[d]] is the
  // semantic value the environment executes. Empty means identity.
  std::vector<std::vector<int>> permutation;
  Metric metric = Metric::kChebyshev;

  static ActionSpaceSpec uniform(int dims, int lo, int hi);

  int discrete_dims() const { return static_cast<int>(lower.size()); }
  int continuous_dims() const { return static_cast<int>(continuous_lower.size()); }
  int total_dims() const { return discrete_dims() + continuous_dims(); }

  /// Throws ParameterError on inconsistent bounds or a non-bijective permutation.
  void validate() const;
  bool contains(const ExecutableAction& action) const;

  /// Semantic value of `label` in discrete dim `dim` after the permutation.
  int semantic_value(int dim, int label) const;

  /// log10 of the number of discrete actions.
  double log10_cardinality() const;
};

/// Clips each entry of an actor output to [-1, 1].
Vec clip_proto(const Vec& proto);

/// Affine map from the actor range [-1, 1] to the action bounds, discrete dims
/// first, continuous dims after. Entries are clipped to [-1, 1] first.
Vec scale_proto(const Vec& proto, const ActionSpaceSpec& spec);

/// Inverse of scale_proto: action-space coordinates back to [-1, 1].
/// Degenerate dimensions map to 0.
Vec unscale_action(const Vec& scaled, const ActionSpaceSpec& spec);

/// Round-half-up per discrete dim, clipped to bounds; continuous dims clipped.
ExecutableAction nearest_neighbor(const Vec& scaled, const ActionSpaceSpec& spec);

/// Action as a real vector in action-space coordinates.
Vec to_vector(const ExecutableAction& action);

/// Action rescaled to [0, 1] per dim, the representation the critic consumes.
Vec normalize_action(const ExecutableAction& action, const ActionSpaceSpec& spec);

/// Distance in the given metric between two real vectors.
double distance(const Vec& a, const Vec& b, Metric metric);

/// Uniformly random valid action.
ExecutableAction random_action(const ActionSpaceSpec& spec, Rng& rng);

}  // namespace dgrl
