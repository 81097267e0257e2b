#include "dgrl/action_space.hpp"

#include "dgrl/errors.hpp"

#include <algorithm>
#include <cmath>

namespace dgrl {

Metric parse_metric(const std::string& name) {
  if (name == "chebyshev") return Metric::kChebyshev;
  if (name == "euclidean") return Metric::kEuclidean;
  if (name == "manhattan") return Metric::kManhattan;
  throw ParameterError("unknown metric '" + name + "'");
}

std::string to_string(Metric metric) {
  switch (metric) {
    case Metric::kEuclidean:
      return "euclidean";
    case Metric::kManhattan:
      return "manhattan";
    case Metric::kChebyshev:
      break;
  }
  return "chebyshev";
}

ActionSpaceSpec ActionSpaceSpec::uniform(int dims, int lo, int hi) {
  ActionSpaceSpec spec;
  spec.lower.assign(static_cast<std::size_t>(dims), lo);
  spec.upper.assign(static_cast<std::size_t>(dims), hi);
  spec.validate();
  return spec;
}

void ActionSpaceSpec::validate() const {
  if (lower.size() != upper.size()) throw ParameterError("discrete bound vectors differ in length");
  if (continuous_lower.size() != continuous_upper.size()) {
    throw ParameterError("continuous bound vectors differ in length");
  }
  if (total_dims() == 0) throw ParameterError("action space has no dimensions");
  for (std::size_t d = 0; d < lower.size(); ++d) {
    if (lower[d] > upper[d]) throw ParameterError("A_min > A_max in dim " + std::to_string(d));
  }
  for (std::size_t d = 0; d < continuous_lower.size(); ++d) {
    if (!(continuous_lower[d] <= continuous_upper[d])) {
      throw ParameterError("continuous lower > upper in dim " + std::to_string(d));
    }
  }
  if (!permutation.empty()) {
    if (permutation.size() != lower.size()) {
      throw ParameterError("permutation must cover every discrete dim");
    }
    for (std::size_t d = 0; d < permutation.size(); ++d) {
      std::vector<int> sorted = permutation[d];
      std::sort(sorted.begin(), sorted.end());
      const int width = upper[d] - lower[d] + 1;
      if (static_cast<int>(sorted.size()) != width) {
        throw ParameterError("permutation size mismatch in dim " + std::to_string(d));
      }
      for (int i = 0; i < width; ++i) {
        if (sorted[static_cast<std::size_t>(i)] != lower[d] + i) {
          throw ParameterError("permutation is not a bijection in dim " + std::to_string(d));
        }
      }
    }
  }
}

bool ActionSpaceSpec::contains(const ExecutableAction& action) const {
  if (static_cast<int>(action.discrete.size()) != discrete_dims() ||
      static_cast<int>(action.continuous.size()) != continuous_dims()) {
    return false;
  }
  for (std::size_t d = 0; d < lower.size(); ++d) {
    if (action.discrete[d] < lower[d] || action.discrete[d] > upper[d]) return false;
  }
  for (std::size_t d = 0; d < continuous_lower.size(); ++d) {
    const double v = action.continuous[d];
    if (!(v >= continuous_lower[d] && v <= continuous_upper[d])) return false;
  }
  return true;
}

int ActionSpaceSpec::semantic_value(int dim, int label) const {
  if (permutation.empty()) return label;
  const auto d = static_cast<std::size_t>(dim);
  return permutation[d][static_cast<std::size_t>(label - lower[d])];
}

double ActionSpaceSpec::log10_cardinality() const {
  double total = 0.0;
  for (std::size_t d = 0; d < lower.size(); ++d) {
    total += std::log10(static_cast<double>(upper[d] - lower[d] + 1));
  }
  return total;
}

Vec clip_proto(const Vec& proto) { return proto.cwiseMax(-1.0).cwiseMin(1.0); }

Vec scale_proto(const Vec& proto, const ActionSpaceSpec& spec) {
  if (proto.size() != spec.total_dims()) throw DimensionError("scale_proto: length mismatch");
  const Vec clipped = clip_proto(proto);
  Vec out(proto.size());
  const int n = spec.discrete_dims();
  for (int d = 0; d < n; ++d) {
    const double lo = spec.lower[static_cast<std::size_t>(d)];
    const double hi = spec.upper[static_cast<std::size_t>(d)];
    out(d) = (clipped(d) + 1.0) / 2.0 * (hi - lo) + lo;
  }
  for (int c = 0; c < spec.continuous_dims(); ++c) {
    const double lo = spec.continuous_lower[static_cast<std::size_t>(c)];
    const double hi = spec.continuous_upper[static_cast<std::size_t>(c)];
    out(n + c) = (clipped(n + c) + 1.0) / 2.0 * (hi - lo) + lo;
  }
  return out;
}

Vec unscale_action(const Vec& scaled, const ActionSpaceSpec& spec) {
  if (scaled.size() != spec.total_dims()) throw DimensionError("unscale_action: length mismatch");
  Vec out(scaled.size());
  const int n = spec.discrete_dims();
  auto inv = [](double v, double lo, double hi) {
    return hi > lo ? (v - lo) / (hi - lo) * 2.0 - 1.0 : 0.0;
  };
  for (int d = 0; d < n; ++d) {
    out(d) = inv(scaled(d), spec.lower[static_cast<std::size_t>(d)],
                 spec.upper[static_cast<std::size_t>(d)]);
  }
  for (int c = 0; c < spec.continuous_dims(); ++c) {
    out(n + c) = inv(scaled(n + c), spec.continuous_lower[static_cast<std::size_t>(c)],
                     spec.continuous_upper[static_cast<std::size_t>(c)]);
  }
  return out;
}

ExecutableAction nearest_neighbor(const Vec& scaled, const ActionSpaceSpec& spec) {
  if (scaled.size() != spec.total_dims()) throw DimensionError("nearest_neighbor: length mismatch");
  ExecutableAction a;
  const int n = spec.discrete_dims();
  a.discrete.resize(static_cast<std::size_t>(n));
  for (int d = 0; d < n; ++d) {
    const auto i = static_cast<std::size_t>(d);
    const double r = std::floor(scaled(d) + 0.5);
    a.discrete[i] = static_cast<int>(
        std::clamp(r, static_cast<double>(spec.lower[i]), static_cast<double>(spec.upper[i])));
  }
  a.continuous.resize(static_cast<std::size_t>(spec.continuous_dims()));
  for (int c = 0; c < spec.continuous_dims(); ++c) {
    const auto i = static_cast<std::size_t>(c);
    a.continuous[i] = std::clamp(scaled(n + c), spec.continuous_lower[i], spec.continuous_upper[i]);
  }
  return a;
}

Vec to_vector(const ExecutableAction& action) {
  Vec v(static_cast<Eigen::Index>(action.discrete.size() + action.continuous.size()));
  Eigen::Index k = 0;
  for (int x : action.discrete) v(k++) = x;
  for (double x : action.continuous) v(k++) = x;
  return v;
}

Vec normalize_action(const ExecutableAction& action, const ActionSpaceSpec& spec) {
  Vec v(spec.total_dims());
  const int n = spec.discrete_dims();
  for (int d = 0; d < n; ++d) {
    const auto i = static_cast<std::size_t>(d);
    const int width = spec.upper[i] - spec.lower[i];
    v(d) = width > 0 ? static_cast<double>(action.discrete[i] - spec.lower[i]) / width : 0.0;
  }
  for (int c = 0; c < spec.continuous_dims(); ++c) {
    const auto i = static_cast<std::size_t>(c);
    const double width = spec.continuous_upper[i] - spec.continuous_lower[i];
    v(n + c) = width > 0.0 ? (action.continuous[i] - spec.continuous_lower[i]) / width : 0.0;
  }
  return v;
}

double distance(const Vec& a, const Vec& b, Metric metric) {
  const Vec diff = a - b;
  switch (metric) {
    case Metric::kEuclidean:
      return diff.norm();
    case Metric::kManhattan:
      return diff.lpNorm<1>();
    case Metric::kChebyshev:
      break;
  }
  return diff.size() == 0 ? 0.0 : diff.lpNorm<Eigen::Infinity>();
}

ExecutableAction random_action(const ActionSpaceSpec& spec, Rng& rng) {
  ExecutableAction a;
  for (std::size_t d = 0; d < spec.lower.size(); ++d) {
    std::uniform_int_distribution<int> dist(spec.lower[d], spec.upper[d]);
    a.discrete.push_back(dist(rng));
  }
  for (std::size_t c = 0; c < spec.continuous_lower.size(); ++c) {
    std::uniform_real_distribution<double> dist(spec.continuous_lower[c], spec.continuous_upper[c]);
    a.continuous.push_back(dist(rng));
  }
  return a;
}

}  // namespace dgrl
