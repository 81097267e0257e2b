#include "dgrl/theory_checks.hpp"

#include "dgrl/action_space.hpp"
#include "dgrl/dbu.hpp"
#include "dgrl/errors.hpp"
#include "dgrl/sdn.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <set>
#include <sstream>

namespace dgrl {

namespace {

std::string fmt(double v) {
  std::ostringstream out;
  out << v;
  return out.str();
}

// Coordinate options where the point of interest has sampling mass p (L = 1).
// Returns the options and the index of that point.
std::pair<CoordinateOptions, std::size_t> options_with_mass(double p) {
  if (!(p > 0.0 && p <= 1.0)) throw ParameterError("p must lie in (0, 1]");
  if (p == 1.0) return {coordinate_options(0.0, 1, 0, 0, 1.0), 0};
  const double third = 1.0 / 3.0;
  if (std::abs(p - third) < 1e-12) return {coordinate_options(1.0, 1, 0, 2, 1e12), 1};
  if (p > third) {
    // center weight (1 + tau) over total 1 + 3 tau
    const double tau = (1.0 - p) / (3.0 * p - 1.0);
    return {coordinate_options(1.0, 1, 0, 2, tau), 1};
  }
  // side weight tau over total 1 + 3 tau
  const double tau = p / (1.0 - 3.0 * p);
  return {coordinate_options(1.0, 1, 0, 2, tau), 2};
}

double miss_rate(const CoordinateOptions& opts, std::size_t target, int samples, int trials,
                 Rng& rng) {
  const std::array<CoordinateOptions, 1> one{opts};
  const int goal = opts.values[target];
  int misses = 0;
  for (int t = 0; t < trials; ++t) {
    bool hit = false;
    for (int k = 0; k < samples && !hit; ++k) hit = sample_coordinates(one, rng)[0] == goal;
    if (!hit) ++misses;
  }
  return static_cast<double>(misses) / trials;
}

}  // namespace

double corner_radius(std::span<const double> half_widths) {
  double s = 0.0;
  for (double e : half_widths) s += e * e;
  return std::sqrt(s);
}

CheckReport check_chebyshev_invariance(std::span<const int> dims, int radius, int draws,
                                       std::uint64_t seed) {
  if (dims.empty() || radius < 1 || draws < 1) throw ParameterError("chebyshev check: bad arguments");
  CheckReport rep;
  rep.name = "chebyshev_invariance";
  rep.expected = 0.0;
  rep.tolerance = 0.05;
  bool linf_ok = true;
  bool l2_monotone = true;
  double worst = 0.0;
  double prev_l2 = -1.0;
  std::ostringstream detail;
  for (int n : dims) {
    if (n < 1) throw ParameterError("chebyshev check: dims must be >= 1");
    ActionSpaceSpec spec = ActionSpaceSpec::uniform(n, 0, 4 * radius);
    const Vec center = Vec::Constant(n, 2.0 * radius);
    SdnConfig cfg;
    cfg.radius = radius;
    cfg.samples = 10 * radius;
    Rng rng(seed + static_cast<std::uint64_t>(n));
    double max_linf = 0.0;
    double max_l2 = 0.0;
    std::vector<double> half(static_cast<std::size_t>(n), 0.0);
    for (int i = 0; i < draws; ++i) {
      for (const auto& a : sample_neighborhood(center, cfg, spec, rng).actions) {
        const Vec off = to_vector(a) - center;
        max_linf = std::max(max_linf, off.cwiseAbs().maxCoeff());
        max_l2 = std::max(max_l2, off.norm());
        for (int d = 0; d < n; ++d) {
          half[static_cast<std::size_t>(d)] = std::max(half[static_cast<std::size_t>(d)], std::abs(off(d)));
        }
      }
    }
    const double corner = corner_radius(half);
    const double law = radius * std::sqrt(static_cast<double>(n));
    const double rel = std::abs(corner / law - 1.0);
    worst = std::max(worst, rel);
    linf_ok = linf_ok && max_linf == radius;
    if (max_l2 <= prev_l2 && prev_l2 >= 0.0) l2_monotone = false;
    prev_l2 = max_l2;
    detail << "N=" << n << " max_linf=" << max_linf << " max_l2=" << fmt(max_l2)
           << " corner=" << fmt(corner) << " law=" << fmt(law) << "; ";
  }
  rep.measured = worst;
  rep.passed = linf_ok && l2_monotone && worst <= rep.tolerance;
  detail << "linf_equals_L=" << linf_ok << " l2_monotone=" << l2_monotone;
  rep.detail = detail.str();
  return rep;
}

CheckReport check_consistency(double p, int samples, int trials, std::uint64_t seed) {
  if (samples < 1 || trials < 1) throw ParameterError("consistency check: bad arguments");
  const auto [opts, target] = options_with_mass(p);
  Rng rng(seed);
  CheckReport rep;
  rep.name = "consistency";
  rep.expected = std::pow(1.0 - p, samples);
  rep.measured = miss_rate(opts, target, samples, trials, rng);
  const double se = std::sqrt(rep.expected * (1.0 - rep.expected) / trials);
  rep.tolerance = 3.0 * se;
  rep.passed = std::abs(rep.measured - rep.expected) <= rep.tolerance;
  rep.detail = "p=" + fmt(p) + " K=" + std::to_string(samples) + " trials=" + std::to_string(trials) +
               " sampled_mass=" + fmt(opts.probabilities[target]);
  return rep;
}

CheckReport check_finite_sample(double p, double delta, int trials, std::uint64_t seed) {
  if (!(delta > 0.0 && delta < 1.0)) throw ParameterError("finite-sample check: delta in (0, 1)");
  const int k = static_cast<int>(std::ceil(std::log(1.0 / delta) / p));
  const auto [opts, target] = options_with_mass(p);
  Rng rng(seed);
  CheckReport rep;
  rep.name = "finite_sample";
  rep.measured = 1.0 - miss_rate(opts, target, k, trials, rng);
  rep.expected = 1.0 - delta;
  rep.tolerance = 3.0 * std::sqrt(delta * (1.0 - delta) / trials);
  rep.passed = rep.measured >= rep.expected - rep.tolerance;
  rep.detail = "p=" + fmt(p) + " delta=" + fmt(delta) + " K=" + std::to_string(k);
  return rep;
}

CheckReport check_support_coverage(int dims, int radius, int samples, std::uint64_t seed) {
  if (dims < 1 || radius < 1 || samples < 1) throw ParameterError("coverage check: bad arguments");
  const ActionSpaceSpec spec = ActionSpaceSpec::uniform(dims, 0, 2 * radius);
  SdnConfig cfg;
  cfg.radius = radius;
  cfg.samples = samples;
  Rng rng(seed);
  const Vec center = Vec::Constant(dims, radius);
  const auto set = sample_neighborhood(center, cfg, spec, rng);
  std::set<std::vector<int>> volumetric;
  for (const auto& a : set.actions) volumetric.insert(a.discrete);

  const ExecutableAction c{std::vector<int>(static_cast<std::size_t>(dims), radius), {}};
  std::set<std::vector<int>> axial{c.discrete};
  for (const auto& a : axial_neighbors(c, radius, spec)) axial.insert(a.discrete);

  CheckReport rep;
  rep.name = "support_coverage";
  rep.measured = static_cast<double>(volumetric.size());
  rep.expected = std::pow(2.0 * radius + 1.0, dims);
  rep.tolerance = 0.0;
  const auto axial_expected = static_cast<std::size_t>(2 * dims * radius + 1);
  rep.passed = rep.measured == rep.expected && axial.size() == axial_expected;
  rep.detail = "volumetric=" + std::to_string(volumetric.size()) + " axial=" +
               std::to_string(axial.size()) + " axial_expected=" + std::to_string(axial_expected);
  return rep;
}

CheckReport check_variance_cardinality(std::span<const int> per_dim_sizes, int trials,
                                       std::uint64_t seed) {
  if (per_dim_sizes.empty()) throw ParameterError("variance check: no sizes");
  Rng init(seed);
  const std::array<int, 3> sizes{2, 8, 2};
  const Mlp actor(sizes, Activation::kTanh, Activation::kTanh, init);
  const Vec state{{0.3, 0.7}};
  const Vec goal{{0.65, 0.4}};
  const NormalizedCritic critic = [goal](const Vec& a) { return -4.0 * (a - goal).squaredNorm(); };
  DbuConfig cfg;
  cfg.perturbation_std = 0.3;
  cfg.candidates = 10;
  cfg.temperature = 0.1;
  const VarianceProbe probe =
      dbu_gradient_variance_probe(state, actor, critic, cfg, 2, per_dim_sizes, trials, seed + 1);

  const auto [lo, hi] = std::minmax_element(probe.dbu_variance.begin(), probe.dbu_variance.end());
  bool sf_grows = true;
  std::ostringstream detail;
  for (std::size_t i = 0; i < probe.sizes.size(); ++i) {
    if (i > 0 && probe.score_function_variance[i] <= probe.score_function_variance[i - 1]) sf_grows = false;
    detail << "m=" << probe.sizes[i] << " dbu=" << fmt(probe.dbu_variance[i])
           << " score_function=" << fmt(probe.score_function_variance[i]) << "; ";
  }
  const double sf_ratio = probe.score_function_variance.back() / probe.score_function_variance.front();
  CheckReport rep;
  rep.name = "variance_cardinality";
  rep.measured = *lo > 0.0 ? *hi / *lo : (*hi == 0.0 ? 1.0 : INFINITY);
  rep.expected = 1.0;
  rep.tolerance = 3.0;
  rep.passed = rep.measured <= rep.tolerance && sf_grows;
  detail << "score_function_ratio=" << fmt(sf_ratio) << " score_function_grows=" << sf_grows;
  rep.detail = detail.str();
  return rep;
}

std::vector<CheckReport> run_theory_suite(std::uint64_t seed, int trials) {
  const std::array<int, 3> dims{2, 10, 50};
  const std::array<int, 3> sizes{5, 17, 65};
  return {check_chebyshev_invariance(dims, 1, 2000, seed),
          check_consistency(0.5, 4, trials, seed),
          check_finite_sample(0.25, 0.1, trials, seed),
          check_support_coverage(2, 1, 1000, seed),
          check_variance_cardinality(sizes, trials, seed)};
}

std::vector<std::string> unchecked_properties() {
  return {"Lipschitz bound of the critic along the SDN ball (bound in expectation)",
          "monotone policy improvement of the distance-based update (covered by learning curves)",
          "regret floor of hybrid decomposition (covered by learning curves)"};
}

}  // namespace dgrl
