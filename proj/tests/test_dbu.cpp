#include "dgrl/dbu.hpp"
#include "dgrl/errors.hpp"

#include <gtest/gtest.h>

#include <array>
#include <cmath>

using namespace dgrl;

namespace {

std::vector<ExecutableAction> points(std::initializer_list<int> xs) {
  std::vector<ExecutableAction> out;
  for (int x : xs) out.push_back({{x}, {}});
  return out;
}

}  // namespace

TEST(Perturb, TinyNoiseGivesNearestNeighbor) {
  const auto spec = ActionSpaceSpec::uniform(3, 0, 10);
  DbuConfig cfg;
  cfg.perturbation_std = 1e-9;
  const Vec proto = (Vec(3) << 0.13, -0.42, 0.61).finished();
  Rng rng(1);
  const auto nn = nearest_neighbor(scale_proto(proto, spec), spec);
  for (const auto& a : perturb_candidates(proto, cfg, spec, rng)) EXPECT_EQ(a, nn);
}

TEST(Perturb, ReproducibleAndKeepsDuplicates) {
  const auto spec = ActionSpaceSpec::uniform(1, 0, 4);
  DbuConfig cfg;
  cfg.candidates = 50;
  Rng a(3);
  Rng b(3);
  const auto c1 = perturb_candidates(Vec::Zero(1), cfg, spec, a);
  EXPECT_EQ(c1, perturb_candidates(Vec::Zero(1), cfg, spec, b));
  EXPECT_EQ(c1.size(), 50u);
}

TEST(Perturb, MeanMatchesScaledProto) {
  const auto spec = ActionSpaceSpec::uniform(1, 0, 100);
  DbuConfig cfg;
  cfg.perturbation_std = 0.05;  // 2.5 action units
  cfg.candidates = 10000;
  const Vec proto = Vec::Constant(1, 0.1);  // scaled 55
  Rng rng(4);
  const auto c = perturb_candidates(proto, cfg, spec, rng);
  double mean = 0.0;
  double sq = 0.0;
  for (const auto& a : c) {
    mean += a.discrete[0];
    sq += a.discrete[0] * a.discrete[0];
  }
  mean /= c.size();
  const double sd = std::sqrt(sq / c.size() - mean * mean);
  // Round-half-up shifts the mean by +0.5 relative to round-to-nearest-even only on exact ties,
  // which have measure zero; the target is the scaled proto itself.
  EXPECT_NEAR(mean, 55.0, 3.0 * sd / std::sqrt(c.size()));
}

TEST(Perturb, StaysInBounds) {
  const auto spec = ActionSpaceSpec::uniform(2, 0, 3);
  DbuConfig cfg;
  cfg.perturbation_std = 3.0;
  cfg.candidates = 1000;
  Rng rng(5);
  for (const auto& a : perturb_candidates(Vec::Constant(2, 0.9), cfg, spec, rng)) {
    EXPECT_TRUE(spec.contains(a));
  }
}

TEST(DbuConfig, Validation) {
  DbuConfig cfg;
  cfg.candidates = 1;
  EXPECT_THROW(cfg.validate(), ParameterError);
  cfg = {};
  cfg.temperature = 0.0;
  EXPECT_THROW(cfg.validate(), ParameterError);
  cfg = {};
  cfg.perturbation_std = 0.0;
  EXPECT_THROW(cfg.validate(), ParameterError);
}

TEST(SoftmaxTarget, EqualValuesAverage) {
  const auto c = points({2, 4});
  const std::array<double, 2> q{0.7, 0.7};
  EXPECT_DOUBLE_EQ(softmax_target(c, q, 1.0)(0), 3.0);
}

TEST(SoftmaxTarget, TwoCandidatesHandComputed) {
  const auto c = points({2, 4});
  const std::array<double, 2> q{1.0, 0.0};
  const double w = std::exp(1.0) / (std::exp(1.0) + 1.0);
  EXPECT_NEAR(softmax_target(c, q, 1.0)(0), 2.0 * w + 4.0 * (1.0 - w), 1e-12);
  EXPECT_NEAR(softmax_target(c, q, 1.0)(0), 2.5379, 1e-4);
}

TEST(SoftmaxTarget, LowTemperatureSelectsArgmax) {
  const auto c = points({2, 4, 7});
  const std::array<double, 3> q{0.1, 0.3, 0.2};
  EXPECT_NEAR(softmax_target(c, q, 1e-4)(0), 4.0, 1e-12);
}

TEST(SoftmaxTarget, ShiftInvariant) {
  const auto c = points({1, 5, 9});
  const std::array<double, 3> q{0.3, -1.0, 2.0};
  const std::array<double, 3> shifted{1000.3, 999.0, 1002.0};
  EXPECT_NEAR(softmax_target(c, q, 0.7)(0), softmax_target(c, shifted, 0.7)(0), 1e-12);
}

TEST(SoftmaxTarget, ConvexHullOnRandomInputs) {
  Rng rng(6);
  std::uniform_int_distribution<int> coord(0, 50);
  std::uniform_int_distribution<int> count(2, 12);
  std::normal_distribution<double> q(0.0, 5.0);
  std::uniform_real_distribution<double> tau(0.01, 10.0);
  for (int t = 0; t < 10000; ++t) {
    const int m = count(rng);
    std::vector<ExecutableAction> c;
    std::vector<double> values;
    for (int i = 0; i < m; ++i) {
      c.push_back({{coord(rng), coord(rng), coord(rng)}, {}});
      values.push_back(q(rng));
    }
    const Vec target = softmax_target(c, values, tau(rng));
    for (int d = 0; d < 3; ++d) {
      int lo = 1000;
      int hi = -1000;
      for (const auto& a : c) {
        lo = std::min(lo, a.discrete[static_cast<std::size_t>(d)]);
        hi = std::max(hi, a.discrete[static_cast<std::size_t>(d)]);
      }
      ASSERT_GE(target(d), lo - 1e-12);
      ASSERT_LE(target(d), hi + 1e-12);
    }
  }
}

TEST(SoftmaxTarget, RejectsNonFinite) {
  const auto c = points({2, 4});
  const std::array<double, 2> q{1.0, std::nan("")};
  EXPECT_THROW(softmax_target(c, q, 1.0), NumericError);
}

TEST(HybridLoss, ExactAdditivity) {
  Rng rng(7);
  std::normal_distribution<double> g(0.0, 2.0);
  for (DistanceLoss kind : {DistanceLoss::kHuber, DistanceLoss::kSquared}) {
    DbuConfig cfg;
    cfg.loss = kind;
    for (int t = 0; t < 1000; ++t) {
      Vec pred(5);
      Vec target(5);
      for (int i = 0; i < 5; ++i) {
        pred(i) = g(rng);
        target(i) = g(rng);
      }
      const HybridLoss split = hybrid_distance_loss(pred, target, 3, cfg);
      const double joint = distance_loss(pred, target, cfg).loss;
      EXPECT_NEAR(split.total, joint, 1e-12);
      EXPECT_DOUBLE_EQ(split.total, split.discrete + split.continuous);
    }
  }
}

TEST(ActorUpdate, FixedPointLeavesParameters) {
  LayerStack layers{{Mat::Constant(1, 1, 0.5), Vec::Constant(1, 0.1)}};
  Mlp actor = Mlp::from_layers(layers, Activation::kRelu, Activation::kIdentity);
  AdamState opt = AdamState::for_params(actor.layers(), 0.01);
  const std::vector<Vec> states{Vec::Constant(1, 1.0)};
  const std::vector<Vec> targets{Vec::Constant(1, 0.6)};
  EXPECT_DOUBLE_EQ(dbu_actor_update(actor, opt, states, targets, {}), 0.0);
  EXPECT_DOUBLE_EQ(actor.layers()[0].weight(0, 0), 0.5);
  EXPECT_DOUBLE_EQ(actor.layers()[0].bias(0), 0.1);
}

TEST(ActorUpdate, LinearActorMovesTowardTarget) {
  LayerStack layers{{Mat::Constant(1, 1, 0.5), Vec::Zero(1)}};
  Mlp actor = Mlp::from_layers(layers, Activation::kRelu, Activation::kIdentity);
  AdamState opt = AdamState::for_params(actor.layers(), 1e-3);
  const Vec s = Vec::Constant(1, 1.0);
  const std::vector<Vec> states{s};
  const std::vector<Vec> targets{Vec::Constant(1, -0.4)};
  double gap = std::abs(actor.forward(s)(0) + 0.4);
  for (int step = 0; step < 20; ++step) {
    dbu_actor_update(actor, opt, states, targets, {});
    const double next = std::abs(actor.forward(s)(0) + 0.4);
    EXPECT_LT(next, gap);
    gap = next;
  }
}

TEST(ActorUpdate, LossGradientMatchesFiniteDifference) {
  DbuConfig cfg;
  const Vec target = (Vec(3) << 0.2, -0.5, 1.7).finished();
  for (DistanceLoss kind : {DistanceLoss::kHuber, DistanceLoss::kSquared}) {
    cfg.loss = kind;
    const Vec pred = (Vec(3) << 0.9, -0.45, -0.3).finished();
    const LossResult l = distance_loss(pred, target, cfg);
    for (int i = 0; i < 3; ++i) {
      Vec up = pred;
      Vec down = pred;
      up(i) += 1e-6;
      down(i) -= 1e-6;
      const double fd = (distance_loss(up, target, cfg).loss - distance_loss(down, target, cfg).loss) / 2e-6;
      EXPECT_NEAR(l.grad(i), fd, 1e-4 * std::max(1.0, std::abs(fd)));
    }
  }
}

TEST(BuildTarget, ReturnsActorFrameWithinBounds) {
  const auto spec = ActionSpaceSpec::uniform(2, 0, 16);
  Rng init(8);
  const std::array<int, 3> sizes{3, 8, 2};
  const Mlp actor(sizes, Activation::kRelu, Activation::kTanh, init);
  const ActionScorer scorer = [](const Vec&, std::span<const ExecutableAction> c) {
    Vec q(static_cast<Eigen::Index>(c.size()));
    for (std::size_t i = 0; i < c.size(); ++i) q(static_cast<Eigen::Index>(i)) = c[i].discrete[0];
    return q;
  };
  Rng rng(9);
  for (int t = 0; t < 100; ++t) {
    const Vec target = build_dbu_target(Vec::Constant(3, 0.2), actor, scorer, {}, spec, rng);
    EXPECT_LE(target.cwiseAbs().maxCoeff(), 1.0);
  }
}

TEST(VarianceProbe, DeterministicTargetsHaveZeroVariance) {
  Rng init(10);
  const std::array<int, 3> sizes{2, 8, 2};
  const Mlp actor(sizes, Activation::kTanh, Activation::kTanh, init);
  DbuConfig cfg;
  cfg.perturbation_std = 1e-12;
  const NormalizedCritic critic = [](const Vec& a) { return -a.squaredNorm(); };
  const std::array<int, 2> sizes_m{5, 17};
  const auto probe = dbu_gradient_variance_probe(Vec::Constant(2, 0.3), actor, critic, cfg, 2, sizes_m, 50, 1);
  for (double v : probe.dbu_variance) EXPECT_NEAR(v, 0.0, 1e-20);
}

TEST(VarianceProbe, FlatAcrossCardinality) {
  Rng init(11);
  const std::array<int, 3> sizes{2, 8, 2};
  const Mlp actor(sizes, Activation::kTanh, Activation::kTanh, init);
  DbuConfig cfg;
  cfg.perturbation_std = 0.3;
  cfg.temperature = 0.1;
  const NormalizedCritic critic = [](const Vec& a) {
    return -4.0 * ((a(0) - 0.65) * (a(0) - 0.65) + (a(1) - 0.4) * (a(1) - 0.4));
  };
  const std::array<int, 3> sizes_m{5, 17, 65};
  const auto probe = dbu_gradient_variance_probe(Vec::Constant(2, 0.5), actor, critic, cfg, 2, sizes_m, 4000, 2);
  const auto [lo, hi] = std::minmax_element(probe.dbu_variance.begin(), probe.dbu_variance.end());
  EXPECT_LE(*hi / *lo, 3.0);
  EXPECT_LT(probe.score_function_variance[0], probe.score_function_variance[1]);
  EXPECT_LT(probe.score_function_variance[1], probe.score_function_variance[2]);
}

TEST(VarianceProbe, StandardErrorShrinksWithTrials) {
  Rng init(12);
  const std::array<int, 3> sizes{2, 8, 2};
  const Mlp actor(sizes, Activation::kTanh, Activation::kTanh, init);
  DbuConfig cfg;
  cfg.perturbation_std = 0.3;
  const NormalizedCritic critic = [](const Vec& a) { return -a.squaredNorm(); };
  const std::array<int, 1> m{17};
  const auto spread = [&](int trials) {
    std::vector<double> v;
    for (std::uint64_t s = 0; s < 30; ++s) {
      v.push_back(dbu_gradient_variance_probe(Vec::Constant(2, 0.5), actor, critic, cfg, 2, m, trials, s)
                      .dbu_variance[0]);
    }
    double mean = 0.0;
    for (double x : v) mean += x / v.size();
    double var = 0.0;
    for (double x : v) var += (x - mean) * (x - mean) / (v.size() - 1);
    return std::sqrt(var);
  };
  const double ratio = spread(200) / spread(800);
  // Quadrupling the trials should halve the spread; allow generous sampling noise.
  EXPECT_GT(ratio, 1.4);
  EXPECT_LT(ratio, 2.9);
}
