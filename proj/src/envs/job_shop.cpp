#include "dgrl/envs/job_shop.hpp"

#include "dgrl/errors.hpp"

#include <algorithm>
#include <cmath>

namespace dgrl {

void JobShopConfig::validate() const {
  if (machines < 1 || capacity < 1) throw ParameterError("job shop needs machines and capacity >= 1");
  if (!(max_wear > 0.0) || initial_wear < 0.0 || initial_wear > max_wear) {
    throw ParameterError("job shop wear bounds are inconsistent");
  }
  if (wear_up_lo > wear_up_hi || repair_lo > repair_hi) {
    throw ParameterError("job shop wear increments are inconsistent");
  }
  if (max_steps < 1) throw ParameterError("job shop max_steps must be >= 1");
}

double job_shop_reward(std::span<const int> allocation, const Vec& wear, const JobShopConfig& cfg) {
  if (static_cast<Eigen::Index>(allocation.size()) != wear.size()) {
    throw DimensionError("job shop: allocation and wear lengths differ");
  }
  double reward = 0.0;
  double mean = 0.0;
  for (std::size_t i = 0; i < allocation.size(); ++i) {
    if (allocation[i] < 0) throw ActionError("job shop: negative allocation");
    const double a = allocation[i];
    reward += a * cfg.job_reward - std::min(a * (1.0 + wear(static_cast<Eigen::Index>(i))), cfg.energy_cap);
    mean += a;
  }
  mean /= static_cast<double>(allocation.size());
  double var = 0.0;
  for (int a : allocation) var += (a - mean) * (a - mean);
  var /= static_cast<double>(allocation.size());
  return reward - std::sqrt(var);
}

JobShop::JobShop(JobShopConfig cfg, std::uint64_t seed) : cfg_(cfg), rng_(seed) {
  cfg_.validate();
  spec_ = ActionSpaceSpec::uniform(cfg_.machines, 0, cfg_.capacity);
  wear_ = Vec::Constant(cfg_.machines, cfg_.initial_wear);
}

Vec JobShop::observe() const { return wear_ / cfg_.max_wear; }

Vec JobShop::reset() {
  wear_ = Vec::Constant(cfg_.machines, cfg_.initial_wear);
  steps_ = 0;
  return observe();
}

void JobShop::set_wear(const Vec& wear) {
  if (wear.size() != cfg_.machines) throw DimensionError("job shop: wear length mismatch");
  wear_ = wear.cwiseMax(0.0).cwiseMin(cfg_.max_wear);
}

StepResult JobShop::step(const ExecutableAction& action) {
  for (int a : action.discrete) {
    if (a < 0) throw ActionError("job shop: negative allocation");
  }
  check_action(action, spec_);
  StepResult out;
  out.reward = job_shop_reward(action.discrete, wear_, cfg_);
  std::uniform_real_distribution<double> up(cfg_.wear_up_lo, cfg_.wear_up_hi);
  std::uniform_real_distribution<double> down(cfg_.repair_lo, cfg_.repair_hi);
  for (int i = 0; i < cfg_.machines; ++i) {
    const double utilization = static_cast<double>(action.discrete[static_cast<std::size_t>(i)]) / cfg_.capacity;
    if (utilization > cfg_.high_utilization) {
      wear_(i) += up(rng_);
    } else if (utilization < cfg_.low_utilization) {
      wear_(i) -= down(rng_);
    }
    wear_(i) = std::clamp(wear_(i), 0.0, cfg_.max_wear);
  }
  ++steps_;
  out.observation = observe();
  out.truncated = steps_ >= cfg_.max_steps;
  return out;
}

EnvTraits JobShop::traits() const { return {"job_shop", true, false, false}; }

}  // namespace dgrl
