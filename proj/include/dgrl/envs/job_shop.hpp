#pragma once

// Jobs allocated to N machines whose per-job energy cost (wear) drifts with
// utilization.

#include "dgrl/envs/environment.hpp"

#include <cstdint>
#include <span>

namespace dgrl {

struct JobShopConfig {
  int machines = 10;
  int capacity = 10;          // L, max jobs per machine
  double job_reward = 2.0;    // p
  double energy_cap = 100.0;  // M
  double max_wear = 10.0;
  double initial_wear = 1.0;
  double wear_up_lo = 0.05, wear_up_hi = 0.4;
  double repair_lo = 0.05, repair_hi = 0.4;
  double high_utilization = 0.75;
  double low_utilization = 0.5;
  int max_steps = 100;

  void validate() const;
};

/// sum_i (a_i p - min(a_i (1 + w_i), M)) - std(a), population std.
double job_shop_reward(std::span<const int> allocation, const Vec& wear, const JobShopConfig& cfg);

class JobShop : public Environment {
 public:
  explicit JobShop(JobShopConfig cfg, std::uint64_t seed = 0);

  Vec reset() override;
  StepResult step(const ExecutableAction& action) override;
  void seed(std::uint64_t seed) override { rng_.seed(seed); }
  std::unique_ptr<Environment> clone() const override { return std::make_unique<JobShop>(*this); }

  const ActionSpaceSpec& action_space() const override { return spec_; }
  int observation_dim() const override { return cfg_.machines; }
  int horizon() const override { return cfg_.max_steps; }
  EnvTraits traits() const override;

  const Vec& wear() const { return wear_; }
  void set_wear(const Vec& wear);

 private:
  Vec observe() const;

  JobShopConfig cfg_;
  ActionSpaceSpec spec_;
  Rng rng_;
  Vec wear_;
  int steps_ = 0;
};

}  // namespace dgrl
