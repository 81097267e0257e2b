#pragma once

// Joint replenishment: order-up-to levels per item, instant delivery, Poisson
// demand, backorders carried as negative stock.

#include "dgrl/envs/environment.hpp"

#include <cstdint>
#include <span>
#include <vector>

namespace dgrl {

struct InventoryConfig {
  int items = 20;
  double holding = 1.0;     // h
  double backorder = 19.0;  // b
  double ordering = 10.0;   // o, per item ordered
  double joint = 75.0;      // O, once per period with any order
  bool ordering_per_unit = false;  // o * q_i instead of o * [q_i > 0]
  int max_level = 66;
  double low_rate = 10.0;   // first half of the items
  double high_rate = 20.0;  // second half
  int initial_level = 25;
  int max_steps = 100;
  // Observation window for the stock level: (I + offset) / span, clamped.
  int obs_offset = 100;
  int obs_span = 166;

  void validate() const;
};

/// Period cost given the stock after demand and the order quantities.
double inventory_cost(std::span<const int> stock, std::span<const int> orders,
                      const InventoryConfig& cfg);

class Inventory : public Environment {
 public:
  explicit Inventory(InventoryConfig cfg, std::uint64_t seed = 0);

  Vec reset() override;
  StepResult step(const ExecutableAction& action) override;
  void seed(std::uint64_t seed) override { rng_.seed(seed); }
  std::unique_ptr<Environment> clone() const override { return std::make_unique<Inventory>(*this); }

  const ActionSpaceSpec& action_space() const override { return spec_; }
  int observation_dim() const override { return cfg_.items; }
  int horizon() const override { return cfg_.max_steps; }
  EnvTraits traits() const override;

  const std::vector<int>& stock() const { return stock_; }
  void set_stock(std::vector<int> stock);
  double demand_rate(int item) const;
  const InventoryConfig& config() const { return cfg_; }

 private:
  Vec observe() const;

  InventoryConfig cfg_;
  ActionSpaceSpec spec_;
  Rng rng_;
  std::vector<int> stock_;
  int steps_ = 0;
};

}  // namespace dgrl
