#include "dgrl/envs/inventory.hpp"

#include "dgrl/errors.hpp"

#include <algorithm>

namespace dgrl {

void InventoryConfig::validate() const {
  if (items < 1) throw ParameterError("inventory needs at least one item");
  if (max_level < 0) throw ParameterError("inventory max level must be >= 0");
  if (!(low_rate >= 0.0) || !(high_rate >= 0.0)) throw ParameterError("demand rates must be >= 0");
  if (max_steps < 1) throw ParameterError("inventory max_steps must be >= 1");
  if (obs_span < 1) throw ParameterError("inventory observation span must be >= 1");
}

double inventory_cost(std::span<const int> stock, std::span<const int> orders,
                      const InventoryConfig& cfg) {
  if (stock.size() != orders.size()) throw DimensionError("inventory: stock and orders differ");
  double cost = 0.0;
  bool any = false;
  for (std::size_t i = 0; i < stock.size(); ++i) {
    cost += cfg.holding * std::max(stock[i], 0) + cfg.backorder * std::max(-stock[i], 0);
    if (orders[i] > 0) {
      cost += cfg.ordering_per_unit ? cfg.ordering * orders[i] : cfg.ordering;
      any = true;
    }
  }
  if (any) cost += cfg.joint;
  return cost;
}

Inventory::Inventory(InventoryConfig cfg, std::uint64_t seed) : cfg_(cfg), rng_(seed) {
  cfg_.validate();
  spec_ = ActionSpaceSpec::uniform(cfg_.items, 0, cfg_.max_level);
  stock_.assign(static_cast<std::size_t>(cfg_.items), cfg_.initial_level);
}

double Inventory::demand_rate(int item) const {
  return item < cfg_.items / 2 ? cfg_.low_rate : cfg_.high_rate;
}

Vec Inventory::observe() const {
  Vec obs(cfg_.items);
  for (int i = 0; i < cfg_.items; ++i) {
    const double v = static_cast<double>(stock_[static_cast<std::size_t>(i)] + cfg_.obs_offset) / cfg_.obs_span;
    obs(i) = std::clamp(v, 0.0, 1.0);
  }
  return obs;
}

Vec Inventory::reset() {
  stock_.assign(static_cast<std::size_t>(cfg_.items), cfg_.initial_level);
  steps_ = 0;
  return observe();
}

void Inventory::set_stock(std::vector<int> stock) {
  if (static_cast<int>(stock.size()) != cfg_.items) throw DimensionError("inventory: stock length mismatch");
  stock_ = std::move(stock);
}

StepResult Inventory::step(const ExecutableAction& action) {
  check_action(action, spec_);
  std::vector<int> orders(stock_.size());
  for (std::size_t i = 0; i < stock_.size(); ++i) {
    orders[i] = std::max(0, action.discrete[i] - stock_[i]);
    stock_[i] += orders[i];
    const double rate = demand_rate(static_cast<int>(i));
    if (rate > 0.0) stock_[i] -= std::poisson_distribution<int>(rate)(rng_);
  }
  ++steps_;
  StepResult out;
  out.reward = -inventory_cost(stock_, orders, cfg_);
  out.observation = observe();
  out.truncated = steps_ >= cfg_.max_steps;
  return out;
}

EnvTraits Inventory::traits() const { return {"inventory", true, false, false}; }

}  // namespace dgrl
