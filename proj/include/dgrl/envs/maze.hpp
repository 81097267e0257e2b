#pragma once

// Continuous 2-D maze on the unit square. Each step picks `chosen` actuators out
// of `actuators`; actuator 0 does nothing, the rest are evenly spaced unit
// directions. The movement is their sum capped at the maximum step size.

#include "dgrl/envs/environment.hpp"

#include <cstdint>
#include <vector>

namespace dgrl {

struct Point {
  double x = 0.0;
  double y = 0.0;
};

struct Segment {
  Point a;
  Point b;
};

struct Box {
  Point lo;
  Point hi;
  bool contains(const Point& p) const {
    return p.x >= lo.x && p.x <= hi.x && p.y >= lo.y && p.y <= hi.y;
  }
};

std::vector<Segment> default_maze_walls();

struct MazeConfig {
  int actuators = 5;             // n, including "do nothing"
  int chosen = 4;                // d
  double actuator_length = 0.25;
  double max_step_size = 0.5;
  bool structured = true;        // false shuffles all actuator labels (never the identity)
  std::uint64_t permutation_seed = 7;
  bool hybrid = false;           // extra continuous step-size dim in [0, max_step_size]
  double step_reward = -0.5;
  double goal_reward = 10.0;
  int max_steps = 100;
  double movement_noise = 0.0;   // std of Gaussian noise on the movement vector
  Metric metric = Metric::kChebyshev;
  Point start{0.1, 0.1};
  Box target{{0.7, 0.7}, {1.0, 1.0}};
  std::vector<Segment> walls = default_maze_walls();

  void validate() const;
};

/// Furthest point along p -> p + v that stays inside the unit square and does
/// not touch any wall.
Point move_with_collisions(const Point& p, const Point& v, const std::vector<Segment>& walls);

/// True when the open segment p -> q crosses a wall.
bool crosses_wall(const Point& p, const Point& q, const std::vector<Segment>& walls);

class Maze : public Environment {
 public:
  explicit Maze(MazeConfig cfg, std::uint64_t seed = 0);

  Vec reset() override;
  StepResult step(const ExecutableAction& action) override;
  void seed(std::uint64_t seed) override { rng_.seed(seed); }
  std::unique_ptr<Environment> clone() const override { return std::make_unique<Maze>(*this); }

  const ActionSpaceSpec& action_space() const override { return spec_; }
  int observation_dim() const override { return 2; }
  int horizon() const override { return cfg_.max_steps; }
  EnvTraits traits() const override;

  /// Movement vector before collisions for a given action.
  Point movement(const ExecutableAction& action) const;
  /// Unit-length direction scaled by actuator_length; zero for actuator 0.
  Point actuator_vector(int actuator) const;

  const Point& position() const { return pos_; }
  void set_position(const Point& p) { pos_ = p; }
  const MazeConfig& config() const { return cfg_; }

 private:
  MazeConfig cfg_;
  ActionSpaceSpec spec_;
  Rng rng_;
  Point pos_;
  int steps_ = 0;
};

}  // namespace dgrl
