#include "dgrl/envs/maze.hpp"

#include "dgrl/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

namespace dgrl {

namespace {

// Agents stop this far short of a wall they run into.
constexpr double kWallGap = 1e-6;

double cross(double ax, double ay, double bx, double by) { return ax * by - ay * bx; }

// Fraction t in [0, 1] along p -> p + v where the path first meets `w`, or > 1.
double hit_fraction(const Point& p, const Point& v, const Segment& w) {
  const double wx = w.b.x - w.a.x;
  const double wy = w.b.y - w.a.y;
  const double den = cross(v.x, v.y, wx, wy);
  if (std::abs(den) < 1e-15) return 2.0;
  const double qx = w.a.x - p.x;
  const double qy = w.a.y - p.y;
  const double t = cross(qx, qy, wx, wy) / den;
  const double u = cross(qx, qy, v.x, v.y) / den;
  if (t < 0.0 || t > 1.0 || u < 0.0 || u > 1.0) return 2.0;
  return t;
}

std::vector<int> shuffled_labels(int actuators, std::uint64_t seed) {
  std::vector<int> labels(static_cast<std::size_t>(actuators));
  std::iota(labels.begin(), labels.end(), 0);
  const std::vector<int> identity = labels;
  Rng rng(seed);
  while (labels == identity) std::shuffle(labels.begin(), labels.end(), rng);
  return labels;
}

}  // namespace

std::vector<Segment> default_maze_walls() {
  return {{{0.4, 0.0}, {0.4, 0.35}}, {{0.0, 0.55}, {0.3, 0.55}}, {{0.7, 0.3}, {0.7, 0.6}}};
}

void MazeConfig::validate() const {
  if (actuators < 2) throw ParameterError("maze needs at least two actuators");
  if (chosen < 1) throw ParameterError("maze needs at least one chosen actuator");
  if (!(actuator_length > 0.0) || !(max_step_size > 0.0)) {
    throw ParameterError("maze actuator length and max step size must be positive");
  }
  if (max_steps < 1) throw ParameterError("maze max_steps must be >= 1");
  if (!(movement_noise >= 0.0)) throw ParameterError("maze movement noise must be >= 0");
  const Box unit{{0.0, 0.0}, {1.0, 1.0}};
  if (!unit.contains(start)) throw ParameterError("maze start outside the unit square");
  if (target.contains(start)) throw ParameterError("maze start inside the target");
}

bool crosses_wall(const Point& p, const Point& q, const std::vector<Segment>& walls) {
  const Point v{q.x - p.x, q.y - p.y};
  return std::any_of(walls.begin(), walls.end(),
                     [&](const Segment& w) { return hit_fraction(p, v, w) <= 1.0; });
}

Point move_with_collisions(const Point& p, const Point& v, const std::vector<Segment>& walls) {
  const double len = std::hypot(v.x, v.y);
  if (len == 0.0) return p;
  double t = 1.0;
  for (const auto& w : walls) {
    const double hit = hit_fraction(p, v, w);
    if (hit <= 1.0) t = std::min(t, std::max(0.0, hit - kWallGap / len));
  }
  if (v.x > 0.0) t = std::min(t, (1.0 - p.x) / v.x);
  if (v.x < 0.0) t = std::min(t, -p.x / v.x);
  if (v.y > 0.0) t = std::min(t, (1.0 - p.y) / v.y);
  if (v.y < 0.0) t = std::min(t, -p.y / v.y);
  t = std::max(t, 0.0);
  return {std::clamp(p.x + t * v.x, 0.0, 1.0), std::clamp(p.y + t * v.y, 0.0, 1.0)};
}

Maze::Maze(MazeConfig cfg, std::uint64_t seed) : cfg_(std::move(cfg)), rng_(seed) {
  cfg_.validate();
  spec_ = ActionSpaceSpec::uniform(cfg_.chosen, 0, cfg_.actuators - 1);
  if (!cfg_.structured) {
    spec_.permutation.assign(static_cast<std::size_t>(cfg_.chosen),
                             shuffled_labels(cfg_.actuators, cfg_.permutation_seed));
  }
  if (cfg_.hybrid) {
    spec_.continuous_lower = {0.0};
    spec_.continuous_upper = {cfg_.max_step_size};
  }
  spec_.metric = cfg_.metric;
  spec_.validate();
  pos_ = cfg_.start;
}

Vec Maze::reset() {
  pos_ = cfg_.start;
  steps_ = 0;
  return Vec{{pos_.x, pos_.y}};
}

Point Maze::actuator_vector(int actuator) const {
  if (actuator < 0 || actuator >= cfg_.actuators) throw ActionError("actuator index out of range");
  if (actuator == 0) return {0.0, 0.0};
  const double angle = 2.0 * std::numbers::pi * (actuator - 1) / (cfg_.actuators - 1);
  return {cfg_.actuator_length * std::cos(angle), cfg_.actuator_length * std::sin(angle)};
}

Point Maze::movement(const ExecutableAction& action) const {
  check_action(action, spec_);
  Point v;
  for (std::size_t d = 0; d < action.discrete.size(); ++d) {
    const Point u = actuator_vector(spec_.semantic_value(static_cast<int>(d), action.discrete[d]));
    v.x += u.x;
    v.y += u.y;
  }
  const double len = std::hypot(v.x, v.y);
  if (len == 0.0) return v;
  const double target_len =
      cfg_.hybrid ? std::clamp(action.continuous[0], 0.0, cfg_.max_step_size)
                  : std::min(len, cfg_.max_step_size);
  return {v.x * target_len / len, v.y * target_len / len};
}

StepResult Maze::step(const ExecutableAction& action) {
  Point v = movement(action);
  if (cfg_.movement_noise > 0.0) {
    std::normal_distribution<double> gauss(0.0, cfg_.movement_noise);
    v.x += gauss(rng_);
    v.y += gauss(rng_);
  }
  pos_ = move_with_collisions(pos_, v, cfg_.walls);
  ++steps_;
  StepResult out;
  out.observation = Vec{{pos_.x, pos_.y}};
  if (cfg_.target.contains(pos_)) {
    out.reward = cfg_.goal_reward;
    out.terminal = true;
  } else {
    out.reward = cfg_.step_reward;
    out.truncated = steps_ >= cfg_.max_steps;
  }
  return out;
}

EnvTraits Maze::traits() const { return {"maze", false, true, true}; }

}  // namespace dgrl
