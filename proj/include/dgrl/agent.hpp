#pragma once

// Off-policy training loop: SDN (or a baseline) picks actions, two critics learn
// from replay with clipped double Q, the actor follows distance-based updates.

#include "dgrl/action_space.hpp"
#include "dgrl/critic.hpp"
#include "dgrl/dbu.hpp"
#include "dgrl/envs/environment.hpp"
#include "dgrl/nn.hpp"
#include "dgrl/replay_buffer.hpp"
#include "dgrl/sdn.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace dgrl {

enum class Algorithm { kDgrl, kAxialGreedy, kRoundOnly };
Algorithm parse_algorithm(const std::string& name);
std::string to_string(Algorithm algorithm);

/// start + (end - start) * episode / total, clamped at end.
double linear_decay(double start, double end, int episode, int total);

/// Constant when start == end.
struct Schedule {
  double start = 0.0;
  double end = 0.0;
  double at(int episode, int total) const { return linear_decay(start, end, episode, total); }
};

struct AgentConfig {
  Algorithm algorithm = Algorithm::kDgrl;
  int episodes = 1000;
  double warmup_random_frac = 0.10;  // only for environments that request it
  double update_start_frac = 0.05;   // likewise; others update from the start
  int update_every = 8;
  int batch = 16;
  double gamma = 0.99;
  std::size_t buffer_capacity = 100000;
  double polyak = 0.02;
  double huber_delta = 1.0;
  int actor_width = 32;
  int critic_width = 64;
  int fourier_order = 3;
  Schedule actor_lr{5e-5, 1e-5};
  Schedule critic_lr{1e-4, 5e-5};
  Schedule proto_noise{0.5, 0.1};  // sigma_f
  Schedule dbu_noise{0.5, 0.1};    // sigma_b
  SdnConfig sdn;
  DbuConfig dbu;
  int greedy_steps = 2;                // axial-greedy baseline
  Schedule greedy_noise{1.0, 0.1};     // sigma_f for the axial-greedy baseline
  int eval_every = 0;                  // episodes; 0 means 2% of the run
  int eval_episodes = 10;
  std::uint64_t seed = 0;

  void validate() const;
  int eval_interval() const;
};

struct MetricsRecord {
  int episode = 0;
  double train_return = 0.0;
  std::optional<double> eval_return;
  double wall_time_ms_per_step = 0.0;
  double actor_loss = 0.0;   // mean over this episode's updates, 0 without updates
  double critic_loss = 0.0;

  bool operator==(const MetricsRecord&) const = default;
};

using Policy = std::function<ExecutableAction(const Vec& observation)>;

struct EvalSummary {
  std::vector<double> returns;
  double mean = 0.0;
  double median = 0.0;
  double std = 0.0;  // population
};

/// Runs `episodes` episodes with the environment reseeded to `seed` first.
EvalSummary evaluate(Environment& env, const Policy& policy, int episodes, std::uint64_t seed);

/// Actor, critics and their optimizers for one environment.
class Agent {
 public:
  Agent(const Environment& env, const AgentConfig& cfg);

  /// Network input for a raw observation (Fourier basis when the env asks for it).
  Vec features(const Vec& observation) const;

  /// Selection with the configured algorithm. `sigma` is the proto noise in train mode.
  ExecutableAction select(const Vec& features, SelectionMode mode, double sigma, Rng& rng) const;

  /// Greedy policy on raw observations; draws candidates from its own stream.
  Policy eval_policy(std::uint64_t seed) const;

  /// Critic step, polyak step and actor step on one replay batch. Returns {actor, critic} losses.
  std::pair<double, double> update(std::span<const Transition> batch, double dbu_noise, Rng& rng);

  void set_learning_rates(double actor_lr, double critic_lr);

  /// Writes actor and online critics as `<prefix>actor.txt`, `<prefix>critic1.txt`, ...
  void save(const std::string& prefix) const;
  /// Reads what save() wrote; target critics are reset to the online ones.
  void load(const std::string& prefix);

  const Mlp& actor() const { return actor_; }
  Mlp& actor() { return actor_; }
  const CriticPair& critics() const { return critics_; }
  const ActionSpaceSpec& spec() const { return spec_; }

 private:
  ActionScorer online_scorer() const;
  ActionScorer target_scorer() const;
  ExecutableAction select_with(const Vec& features, const ActionScorer& scorer, SelectionMode mode,
                               double sigma, Rng& rng) const;

  AgentConfig cfg_;
  EnvTraits traits_;
  ActionSpaceSpec spec_;
  std::optional<FourierConfig> fourier_;
  Mlp actor_;
  CriticPair critics_;
  AdamState actor_opt_;
  CriticOptimizers critic_opt_;
};

struct TrainResult {
  std::vector<MetricsRecord> metrics;
  std::optional<Agent> agent;
};

/// Full training run; reproducible given cfg.seed.
TrainResult train(Environment& env, const AgentConfig& cfg);

/// Largest eval return over the run, or nullopt without checkpoints.
std::optional<double> peak_eval_return(const std::vector<MetricsRecord>& metrics);

}  // namespace dgrl
