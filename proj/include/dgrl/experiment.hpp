#pragma once

// Experiment orchestration: key=value configs with per-environment defaults,
// multi-seed runs on a bounded thread pool, step-time measurement.

#include "dgrl/agent.hpp"
#include "dgrl/envs/environment.hpp"

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

namespace dgrl {

struct ExperimentConfig {
  std::string env = "maze";            // maze | job_shop | inventory | recommender
  std::string variant = "structured";  // structured | irregular | hybrid
  // maze
  int actuators = 5;
  int chosen = 4;
  double max_step = 0.5;
  double actuator_length = 0.25;
  double movement_noise = 0.0;
  Metric metric = Metric::kChebyshev;  // SDN neighborhood metric
  // recommender
  int recommendations = 1;
  std::string features_path;  // empty: synthetic catalog
  int movies = 343;
  int genres = 24;
  std::uint64_t feature_seed = 11;
  // job shop / inventory
  int machines = 10;
  int items = 20;

  AgentConfig agent;
  std::vector<std::uint64_t> seeds{0, 1, 2};
  std::string out_dir = "results";
  int workers = 0;  // 0: hardware concurrency

  void validate() const;
};

/// Default agent settings for an environment (per-environment hyperparameter table).
AgentConfig default_agent_config(const ExperimentConfig& exp);

/// Reads key=value lines ('#' starts a comment). Unknown keys, bad values and
/// invariant violations raise ConfigError with the line number.
ExperimentConfig parse_config(const std::string& path);
ExperimentConfig parse_config_text(const std::string& text, const std::string& origin = "<config>");

/// Fresh environment instance for `seed`.
std::unique_ptr<Environment> make_environment(const ExperimentConfig& exp, std::uint64_t seed);

struct SeedResult {
  std::uint64_t seed = 0;
  std::vector<MetricsRecord> metrics;
  double peak = 0.0;
};

struct SummaryStats {
  double mean = 0.0;
  double median = 0.0;
  double std = 0.0;  // population
};

SummaryStats summarize(const std::vector<double>& values);

/// Trains every seed, writes seed_<s>.csv, weights_<s>_*.txt and summary.txt
/// into out_dir. Results are ordered like cfg.seeds.
std::vector<SeedResult> run_experiment(const ExperimentConfig& cfg);

struct StepTimeReport {
  std::string descriptor;  // e.g. "5^5"
  Algorithm algorithm = Algorithm::kDgrl;
  double ms_per_step = 0.0;
  long long steps = 0;
};

struct MazeSize {
  int actuators = 5;
  int chosen = 5;
};

/// Mean wall time of one action selection on mazes of the given sizes with
/// randomly initialized networks. Environment steps are not timed.
std::vector<StepTimeReport> measure_step_time(const std::vector<MazeSize>& sizes, Algorithm algorithm,
                                              int episodes, std::uint64_t seed);

}  // namespace dgrl
