// Command-line entry point: train, evaluate, steptime, theory-check, synth-features.

#include "dgrl/agent.hpp"
#include "dgrl/csv.hpp"
#include "dgrl/envs/features.hpp"
#include "dgrl/errors.hpp"
#include "dgrl/experiment.hpp"
#include "dgrl/theory_checks.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

namespace {

std::vector<std::uint64_t> parse_seed_list(const std::string& text) {
  std::vector<std::uint64_t> seeds;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    if (!item.empty()) seeds.push_back(std::stoull(item));
  }
  if (seeds.empty()) throw dgrl::ConfigError("empty seed list");
  return seeds;
}

struct CommonOptions {
  std::string config;
  std::string seed_list;
  std::string out;
  int episodes = -1;
};

dgrl::ExperimentConfig load(const CommonOptions& o) {
  dgrl::ExperimentConfig cfg = dgrl::parse_config(o.config);
  if (!o.seed_list.empty()) cfg.seeds = parse_seed_list(o.seed_list);
  if (!o.out.empty()) cfg.out_dir = o.out;
  if (o.episodes >= 0) cfg.agent.episodes = o.episodes;
  cfg.validate();
  return cfg;
}

void add_common(CLI::App* cmd, CommonOptions& o) {
  cmd->add_option("--config", o.config, "key=value experiment file")->required()->check(CLI::ExistingFile);
  cmd->add_option("--seed-list", o.seed_list, "comma-separated seeds, overrides the config");
  cmd->add_option("--out", o.out, "output directory, overrides the config");
  cmd->add_option("--episodes", o.episodes, "episode budget, overrides the config");
}

int run_train(const CommonOptions& o) {
  const dgrl::ExperimentConfig cfg = load(o);
  const auto results = dgrl::run_experiment(cfg);
  std::vector<double> peaks;
  for (const auto& r : results) {
    std::printf("seed %llu peak %.4f\n", static_cast<unsigned long long>(r.seed), r.peak);
    peaks.push_back(r.peak);
  }
  const auto s = dgrl::summarize(peaks);
  std::printf("peak mean %.4f median %.4f std %.4f -> %s\n", s.mean, s.median, s.std,
              cfg.out_dir.c_str());
  return 0;
}

int run_evaluate(const CommonOptions& o, int episodes, std::uint64_t eval_seed) {
  const dgrl::ExperimentConfig cfg = load(o);
  for (auto seed : cfg.seeds) {
    auto env = dgrl::make_environment(cfg, seed);
    dgrl::AgentConfig ac = cfg.agent;
    ac.seed = seed;
    dgrl::Agent agent(*env, ac);
    const auto prefix = (std::filesystem::path(cfg.out_dir) / ("weights_" + std::to_string(seed) + "_")).string();
    agent.load(prefix);
    const auto s = dgrl::evaluate(*env, agent.eval_policy(eval_seed), episodes, eval_seed);
    std::printf("seed %llu mean %.4f median %.4f std %.4f over %d episodes\n",
                static_cast<unsigned long long>(seed), s.mean, s.median, s.std, episodes);
  }
  return 0;
}

int run_steptime(const std::string& algorithms, int episodes, std::uint64_t seed, const std::string& out) {
  const std::vector<dgrl::MazeSize> sizes{{5, 5}, {20, 20}, {50, 50}};
  std::ostringstream csv;
  csv << "algorithm,action_space,ms_per_step,steps\n";
  std::printf("selection path only, environment steps excluded, %d episodes per size\n", episodes);
  std::stringstream in(algorithms);
  std::string name;
  while (std::getline(in, name, ',')) {
    const auto reports = dgrl::measure_step_time(sizes, dgrl::parse_algorithm(name), episodes, seed);
    double lo = reports.front().ms_per_step;
    double hi = lo;
    for (const auto& r : reports) {
      std::printf("%-13s %-6s %9.4f ms (%lld steps)\n", name.c_str(), r.descriptor.c_str(), r.ms_per_step,
                  r.steps);
      csv << name << ',' << r.descriptor << ',' << dgrl::format_double(r.ms_per_step) << ',' << r.steps << '\n';
      lo = std::min(lo, r.ms_per_step);
      hi = std::max(hi, r.ms_per_step);
    }
    std::printf("%-13s max/min ratio %.3f\n", name.c_str(), hi / lo);
  }
  if (!out.empty()) {
    std::filesystem::create_directories(out);
    std::ofstream f(std::filesystem::path(out) / "steptime.csv");
    f << csv.str();
  }
  return 0;
}

int run_theory(std::uint64_t seed, int trials, const std::string& out) {
  const auto reports = dgrl::run_theory_suite(seed, trials);
  std::printf("Not asserted directly (bounds in expectation):\n");
  for (const auto& p : dgrl::unchecked_properties()) std::printf("  - %s\n", p.c_str());
  std::printf("\n%-22s %-5s %14s %14s %12s\n", "check", "pass", "measured", "expected", "tolerance");
  bool all = true;
  std::ostringstream csv;
  csv << "check,passed,measured,expected,tolerance,detail\n";
  for (const auto& r : reports) {
    std::printf("%-22s %-5s %14.6g %14.6g %12.6g\n    %s\n", r.name.c_str(), r.passed ? "yes" : "NO",
                r.measured, r.expected, r.tolerance, r.detail.c_str());
    csv << r.name << ',' << (r.passed ? 1 : 0) << ',' << dgrl::format_double(r.measured) << ','
        << dgrl::format_double(r.expected) << ',' << dgrl::format_double(r.tolerance) << ",\"" << r.detail
        << "\"\n";
    all = all && r.passed;
  }
  if (!out.empty()) {
    std::filesystem::create_directories(out);
    std::ofstream f(std::filesystem::path(out) / "theory_checks.csv");
    f << csv.str();
  }
  return all ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Distance-guided RL for large discrete and hybrid action spaces"};
  app.require_subcommand(1);

  CommonOptions train_opts;
  auto* train = app.add_subcommand("train", "train every seed of an experiment and write CSVs");
  add_common(train, train_opts);

  CommonOptions eval_opts;
  int eval_episodes = 10;
  std::uint64_t eval_seed = 12345;
  auto* evaluate = app.add_subcommand("evaluate", "evaluate saved weights greedily");
  add_common(evaluate, eval_opts);
  evaluate->add_option("--eval-episodes", eval_episodes, "episodes per seed");
  evaluate->add_option("--eval-seed", eval_seed, "environment seed for evaluation");

  std::string st_algorithms = "dgrl,axial-greedy";
  int st_episodes = 1000;
  std::uint64_t st_seed = 0;
  std::string st_out;
  auto* steptime = app.add_subcommand("steptime", "time action selection on mazes 5^5, 20^20, 50^50");
  steptime->add_option("--algorithms", st_algorithms, "comma-separated algorithms");
  steptime->add_option("--episodes", st_episodes, "episodes per size");
  steptime->add_option("--seed", st_seed, "network and environment seed");
  steptime->add_option("--out", st_out, "directory for steptime.csv");

  std::uint64_t th_seed = 0;
  int th_trials = 10000;
  std::string th_out;
  auto* theory = app.add_subcommand("theory-check", "run the property checks");
  theory->add_option("--seed", th_seed, "seed");
  theory->add_option("--trials", th_trials, "trials per statistical check");
  theory->add_option("--out", th_out, "directory for theory_checks.csv");

  int sf_rows = 343;
  int sf_cols = 24;
  std::uint64_t sf_seed = 11;
  std::string sf_out;
  auto* synth = app.add_subcommand("synth-features", "write a synthetic movie feature matrix");
  synth->add_option("--rows", sf_rows, "movies");
  synth->add_option("--cols", sf_cols, "genre columns");
  synth->add_option("--seed", sf_seed, "seed");
  synth->add_option("--out", sf_out, "output file")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*train) return run_train(train_opts);
    if (*evaluate) return run_evaluate(eval_opts, eval_episodes, eval_seed);
    if (*steptime) return run_steptime(st_algorithms, st_episodes, st_seed, st_out);
    if (*theory) return run_theory(th_seed, th_trials, th_out);
    if (*synth) {
      dgrl::save_feature_matrix(sf_out, dgrl::synth_feature_matrix(sf_rows, sf_cols, sf_seed));
      std::printf("wrote %d x %d features to %s\n", sf_rows, sf_cols, sf_out.c_str());
      return 0;
    }
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
  return 0;
}
