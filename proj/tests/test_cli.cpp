#include "dgrl/csv.hpp"
#include "dgrl/errors.hpp"
#include "dgrl/experiment.hpp"
#include "test_support.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <sstream>

using namespace dgrl;
namespace fs = std::filesystem;

namespace {

fs::path fresh_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / name;
  fs::remove_all(dir);
  return dir;
}

ExperimentConfig tiny_experiment(const fs::path& out) {
  ExperimentConfig exp = parse_config_text("env = maze\nepisodes = 4\nsamples = 4\neval_episodes = 2\n");
  exp.seeds = {0, 1};
  exp.out_dir = out.string();
  exp.workers = 2;
  return exp;
}

}  // namespace

TEST(Config, SmallMazeDefaults) {
  const ExperimentConfig exp = parse_config_text("env = maze\n");
  EXPECT_EQ(exp.actuators, 5);
  EXPECT_EQ(exp.chosen, 4);
  EXPECT_EQ(exp.agent.sdn.radius, 1);
  EXPECT_EQ(exp.agent.sdn.samples, 10);
  EXPECT_EQ(exp.agent.dbu.candidates, 10);
  EXPECT_DOUBLE_EQ(exp.agent.dbu.temperature, 1.0);
  EXPECT_EQ(exp.agent.update_every, 8);
  EXPECT_EQ(exp.agent.batch, 16);
  EXPECT_DOUBLE_EQ(exp.agent.polyak, 0.02);
  EXPECT_EQ(exp.seeds.size(), 3u);
}

TEST(Config, OverridesAndComments) {
  const ExperimentConfig exp = parse_config_text(
      "# comment\nenv = job_shop\nmachines = 4  # trailing\nactor_lr = 1e-3, 1e-4\nseeds = 5, 6\n"
      "samples = 3\n");
  EXPECT_EQ(exp.env, "job_shop");
  EXPECT_EQ(exp.machines, 4);
  EXPECT_DOUBLE_EQ(exp.agent.actor_lr.start, 1e-3);
  EXPECT_DOUBLE_EQ(exp.agent.actor_lr.end, 1e-4);
  EXPECT_EQ(exp.seeds, (std::vector<std::uint64_t>{5, 6}));
  EXPECT_EQ(exp.agent.dbu.candidates, 3);
}

TEST(Config, Rejections) {
  EXPECT_THROW(parse_config_text("env = chess\n"), ConfigError);
  EXPECT_THROW(parse_config_text("env = maze\nlearning_rate = 1\n"), ConfigError);
  EXPECT_THROW(parse_config_text("seeds = \n"), ConfigError);
  EXPECT_THROW(parse_config_text("episodes = ten\n"), ConfigError);
  EXPECT_THROW(parse_config_text("env = maze\nenv = maze\n"), ConfigError);
  EXPECT_THROW(parse_config_text("env maze\n"), ConfigError);
  EXPECT_THROW(parse_config_text("env = inventory\nvariant = irregular\n"), ConfigError);
  EXPECT_THROW(parse_config_text("env = job_shop\nmetric = l2\n"), ConfigError);
  EXPECT_THROW(parse_config("/nonexistent/dgrl.cfg"), ConfigError);
}

TEST(Config, ErrorNamesLine) {
  try {
    parse_config_text("env = maze\n\nbogus = 1\n", "exp.cfg");
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("exp.cfg:3"), std::string::npos) << e.what();
  }
}

TEST(Environments, FactoryBuildsEveryKind) {
  for (const char* env : {"maze", "job_shop", "inventory", "recommender"}) {
    ExperimentConfig exp = parse_config_text(std::string("env = ") + env + "\n");
    EXPECT_NE(make_environment(exp, 0), nullptr) << env;
  }
}

TEST(Csv, FormatDoubleRoundTrips) {
  for (double v : {0.0, -0.0, 1.0 / 3.0, 9.5, -50.0, 1e-300, 123456789.125}) {
    EXPECT_EQ(parse_double(format_double(v)), v);
  }
  EXPECT_EQ(format_double(0.1), "0.1");
  EXPECT_THROW(parse_double("1.5x"), FormatError);
  EXPECT_THROW(parse_double(""), FormatError);
}

TEST(Csv, EmptyRunIsHeaderOnly) {
  EXPECT_EQ(format_metrics({}), std::string(kMetricsHeader) + "\n");
}

TEST(Csv, OneRecordTwoLines) {
  MetricsRecord r;
  r.episode = 0;
  r.train_return = -50.0;
  r.eval_return = 9.5;
  r.wall_time_ms_per_step = 0.25;
  r.actor_loss = 0.125;
  r.critic_loss = 3.0;
  EXPECT_EQ(format_metrics({r}), std::string(kMetricsHeader) + "\n0,-50,9.5,0.25,0.125,3\n");
  EXPECT_EQ(format_metrics({r}, false), std::string(kMetricsHeader) + "\n0,-50,9.5,,0.125,3\n");
}

TEST(Csv, ParseRoundTrip) {
  std::vector<MetricsRecord> records(3);
  for (int i = 0; i < 3; ++i) {
    records[static_cast<std::size_t>(i)].episode = i;
    records[static_cast<std::size_t>(i)].train_return = 0.1 * i - 7.0 / 3.0;
    records[static_cast<std::size_t>(i)].critic_loss = std::ldexp(1.0, -i * 20);
  }
  records[1].eval_return = -1.0 / 7.0;
  std::istringstream in(format_metrics(records));
  EXPECT_EQ(parse_metrics(in), records);
}

TEST(Csv, ParseRejectsMalformed) {
  std::istringstream no_header("0,1,2,3,4,5\n");
  EXPECT_THROW(parse_metrics(no_header), FormatError);
  std::istringstream short_row(std::string(kMetricsHeader) + "\n0,1,2\n");
  EXPECT_THROW(parse_metrics(short_row), FormatError);
  std::istringstream bad_number(std::string(kMetricsHeader) + "\n0,x,,0,0,0\n");
  EXPECT_THROW(parse_metrics(bad_number), FormatError);
  EXPECT_THROW(read_csv("/nonexistent/metrics.csv"), FormatError);
}

TEST(Summary, Statistics) {
  const SummaryStats s = summarize({1.0, 3.0, 2.0, 10.0});
  EXPECT_DOUBLE_EQ(s.mean, 4.0);
  EXPECT_DOUBLE_EQ(s.median, 2.5);
  EXPECT_DOUBLE_EQ(s.std, std::sqrt(12.5));
  EXPECT_DOUBLE_EQ(summarize({7.0}).median, 7.0);
}

TEST(Experiment, WritesPerSeedCsvAndSummary) {
  const fs::path dir = fresh_dir("dgrl_experiment");
  const auto results = run_experiment(tiny_experiment(dir));
  ASSERT_EQ(results.size(), 2u);
  EXPECT_TRUE(fs::exists(dir / "seed_0.csv"));
  EXPECT_TRUE(fs::exists(dir / "seed_1.csv"));
  EXPECT_TRUE(fs::exists(dir / "weights_0_actor.txt"));
  for (const auto& r : results) {
    const auto loaded = read_csv((dir / ("seed_" + std::to_string(r.seed) + ".csv")).string());
    EXPECT_EQ(loaded, r.metrics);
    EXPECT_EQ(loaded.size(), 4u);
  }
  const std::string summary = support::read_file((dir / "summary.txt").string());
  const double median = summarize({results[0].peak, results[1].peak}).median;
  EXPECT_NE(summary.find("peak_median=" + format_double(median) + "\n"), std::string::npos) << summary;
}

TEST(Experiment, RerunsAreByteIdenticalWithoutTiming) {
  const fs::path a = fresh_dir("dgrl_repro_a");
  const fs::path b = fresh_dir("dgrl_repro_b");
  ExperimentConfig cfg_a = tiny_experiment(a);
  ExperimentConfig cfg_b = tiny_experiment(b);
  cfg_b.workers = 1;
  run_experiment(cfg_a);
  run_experiment(cfg_b);
  for (const char* name : {"seed_0.csv", "seed_1.csv"}) {
    const std::string ta = support::csv_without_timing((a / name).string());
    EXPECT_FALSE(ta.empty());
    EXPECT_EQ(ta, support::csv_without_timing((b / name).string())) << name;
  }
  EXPECT_EQ(support::read_file((a / "summary.txt").string()), support::read_file((b / "summary.txt").string()));
}

TEST(Experiment, DifferentSeedsDiffer) {
  const fs::path dir = fresh_dir("dgrl_seeds_differ");
  const auto results = run_experiment(tiny_experiment(dir));
  EXPECT_NE(support::csv_without_timing((dir / "seed_0.csv").string()),
            support::csv_without_timing((dir / "seed_1.csv").string()));
  (void)results;
}

TEST(StepTime, ReportsEachSize) {
  const std::vector<MazeSize> sizes{{5, 2}, {6, 3}};
  const auto reports = measure_step_time(sizes, Algorithm::kDgrl, 2, 0);
  ASSERT_EQ(reports.size(), 2u);
  EXPECT_EQ(reports[0].descriptor, "5^2");
  EXPECT_EQ(reports[1].descriptor, "6^3");
  for (const auto& r : reports) {
    EXPECT_GT(r.steps, 0);
    EXPECT_GT(r.ms_per_step, 0.0);
  }
  EXPECT_THROW(measure_step_time(sizes, Algorithm::kDgrl, 0, 0), ParameterError);
}
