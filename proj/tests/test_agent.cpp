#include "dgrl/agent.hpp"
#include "dgrl/envs/job_shop.hpp"
#include "dgrl/envs/maze.hpp"
#include "dgrl/errors.hpp"
#include "test_support.hpp"

#include <gtest/gtest.h>

#include <filesystem>

using namespace dgrl;

namespace {

AgentConfig small_config(int episodes) {
  AgentConfig cfg;
  cfg.episodes = episodes;
  cfg.sdn.radius = 1;
  cfg.sdn.samples = 5;
  cfg.dbu.candidates = 5;
  cfg.eval_episodes = 2;
  cfg.seed = 3;
  return cfg;
}

JobShopConfig small_shop() {
  JobShopConfig cfg;
  cfg.machines = 3;
  cfg.max_steps = 20;
  return cfg;
}

}  // namespace

TEST(LinearDecay, Endpoints) {
  EXPECT_DOUBLE_EQ(linear_decay(0.5, 0.1, 0, 100), 0.5);
  EXPECT_DOUBLE_EQ(linear_decay(0.5, 0.1, 100, 100), 0.1);
  EXPECT_DOUBLE_EQ(linear_decay(0.5, 0.1, 500, 100), 0.1);
  EXPECT_NEAR(linear_decay(0.5, 0.1, 50, 100), 0.3, 1e-15);
  EXPECT_DOUBLE_EQ((Schedule{0.2, 0.2}.at(37, 100)), 0.2);
  EXPECT_THROW(linear_decay(1.0, 0.0, 0, 0), ParameterError);
}

TEST(AgentConfig, Validation) {
  AgentConfig cfg;
  cfg.warmup_random_frac = 1.5;
  EXPECT_THROW(cfg.validate(), ConfigError);
  cfg = {};
  cfg.update_every = 0;
  EXPECT_THROW(cfg.validate(), ConfigError);
  cfg = {};
  cfg.sdn.exploration_temperature = 0.0;
  EXPECT_THROW(cfg.validate(), ConfigError);
  cfg = {};
  cfg.episodes = 1000;
  EXPECT_EQ(cfg.eval_interval(), 20);
}

TEST(Algorithm, NamesRoundTrip) {
  for (Algorithm a : {Algorithm::kDgrl, Algorithm::kAxialGreedy, Algorithm::kRoundOnly}) {
    EXPECT_EQ(parse_algorithm(to_string(a)), a);
  }
  EXPECT_THROW(parse_algorithm("wolpertinger"), ConfigError);
}

TEST(Evaluate, DeterministicPolicyHasZeroSpread) {
  Maze maze(MazeConfig{});
  const Policy stay = [](const Vec&) { return ExecutableAction{{0, 0, 0, 0}, {}}; };
  const EvalSummary s = evaluate(maze, stay, 5, 1);
  EXPECT_DOUBLE_EQ(s.std, 0.0);
  EXPECT_DOUBLE_EQ(s.mean, -50.0);
}

TEST(Evaluate, SingleEpisodeStatistics) {
  Maze maze(MazeConfig{});
  const Policy go = [](const Vec&) { return ExecutableAction{{1, 1, 2, 2}, {}}; };
  const EvalSummary s = evaluate(maze, go, 1, 1);
  EXPECT_DOUBLE_EQ(s.mean, 9.5);
  EXPECT_DOUBLE_EQ(s.median, 9.5);
}

TEST(Evaluate, RandomPolicyIsPenaltyDominated) {
  Maze maze(MazeConfig{});
  auto rng = std::make_shared<Rng>(5);
  const Policy random = [&maze, rng](const Vec&) { return random_action(maze.action_space(), *rng); };
  const EvalSummary s = evaluate(maze, random, 200, 6);
  EXPECT_LT(s.mean, 5.0);
  EXPECT_GE(s.mean, -50.0);
}

TEST(Train, ZeroEpisodesGiveEmptyMetrics) {
  Maze maze(MazeConfig{});
  EXPECT_TRUE(train(maze, small_config(0)).metrics.empty());
}

TEST(Train, SameSeedIsBitwiseIdentical) {
  for (Algorithm algorithm : {Algorithm::kDgrl, Algorithm::kAxialGreedy, Algorithm::kRoundOnly}) {
    AgentConfig cfg = small_config(6);
    cfg.algorithm = algorithm;
    Maze a(MazeConfig{});
    Maze b(MazeConfig{});
    auto r1 = train(a, cfg).metrics;
    auto r2 = train(b, cfg).metrics;
    ASSERT_EQ(r1.size(), r2.size());
    for (std::size_t i = 0; i < r1.size(); ++i) {
      r1[i].wall_time_ms_per_step = r2[i].wall_time_ms_per_step = 0.0;
      EXPECT_EQ(r1[i], r2[i]) << to_string(algorithm) << " episode " << i;
    }
  }
}

TEST(Train, EvaluatesOnScheduleAndAtTheEnd) {
  AgentConfig cfg = small_config(7);
  cfg.eval_every = 3;
  Maze maze(MazeConfig{});
  const auto metrics = train(maze, cfg).metrics;
  ASSERT_EQ(metrics.size(), 7u);
  for (const auto& m : metrics) {
    const bool expected = (m.episode + 1) % 3 == 0 || m.episode == 6;
    EXPECT_EQ(m.eval_return.has_value(), expected) << m.episode;
  }
  EXPECT_TRUE(peak_eval_return(metrics).has_value());
}

TEST(Train, NoUpdatesBeforeUpdateStart) {
  AgentConfig cfg = small_config(20);
  cfg.update_start_frac = 0.25;
  cfg.warmup_random_frac = 0.25;
  JobShop shop(small_shop(), 1);
  const auto metrics = train(shop, cfg).metrics;
  for (const auto& m : metrics) {
    if (m.episode < 5) {
      EXPECT_EQ(m.critic_loss, 0.0) << m.episode;
      EXPECT_EQ(m.actor_loss, 0.0) << m.episode;
    } else {
      EXPECT_GT(m.critic_loss, 0.0) << m.episode;
    }
  }
}

TEST(Train, MazeUpdatesFromTheStart) {
  AgentConfig cfg = small_config(2);
  cfg.update_start_frac = 0.5;
  Maze maze(MazeConfig{});
  const auto metrics = train(maze, cfg).metrics;
  EXPECT_GT(metrics.front().critic_loss, 0.0);
}

TEST(Warmup, RandomActionsAreUniform) {
  const auto spec = ActionSpaceSpec::uniform(2, 0, 2);
  Rng rng(7);
  std::vector<long long> counts(9, 0);
  for (int i = 0; i < 9000; ++i) {
    const auto a = random_action(spec, rng);
    ++counts[static_cast<std::size_t>(a.discrete[0] * 3 + a.discrete[1])];
  }
  const std::vector<double> probs(9, 1.0 / 9.0);
  EXPECT_GT(support::chi_square_p_value(counts, probs), 0.01);
}

TEST(Agent, EvalSelectionDoesNotMutate) {
  Maze maze(MazeConfig{});
  AgentConfig cfg = small_config(1);
  Agent agent(maze, cfg);
  const LayerStack before = agent.actor().layers();
  const Vec obs = maze.reset();
  const Policy p1 = agent.eval_policy(9);
  const Policy p2 = agent.eval_policy(9);
  for (int i = 0; i < 20; ++i) EXPECT_EQ(p1(obs), p2(obs));
  for (std::size_t i = 0; i < before.size(); ++i) {
    EXPECT_EQ(agent.actor().layers()[i].weight, before[i].weight);
  }
}

TEST(Agent, UpdateChangesActorAndCritic) {
  Maze maze(MazeConfig{});
  Agent agent(maze, small_config(1));
  Rng rng(4);
  std::vector<Transition> batch;
  Vec obs = maze.reset();
  for (int i = 0; i < 16; ++i) {
    const auto a = random_action(maze.action_space(), rng);
    const StepResult r = maze.step(a);
    batch.push_back({agent.features(obs), a, r.reward, agent.features(r.observation), r.terminal});
    obs = r.observation;
  }
  const LayerStack actor = agent.actor().layers();
  const auto [actor_loss, critic_loss] = agent.update(batch, 0.5, rng);
  EXPECT_GT(critic_loss, 0.0);
  EXPECT_GE(actor_loss, 0.0);
  EXPECT_NE(agent.actor().layers()[0].weight, actor[0].weight);
}

TEST(Agent, HybridMazeTrains) {
  MazeConfig mc;
  mc.hybrid = true;
  Maze maze(mc);
  const auto metrics = train(maze, small_config(3)).metrics;
  EXPECT_EQ(metrics.size(), 3u);
}

TEST(Agent, SaveLoadRoundTrip) {
  Maze maze(MazeConfig{});
  AgentConfig cfg = small_config(2);
  TrainResult r = train(maze, cfg);
  const auto dir = std::filesystem::temp_directory_path() / "dgrl_agent_io";
  std::filesystem::create_directories(dir);
  const std::string prefix = (dir / "w_").string();
  r.agent->save(prefix);
  AgentConfig other = cfg;
  other.seed = 99;
  Agent loaded(maze, other);
  loaded.load(prefix);
  const Vec s = loaded.features(maze.reset());
  EXPECT_TRUE(loaded.actor().forward(s).isApprox(r.agent->actor().forward(s), 1e-15));
  Rng a(1);
  Rng b(1);
  EXPECT_EQ(loaded.select(s, SelectionMode::kEval, 0.0, a), r.agent->select(s, SelectionMode::kEval, 0.0, b));
}

TEST(Agent, LoadRejectsShapeMismatch) {
  Maze maze(MazeConfig{});
  AgentConfig cfg = small_config(1);
  const auto dir = std::filesystem::temp_directory_path() / "dgrl_agent_mismatch";
  std::filesystem::create_directories(dir);
  const std::string prefix = (dir / "w_").string();
  Agent(maze, cfg).save(prefix);
  cfg.actor_width = 7;
  cfg.critic_width = 9;
  Agent other(maze, cfg);
  EXPECT_THROW(other.load(prefix), FormatError);
}
