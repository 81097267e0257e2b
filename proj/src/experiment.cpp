#include "dgrl/experiment.hpp"

#include "dgrl/csv.hpp"
#include "dgrl/envs/features.hpp"
#include "dgrl/envs/inventory.hpp"
#include "dgrl/envs/job_shop.hpp"
#include "dgrl/envs/maze.hpp"
#include "dgrl/envs/recommender.hpp"
#include "dgrl/errors.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>
#include <thread>

namespace dgrl {

namespace {

struct Entry {
  std::string value;
  int line = 0;
};

bool is_large_maze(const ExperimentConfig& exp) { return exp.actuators > 5 || exp.chosen > 4; }

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream in(s);
  std::string item;
  while (std::getline(in, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

class ConfigReader {
 public:
  ConfigReader(std::map<std::string, Entry> entries, std::string origin)
      : entries_(std::move(entries)), origin_(std::move(origin)) {}

  template <typename Fn>
  void with(const std::string& key, Fn&& fn) {
    const auto it = entries_.find(key);
    if (it == entries_.end()) return;
    try {
      fn(it->second.value);
    } catch (const ConfigError& e) {
      throw ConfigError(where(it->second) + key + ": " + e.what());
    } catch (const std::exception& e) {
      throw ConfigError(where(it->second) + "bad value for " + key + " '" + it->second.value + "'");
    }
  }

  void integer(const std::string& key, int& target) {
    with(key, [&](const std::string& v) { target = to_int(v); });
  }
  void real(const std::string& key, double& target) {
    with(key, [&](const std::string& v) { target = to_real(v); });
  }
  void schedule(const std::string& key, Schedule& target) {
    with(key, [&](const std::string& v) {
      const auto parts = split_list(v);
      if (parts.empty() || parts.size() > 2) throw ConfigError("expected 'value' or 'start,end'");
      target.start = to_real(parts[0]);
      target.end = parts.size() == 2 ? to_real(parts[1]) : target.start;
    });
  }
  std::string where(const Entry& e) const { return origin_ + ":" + std::to_string(e.line) + ": "; }

  static int to_int(const std::string& v) {
    std::size_t used = 0;
    const int out = std::stoi(v, &used);
    if (used != v.size()) throw ConfigError("not an integer");
    return out;
  }
  static double to_real(const std::string& v) {
    std::size_t used = 0;
    const double out = std::stod(v, &used);
    if (used != v.size()) throw ConfigError("not a number");
    return out;
  }

 private:
  std::map<std::string, Entry> entries_;
  std::string origin_;
};

const std::set<std::string>& known_keys() {
  static const std::set<std::string> keys{
      "env", "variant", "algorithm", "actuators", "chosen", "max_step", "actuator_length",
      "movement_noise", "recommendations", "features", "movies", "genres", "feature_seed",
      "machines", "items", "seeds", "out", "workers", "episodes", "warmup_frac",
      "update_start_frac", "update_every", "batch", "gamma", "buffer", "polyak", "huber_delta",
      "actor_width", "critic_width", "fourier_order", "actor_lr", "critic_lr", "proto_noise",
      "dbu_noise", "radius", "samples", "sampling_temperature", "exploration_temperature",
      "sampling_scheme", "metric", "dbu_candidates", "dbu_temperature", "dbu_loss",
      "greedy_steps", "greedy_noise", "eval_every", "eval_episodes"};
  return keys;
}

std::string seed_name(std::uint64_t seed) { return std::to_string(seed); }

}  // namespace

void ExperimentConfig::validate() const {
  static const std::set<std::string> envs{"maze", "job_shop", "inventory", "recommender"};
  static const std::set<std::string> variants{"structured", "irregular", "hybrid"};
  if (!envs.contains(env)) throw ConfigError("unknown environment '" + env + "'");
  if (!variants.contains(variant)) throw ConfigError("unknown variant '" + variant + "'");
  if (variant == "irregular" && env != "maze") throw ConfigError("irregular variant exists for maze only");
  if (variant == "hybrid" && env != "maze" && env != "recommender") {
    throw ConfigError("hybrid variant exists for maze and recommender only");
  }
  if (seeds.empty()) throw ConfigError("seed list is empty");
  if (actuators < 2 || chosen < 1) throw ConfigError("maze needs actuators >= 2 and chosen >= 1");
  if (recommendations < 1 || movies < 2 || genres < 1) throw ConfigError("bad recommender sizes");
  if (machines < 1 || items < 1) throw ConfigError("machines and items must be >= 1");
  if (workers < 0) throw ConfigError("workers must be >= 0");
  agent.validate();
}

AgentConfig default_agent_config(const ExperimentConfig& exp) {
  AgentConfig a;
  a.actor_lr = {5e-5, 1e-5};
  a.critic_lr = {1e-4, 5e-5};
  a.actor_width = 32;
  a.critic_width = 64;
  if (exp.env == "maze") {
    a.proto_noise = {0.5, 0.1};
    a.dbu_noise = {0.5, 0.1};
    a.greedy_steps = 2;
    if (is_large_maze(exp)) {
      a.actor_width = 64;
      a.critic_width = 128;
      a.actor_lr = {1e-5, 5e-6};
      a.critic_lr = {5e-5, 1e-5};
      a.sdn.radius = 2;
      a.sdn.samples = 20;
      a.greedy_noise = {0.5, 0.1};
      a.episodes = 2000;
    } else {
      a.sdn.radius = 1;
      a.sdn.samples = 10;
      a.greedy_noise = {1.0, 0.1};
      a.episodes = 15000;
    }
  } else if (exp.env == "job_shop") {
    a.sdn.radius = 1;
    a.sdn.samples = 10;
    a.proto_noise = {0.1, 0.01};
    a.dbu_noise = {0.05, 0.01};
    a.greedy_steps = 20;
    a.greedy_noise = {1.0, 0.1};
    a.episodes = 1000;
  } else if (exp.env == "inventory") {
    a.sdn.radius = 4;
    a.sdn.samples = 40;
    a.proto_noise = {0.1, 0.05};
    a.dbu_noise = {0.5, 0.2};
    a.greedy_steps = 40;
    a.greedy_noise = {0.5, 0.1};
    a.episodes = 1000;
  } else if (exp.env == "recommender") {
    a.sdn.radius = 10;
    a.dbu_noise = {0.5, 0.1};
    a.proto_noise = {0.1, 0.1};
    a.episodes = 1000;
    if (exp.recommendations > 1) {
      a.actor_width = 128;
      a.critic_width = 256;
      a.actor_lr = {1e-5, 5e-6};
      a.critic_lr = {5e-5, 1e-5};
      a.sdn.samples = 100;
      a.greedy_steps = 10;
      a.greedy_noise = {0.1, 0.1};
      if (exp.variant == "hybrid") a.proto_noise = {0.05, 0.05};
    } else {
      a.actor_lr = {5e-5, 5e-5};
      a.critic_lr = {1e-4, 1e-4};
      a.actor_width = 64;
      a.critic_width = 128;
      a.sdn.samples = 10;
      a.greedy_steps = 2;
      a.greedy_noise = {1.0, 0.1};
    }
    if (exp.variant == "hybrid") a.dbu_noise = {0.1, 0.1};
  }
  a.dbu.candidates = std::max(2, a.sdn.samples);
  a.dbu.perturbation_std = a.dbu_noise.start;
  return a;
}

ExperimentConfig parse_config_text(const std::string& text, const std::string& origin) {
  std::map<std::string, Entry> entries;
  std::istringstream in(text);
  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const auto hash = raw.find('#');
    const std::string line = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (line.empty()) continue;
    const auto eq = line.find('=');
    const std::string where = origin + ":" + std::to_string(line_no) + ": ";
    if (eq == std::string::npos) throw ConfigError(where + "expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (!known_keys().contains(key)) throw ConfigError(where + "unknown key '" + key + "'");
    if (entries.contains(key)) throw ConfigError(where + "duplicate key '" + key + "'");
    entries[key] = {value, line_no};
  }

  ConfigReader r(entries, origin);
  ExperimentConfig exp;
  r.with("env", [&](const std::string& v) { exp.env = v; });
  r.with("variant", [&](const std::string& v) { exp.variant = v; });
  r.integer("actuators", exp.actuators);
  r.integer("chosen", exp.chosen);
  r.real("max_step", exp.max_step);
  r.real("actuator_length", exp.actuator_length);
  r.real("movement_noise", exp.movement_noise);
  r.integer("recommendations", exp.recommendations);
  r.with("features", [&](const std::string& v) { exp.features_path = v; });
  r.integer("movies", exp.movies);
  r.integer("genres", exp.genres);
  r.with("feature_seed", [&](const std::string& v) { exp.feature_seed = std::stoull(v); });
  r.integer("machines", exp.machines);
  r.integer("items", exp.items);
  r.with("seeds", [&](const std::string& v) {
    exp.seeds.clear();
    for (const auto& s : split_list(v)) exp.seeds.push_back(std::stoull(s));
  });
  r.with("out", [&](const std::string& v) { exp.out_dir = v; });
  r.integer("workers", exp.workers);

  AgentConfig& a = exp.agent;
  a = default_agent_config(exp);
  bool dbu_candidates_set = false;
  r.with("algorithm", [&](const std::string& v) { a.algorithm = parse_algorithm(v); });
  r.integer("episodes", a.episodes);
  r.real("warmup_frac", a.warmup_random_frac);
  r.real("update_start_frac", a.update_start_frac);
  r.integer("update_every", a.update_every);
  r.integer("batch", a.batch);
  r.real("gamma", a.gamma);
  r.with("buffer", [&](const std::string& v) { a.buffer_capacity = std::stoull(v); });
  r.real("polyak", a.polyak);
  r.real("huber_delta", a.huber_delta);
  r.integer("actor_width", a.actor_width);
  r.integer("critic_width", a.critic_width);
  r.integer("fourier_order", a.fourier_order);
  r.schedule("actor_lr", a.actor_lr);
  r.schedule("critic_lr", a.critic_lr);
  r.schedule("proto_noise", a.proto_noise);
  r.schedule("dbu_noise", a.dbu_noise);
  r.integer("radius", a.sdn.radius);
  r.integer("samples", a.sdn.samples);
  r.real("sampling_temperature", a.sdn.sampling_temperature);
  r.real("exploration_temperature", a.sdn.exploration_temperature);
  r.with("sampling_scheme", [&](const std::string& v) {
    if (v == "linear") a.sdn.scheme = SamplingScheme::kLinear;
    else if (v == "softmax") a.sdn.scheme = SamplingScheme::kSoftmax;
    else throw ConfigError("expected linear or softmax");
  });
  r.with("dbu_candidates", [&](const std::string& v) {
    a.dbu.candidates = ConfigReader::to_int(v);
    dbu_candidates_set = true;
  });
  r.real("dbu_temperature", a.dbu.temperature);
  r.with("dbu_loss", [&](const std::string& v) {
    if (v == "huber") a.dbu.loss = DistanceLoss::kHuber;
    else if (v == "squared") a.dbu.loss = DistanceLoss::kSquared;
    else throw ConfigError("expected huber or squared");
  });
  r.integer("greedy_steps", a.greedy_steps);
  r.schedule("greedy_noise", a.greedy_noise);
  r.integer("eval_every", a.eval_every);
  r.integer("eval_episodes", a.eval_episodes);
  if (!dbu_candidates_set) a.dbu.candidates = std::max(2, a.sdn.samples);
  a.dbu.perturbation_std = a.dbu_noise.start;
  a.dbu.huber_delta = a.huber_delta;

  Metric metric = Metric::kChebyshev;
  r.with("metric", [&](const std::string& v) { metric = parse_metric(v); });
  if (metric != Metric::kChebyshev && exp.env != "maze") {
    throw ConfigError(origin + ": non-Chebyshev metrics are wired for the maze only");
  }
  exp.metric = metric;

  try {
    exp.validate();
  } catch (const ConfigError& e) {
    throw ConfigError(origin + ": " + e.what());
  }
  return exp;
}

ExperimentConfig parse_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config_text(buf.str(), path);
}

std::unique_ptr<Environment> make_environment(const ExperimentConfig& exp, std::uint64_t seed) {
  if (exp.env == "maze") {
    MazeConfig m;
    m.actuators = exp.actuators;
    m.chosen = exp.chosen;
    m.max_step_size = exp.max_step;
    m.actuator_length = exp.actuator_length;
    m.movement_noise = exp.movement_noise;
    m.structured = exp.variant != "irregular";
    m.hybrid = exp.variant == "hybrid";
    m.metric = exp.metric;
    auto env = std::make_unique<Maze>(m, seed);
    return env;
  }
  if (exp.env == "job_shop") {
    JobShopConfig j;
    j.machines = exp.machines;
    return std::make_unique<JobShop>(j, seed);
  }
  if (exp.env == "inventory") {
    InventoryConfig c;
    c.items = exp.items;
    return std::make_unique<Inventory>(c, seed);
  }
  RecommenderConfig rc;
  rc.recommendations = exp.recommendations;
  rc.hybrid = exp.variant == "hybrid";
  Mat features = exp.features_path.empty() ? synth_feature_matrix(exp.movies, exp.genres, exp.feature_seed)
                                           : load_feature_matrix(exp.features_path);
  return std::make_unique<Recommender>(std::move(features), rc, seed);
}

SummaryStats summarize(const std::vector<double>& values) {
  SummaryStats s;
  if (values.empty()) return s;
  const double n = static_cast<double>(values.size());
  for (double v : values) s.mean += v / n;
  double var = 0.0;
  for (double v : values) var += (v - s.mean) * (v - s.mean) / n;
  s.std = std::sqrt(var);
  std::vector<double> sorted = values;
  std::sort(sorted.begin(), sorted.end());
  const std::size_t m = sorted.size();
  s.median = m % 2 == 1 ? sorted[m / 2] : 0.5 * (sorted[m / 2 - 1] + sorted[m / 2]);
  return s;
}

std::vector<SeedResult> run_experiment(const ExperimentConfig& cfg) {
  cfg.validate();
  namespace fs = std::filesystem;
  const fs::path dir(cfg.out_dir);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw FormatError("cannot create output directory " + dir.string() + ": " + ec.message());

  std::vector<SeedResult> results(cfg.seeds.size());
  std::vector<std::exception_ptr> errors(cfg.seeds.size());
  std::atomic<std::size_t> next{0};
  const auto work = [&] {
    for (std::size_t i = next++; i < cfg.seeds.size(); i = next++) {
      try {
        const std::uint64_t seed = cfg.seeds[i];
        AgentConfig ac = cfg.agent;
        ac.seed = seed;
        auto env = make_environment(cfg, seed);
        TrainResult tr = train(*env, ac);
        const std::string name = seed_name(seed);
        emit_csv(tr.metrics, (dir / ("seed_" + name + ".csv")).string());
        if (tr.agent) tr.agent->save((dir / ("weights_" + name + "_")).string());
        results[i].seed = seed;
        results[i].peak = peak_eval_return(tr.metrics).value_or(std::nan(""));
        results[i].metrics = std::move(tr.metrics);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  unsigned pool = cfg.workers > 0 ? static_cast<unsigned>(cfg.workers)
                                  : std::max(1u, std::thread::hardware_concurrency());
  pool = std::min<unsigned>(pool, static_cast<unsigned>(cfg.seeds.size()));
  std::vector<std::thread> threads;
  for (unsigned t = 0; t < pool; ++t) threads.emplace_back(work);
  for (auto& t : threads) t.join();
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }

  std::vector<double> peaks;
  for (const auto& r : results) peaks.push_back(r.peak);
  const SummaryStats s = summarize(peaks);
  const fs::path summary = dir / "summary.txt";
  std::ofstream out(summary, std::ios::binary);
  if (!out) throw FormatError("cannot write " + summary.string());
  out << "env=" << cfg.env << '\n'
      << "variant=" << cfg.variant << '\n'
      << "algorithm=" << to_string(cfg.agent.algorithm) << '\n'
      << "episodes=" << cfg.agent.episodes << '\n'
      << "seeds=" << cfg.seeds.size() << '\n'
      << "peak_mean=" << format_double(s.mean) << '\n'
      << "peak_median=" << format_double(s.median) << '\n'
      << "peak_std=" << format_double(s.std) << '\n';
  for (const auto& r : results) out << "peak_seed_" << r.seed << '=' << format_double(r.peak) << '\n';
  if (!out) throw FormatError("failed writing " + summary.string());
  return results;
}

std::vector<StepTimeReport> measure_step_time(const std::vector<MazeSize>& sizes, Algorithm algorithm,
                                              int episodes, std::uint64_t seed) {
  if (episodes < 1) throw ParameterError("step time needs at least one episode");
  std::vector<StepTimeReport> out;
  for (const auto& size : sizes) {
    ExperimentConfig exp;
    exp.env = "maze";
    exp.actuators = size.actuators;
    exp.chosen = size.chosen;
    // Same network and neighborhood settings at every size.
    ExperimentConfig large = exp;
    large.actuators = 17;
    large.chosen = 10;
    AgentConfig ac = default_agent_config(large);
    ac.algorithm = algorithm;
    ac.seed = seed;
    auto env = make_environment(exp, seed);
    const Agent agent(*env, ac);
    Rng rng(seed);

    using clock = std::chrono::steady_clock;
    clock::duration spent{};
    long long steps = 0;
    for (int e = 0; e < episodes; ++e) {
      Vec obs = env->reset();
      for (int t = 0; t < env->horizon(); ++t) {
        const auto start = clock::now();
        const ExecutableAction a = agent.select(agent.features(obs), SelectionMode::kEval, 0.0, rng);
        const auto stop = clock::now();
        // The first episode warms caches and is not counted.
        if (e > 0 || episodes == 1) {
          spent += stop - start;
          ++steps;
        }
        const StepResult r = env->step(a);
        obs = r.observation;
        if (r.done()) break;
      }
    }
    StepTimeReport rep;
    rep.descriptor = std::to_string(size.actuators) + "^" + std::to_string(size.chosen);
    rep.algorithm = algorithm;
    rep.steps = steps;
    rep.ms_per_step = std::chrono::duration<double, std::milli>(spent).count() / std::max(1LL, steps);
    out.push_back(rep);
  }
  return out;
}

}  // namespace dgrl
