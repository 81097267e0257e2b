#include "dgrl/agent.hpp"

#include "dgrl/errors.hpp"

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <fstream>
#include <memory>

namespace dgrl {

namespace {

// Independent generator per purpose so that, e.g., evaluation never shifts the
// training stream.
Rng stream(std::uint64_t seed, std::uint32_t id) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32), id};
  return Rng(seq);
}

enum Stream : std::uint32_t { kInit = 1, kAct, kUpdate, kEnv, kEval };

double median_of(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

}  // namespace

Algorithm parse_algorithm(const std::string& name) {
  if (name == "dgrl") return Algorithm::kDgrl;
  if (name == "axial-greedy") return Algorithm::kAxialGreedy;
  if (name == "round-only") return Algorithm::kRoundOnly;
  throw ConfigError("unknown algorithm '" + name + "'");
}

std::string to_string(Algorithm algorithm) {
  switch (algorithm) {
    case Algorithm::kDgrl: return "dgrl";
    case Algorithm::kAxialGreedy: return "axial-greedy";
    case Algorithm::kRoundOnly: return "round-only";
  }
  return "unknown";
}

double linear_decay(double start, double end, int episode, int total) {
  if (total < 1) throw ParameterError("linear_decay: total must be >= 1");
  if (episode >= total) return end;
  return start + (end - start) * static_cast<double>(std::max(episode, 0)) / total;
}

void AgentConfig::validate() const {
  const auto frac = [](double f) { return f >= 0.0 && f <= 1.0; };
  if (episodes < 0) throw ConfigError("episodes must be >= 0");
  if (!frac(warmup_random_frac) || !frac(update_start_frac)) {
    throw ConfigError("warmup and update-start fractions must lie in [0, 1]");
  }
  if (update_every < 1 || batch < 1) throw ConfigError("update_every and batch must be >= 1");
  if (!(gamma >= 0.0 && gamma <= 1.0)) throw ConfigError("gamma must lie in [0, 1]");
  if (buffer_capacity < static_cast<std::size_t>(batch)) throw ConfigError("buffer smaller than batch");
  if (actor_width < 1 || critic_width < 1) throw ConfigError("network widths must be >= 1");
  if (fourier_order < 0) throw ConfigError("fourier order must be >= 0");
  for (const Schedule* s : {&actor_lr, &critic_lr}) {
    if (!(s->start > 0.0 && s->end > 0.0)) throw ConfigError("learning rates must be > 0");
  }
  for (const Schedule* s : {&proto_noise, &dbu_noise, &greedy_noise}) {
    if (!(s->start >= 0.0 && s->end >= 0.0)) throw ConfigError("noise levels must be >= 0");
  }
  if (!(dbu_noise.start > 0.0 && dbu_noise.end > 0.0)) throw ConfigError("DBU noise must be > 0");
  if (greedy_steps < 1) throw ConfigError("greedy_steps must be >= 1");
  if (eval_every < 0 || eval_episodes < 1) throw ConfigError("bad evaluation schedule");
  try {
    sdn.validate();
    dbu.validate();
  } catch (const ParameterError& e) {
    throw ConfigError(e.what());
  }
}

int AgentConfig::eval_interval() const {
  if (eval_every > 0) return eval_every;
  return std::max(1, episodes / 50);
}

EvalSummary evaluate(Environment& env, const Policy& policy, int episodes, std::uint64_t seed) {
  if (episodes < 1) throw ParameterError("evaluate: episodes must be >= 1");
  env.seed(seed);
  EvalSummary out;
  for (int e = 0; e < episodes; ++e) {
    Vec obs = env.reset();
    double ret = 0.0;
    for (int t = 0; t < env.horizon(); ++t) {
      const StepResult r = env.step(policy(obs));
      ret += r.reward;
      obs = r.observation;
      if (r.done()) break;
    }
    out.returns.push_back(ret);
  }
  const double n = static_cast<double>(episodes);
  for (double r : out.returns) out.mean += r / n;
  double var = 0.0;
  for (double r : out.returns) var += (r - out.mean) * (r - out.mean) / n;
  out.std = std::sqrt(var);
  out.median = median_of(out.returns);
  return out;
}

Agent::Agent(const Environment& env, const AgentConfig& cfg)
    : cfg_(cfg), traits_(env.traits()), spec_(env.action_space()) {
  cfg_.validate();
  int in_dim = env.observation_dim();
  if (traits_.fourier_features) {
    fourier_ = FourierConfig{cfg_.fourier_order, in_dim};
    in_dim = fourier_->output_dim();
  }
  Rng init = stream(cfg_.seed, kInit);
  const int w = cfg_.actor_width;
  const std::array<int, 5> sizes{in_dim, w, w, w, spec_.total_dims()};
  actor_ = Mlp(sizes, Activation::kRelu, Activation::kTanh, init);
  CriticArchitecture arch;
  arch.state_dim = in_dim;
  arch.action_dim = spec_.total_dims();
  arch.width = cfg_.critic_width;
  arch.encode_state_first = traits_.encode_state_first;
  critics_ = CriticPair(arch, init, cfg_.polyak);
  actor_opt_ = AdamState::for_params(actor_.layers(), cfg_.actor_lr.start);
  critic_opt_ = make_critic_optimizers(critics_, cfg_.critic_lr.start);
}

Vec Agent::features(const Vec& observation) const {
  return fourier_ ? fourier_features(observation, *fourier_) : observation;
}

ActionScorer Agent::online_scorer() const {
  return [this](const Vec& state, std::span<const ExecutableAction> candidates) {
    return critics_.min_online(state, action_matrix(candidates, spec_));
  };
}

ActionScorer Agent::target_scorer() const {
  return [this](const Vec& state, std::span<const ExecutableAction> candidates) {
    return critics_.min_target(state, action_matrix(candidates, spec_));
  };
}

ExecutableAction Agent::select_with(const Vec& features, const ActionScorer& scorer,
                                    SelectionMode mode, double sigma, Rng& rng) const {
  switch (cfg_.algorithm) {
    case Algorithm::kDgrl: {
      SdnConfig sdn = cfg_.sdn;
      sdn.proto_noise = mode == SelectionMode::kTrain ? sigma : 0.0;
      if (spec_.continuous_dims() == 0) {
        return sdn_select(features, actor_, scorer, sdn, spec_, mode, rng);
      }
      const double half_range = 0.5 * (spec_.continuous_upper[0] - spec_.continuous_lower[0]);
      const double sigma_c = mode == SelectionMode::kTrain ? sigma * half_range : 0.0;
      return hybrid_select(features, actor_, scorer, sdn, spec_, sigma_c, mode, rng);
    }
    case Algorithm::kAxialGreedy:
      return axial_greedy_baseline(features, actor_, scorer, cfg_.greedy_steps, spec_, sigma, mode, &rng);
    case Algorithm::kRoundOnly:
      return round_only_baseline(features, actor_, spec_, sigma, mode, &rng);
  }
  throw StateError("unknown algorithm");
}

ExecutableAction Agent::select(const Vec& features, SelectionMode mode, double sigma, Rng& rng) const {
  return select_with(features, online_scorer(), mode, sigma, rng);
}

Policy Agent::eval_policy(std::uint64_t seed) const {
  auto rng = std::make_shared<Rng>(stream(seed, kEval));
  return [this, rng](const Vec& observation) {
    return select(features(observation), SelectionMode::kEval, 0.0, *rng);
  };
}

void Agent::set_learning_rates(double actor_lr, double critic_lr) {
  if (!(actor_lr > 0.0)) throw ParameterError("actor learning rate must be positive");
  actor_opt_.learning_rate = actor_lr;
  critics_.q1.set_learning_rate(critic_opt_.q1, critic_lr);
  critics_.q2.set_learning_rate(critic_opt_.q2, critic_lr);
}

std::pair<double, double> Agent::update(std::span<const Transition> batch, double dbu_noise, Rng& rng) {
  const ActionScorer target = target_scorer();
  const NextActionSelector next = [&](const Vec& s) {
    return select_with(s, target, SelectionMode::kEval, 0.0, rng);
  };
  const double critic_loss =
      critic_update(critics_, batch, spec_, next, cfg_.gamma, critic_opt_, cfg_.huber_delta);
  polyak_update(critics_);

  DbuConfig dbu = cfg_.dbu;
  dbu.perturbation_std = dbu_noise;
  const ActionScorer scorer = online_scorer();
  std::vector<Vec> states;
  std::vector<Vec> targets;
  states.reserve(batch.size());
  targets.reserve(batch.size());
  for (const auto& t : batch) {
    states.push_back(t.state);
    targets.push_back(build_dbu_target(t.state, actor_, scorer, dbu, spec_, rng));
  }
  const double actor_loss = dbu_actor_update(actor_, actor_opt_, states, targets, dbu);
  return {actor_loss, critic_loss};
}

namespace {

void write_net(const std::string& path, const Mlp& net) {
  std::ofstream out(path);
  if (!out) throw FormatError("cannot write " + path);
  net.save(out);
  if (!out) throw FormatError("failed writing " + path);
}

Mlp read_net(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open " + path);
  return Mlp::load(in);
}

void write_critic(const std::string& path, const CriticNet& q) {
  std::ofstream out(path);
  if (!out) throw FormatError("cannot write " + path);
  out << (q.encoder().empty() ? 0 : 1) << '\n';
  if (!q.encoder().empty()) q.encoder().save(out);
  q.head().save(out);
  if (!out) throw FormatError("failed writing " + path);
}

void read_critic(const std::string& path, CriticNet& q) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open " + path);
  int has_encoder = 0;
  in >> has_encoder;
  if (has_encoder != (q.encoder().empty() ? 0 : 1)) throw FormatError(path + ": critic layout mismatch");
  Mlp encoder = has_encoder ? Mlp::load(in) : Mlp();
  Mlp head = Mlp::load(in);
  const auto same = [](const Mlp& a, const Mlp& b) {
    if (a.layers().size() != b.layers().size()) return false;
    for (std::size_t i = 0; i < a.layers().size(); ++i) {
      if (a.layers()[i].weight.rows() != b.layers()[i].weight.rows() ||
          a.layers()[i].weight.cols() != b.layers()[i].weight.cols()) {
        return false;
      }
    }
    return true;
  };
  if (!same(encoder, q.encoder()) || !same(head, q.head())) {
    throw FormatError(path + ": critic shape mismatch");
  }
  q.encoder() = std::move(encoder);
  q.head() = std::move(head);
}

}  // namespace

void Agent::save(const std::string& prefix) const {
  write_net(prefix + "actor.txt", actor_);
  write_critic(prefix + "critic1.txt", critics_.q1);
  write_critic(prefix + "critic2.txt", critics_.q2);
}

void Agent::load(const std::string& prefix) {
  Mlp actor = read_net(prefix + "actor.txt");
  if (actor.input_dim() != actor_.input_dim() || actor.output_dim() != actor_.output_dim()) {
    throw FormatError(prefix + "actor.txt: actor shape mismatch");
  }
  actor_ = std::move(actor);
  read_critic(prefix + "critic1.txt", critics_.q1);
  read_critic(prefix + "critic2.txt", critics_.q2);
  critics_.q1_target = critics_.q1;
  critics_.q2_target = critics_.q2;
}

TrainResult train(Environment& env, const AgentConfig& cfg) {
  cfg.validate();
  TrainResult result;
  if (cfg.episodes == 0) return result;
  Agent& agent = result.agent.emplace(env, cfg);
  const EnvTraits traits = env.traits();
  const ActionSpaceSpec& spec = env.action_space();
  const int total = cfg.episodes;
  const int warmup_end =
      traits.random_warmup ? static_cast<int>(std::lround(cfg.warmup_random_frac * total)) : 0;
  const int update_start =
      traits.random_warmup ? static_cast<int>(std::lround(cfg.update_start_frac * total)) : 0;
  const int eval_interval = cfg.eval_interval();

  Rng act_rng = stream(cfg.seed, kAct);
  Rng update_rng = stream(cfg.seed, kUpdate);
  ReplayBuffer buffer(cfg.buffer_capacity);
  std::unique_ptr<Environment> eval_env = env.clone();
  env.seed(stream(cfg.seed, kEnv)());
  long long steps = 0;

  for (int episode = 0; episode < total; ++episode) {
    agent.set_learning_rates(cfg.actor_lr.at(episode, total), cfg.critic_lr.at(episode, total));
    const double sigma = cfg.algorithm == Algorithm::kAxialGreedy ? cfg.greedy_noise.at(episode, total)
                                                                  : cfg.proto_noise.at(episode, total);
    const double sigma_b = cfg.dbu_noise.at(episode, total);
    const bool random_policy = episode < warmup_end;
    const bool learning = episode >= update_start;

    MetricsRecord rec;
    rec.episode = episode;
    int updates = 0;
    int episode_steps = 0;
    const auto started = std::chrono::steady_clock::now();
    Vec obs = env.reset();
    Vec state = agent.features(obs);
    for (int t = 0; t < env.horizon(); ++t) {
      const ExecutableAction action = random_policy
                                          ? random_action(spec, act_rng)
                                          : agent.select(state, SelectionMode::kTrain, sigma, act_rng);
      const StepResult r = env.step(action);
      Vec next_state = agent.features(r.observation);
      buffer.push({state, action, r.reward, next_state, r.terminal});
      rec.train_return += r.reward;
      ++steps;
      ++episode_steps;
      if (learning && steps % cfg.update_every == 0 &&
          buffer.size() >= static_cast<std::size_t>(cfg.batch)) {
        const auto batch = buffer.sample(static_cast<std::size_t>(cfg.batch), update_rng);
        const auto [actor_loss, critic_loss] = agent.update(batch, sigma_b, update_rng);
        rec.actor_loss += actor_loss;
        rec.critic_loss += critic_loss;
        ++updates;
      }
      state = std::move(next_state);
      if (r.done()) break;
    }
    const double elapsed =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - started).count();
    rec.wall_time_ms_per_step = episode_steps > 0 ? elapsed / episode_steps : 0.0;
    if (updates > 0) {
      rec.actor_loss /= updates;
      rec.critic_loss /= updates;
    }
    if ((episode + 1) % eval_interval == 0 || episode + 1 == total) {
      const std::uint64_t eval_seed = stream(cfg.seed, kEval)();
      rec.eval_return = evaluate(*eval_env, agent.eval_policy(eval_seed), cfg.eval_episodes, eval_seed).mean;
    }
    result.metrics.push_back(rec);
  }
  return result;
}

std::optional<double> peak_eval_return(const std::vector<MetricsRecord>& metrics) {
  std::optional<double> best;
  for (const auto& m : metrics) {
    if (m.eval_return && (!best || *m.eval_return > *best)) best = m.eval_return;
  }
  return best;
}

}  // namespace dgrl
