#include "dgrl/envs/recommender.hpp"

#include "dgrl/envs/features.hpp"
#include "dgrl/errors.hpp"

#include <algorithm>
#include <cmath>

namespace dgrl {

void RecommenderConfig::validate() const {
  if (recommendations < 1) throw ParameterError("recommender needs at least one recommendation");
  const auto prob = [](double p) { return p >= 0.0 && p <= 1.0; };
  if (!prob(leave_after_recommended) || !prob(leave_after_other)) {
    throw ParameterError("leave probabilities must lie in [0, 1]");
  }
  if (!(max_price > 0.0)) throw ParameterError("max price must be > 0");
  if (max_steps < 1) throw ParameterError("recommender max_steps must be >= 1");
}

double acceptance_probability(double similarity, double gain) {
  return 1.0 / (1.0 + std::exp(-gain * similarity));
}

std::vector<double> logit_probabilities(std::span<const double> utilities) {
  if (utilities.empty()) throw StateError("logit over no options");
  const double top = *std::max_element(utilities.begin(), utilities.end());
  std::vector<double> p(utilities.size());
  double total = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    p[i] = std::exp(utilities[i] - top);
    total += p[i];
  }
  for (double& v : p) v /= total;
  return p;
}

std::size_t gumbel_choice(std::span<const double> utilities, Rng& rng) {
  if (utilities.empty()) throw StateError("choice over no options");
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::size_t best = 0;
  double best_u = -INFINITY;
  for (std::size_t i = 0; i < utilities.size(); ++i) {
    double u = unit(rng);
    while (u <= 0.0) u = unit(rng);
    const double total = utilities[i] - std::log(-std::log(u));
    if (total > best_u) {
      best_u = total;
      best = i;
    }
  }
  return best;
}

Recommender::Recommender(Mat features, RecommenderConfig cfg, std::uint64_t seed)
    : features_(std::move(features)), cfg_(cfg), rng_(seed) {
  cfg_.validate();
  if (features_.rows() < 2) throw DataError("recommender needs at least two movies");
  if ((features_.array() < 0.0).any()) throw DataError("recommender features must be non-negative");
  similarity_ = build_similarity(features_);
  movie_reward_ = Vec::Ones(features_.rows()) + features_.rowwise().mean();
  feature_scale_ = features_.maxCoeff();
  spec_ = ActionSpaceSpec::uniform(cfg_.recommendations, 0, catalog_size() - 1);
  if (cfg_.hybrid) {
    spec_.continuous_lower.assign(static_cast<std::size_t>(cfg_.recommendations), 0.0);
    spec_.continuous_upper.assign(static_cast<std::size_t>(cfg_.recommendations), cfg_.max_price);
  }
}

Vec Recommender::observe() const { return features_.row(current_).transpose() / feature_scale_; }

Vec Recommender::reset() {
  std::uniform_int_distribution<int> pick(0, catalog_size() - 1);
  current_ = pick(rng_);
  steps_ = 0;
  return observe();
}

void Recommender::set_current(int movie) {
  if (movie < 0 || movie >= catalog_size()) throw ActionError("movie index out of catalog");
  current_ = movie;
}

Recommender::Offer Recommender::offer(const ExecutableAction& action) const {
  check_action(action, spec_);
  Offer out;
  for (std::size_t i = 0; i < action.discrete.size(); ++i) {
    const int movie = action.discrete[i];
    if (std::find(out.movies.begin(), out.movies.end(), movie) != out.movies.end()) continue;
    out.movies.push_back(movie);
    out.prices.push_back(cfg_.hybrid ? action.continuous[i] : 0.0);
  }
  return out;
}

std::vector<double> Recommender::mnl_utilities(const Offer& offer) const {
  std::vector<double> u{cfg_.kappa_outside};
  for (std::size_t i = 0; i < offer.movies.size(); ++i) {
    u.push_back(cfg_.kappa_similarity * similarity_(current_, offer.movies[i]) -
                cfg_.kappa_price * offer.prices[i]);
  }
  return u;
}

int Recommender::random_other_movie(const std::vector<int>& excluded) {
  const int n = catalog_size();
  if (static_cast<int>(excluded.size()) >= n) {
    return std::uniform_int_distribution<int>(0, n - 1)(rng_);
  }
  std::uniform_int_distribution<int> pick(0, n - 1);
  while (true) {
    const int m = pick(rng_);
    if (std::find(excluded.begin(), excluded.end(), m) == excluded.end()) return m;
  }
}

StepResult Recommender::step(const ExecutableAction& action) {
  const Offer o = offer(action);
  int chosen = -1;
  double price = 0.0;
  if (cfg_.hybrid) {
    const std::size_t pick = gumbel_choice(mnl_utilities(o), rng_);
    if (pick > 0) {
      chosen = o.movies[pick - 1];
      price = o.prices[pick - 1];
    }
  } else {
    std::vector<std::size_t> order(o.movies.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::shuffle(order.begin(), order.end(), rng_);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (std::size_t i : order) {
      const double p = acceptance_probability(similarity_(current_, o.movies[i]), cfg_.sigmoid_gain);
      if (unit(rng_) < p) {
        chosen = o.movies[i];
        break;
      }
    }
  }
  const bool recommended = chosen >= 0;
  if (!recommended) chosen = random_other_movie(o.movies);

  StepResult out;
  out.reward = movie_reward_(chosen) + price;
  current_ = chosen;
  ++steps_;
  const double leave = recommended ? cfg_.leave_after_recommended : cfg_.leave_after_other;
  out.terminal = std::uniform_real_distribution<double>(0.0, 1.0)(rng_) < leave;
  out.truncated = !out.terminal && steps_ >= cfg_.max_steps;
  out.observation = observe();
  return out;
}

EnvTraits Recommender::traits() const { return {"recommender", true, true, true}; }

}  // namespace dgrl
