#pragma once

// Movie recommendation with a simulated user. Discrete variant: the user accepts
// a recommended movie j with probability sigmoid(gain * S_ij), otherwise picks a
// non-recommended movie. Hybrid variant: each recommendation carries a price and
// the user follows a multinomial logit choice with an outside option.

#include "dgrl/envs/environment.hpp"

#include <cstdint>
#include <span>
#include <vector>

namespace dgrl {

struct RecommenderConfig {
  int recommendations = 1;  // d
  bool hybrid = false;
  double leave_after_recommended = 0.1;
  double leave_after_other = 0.2;
  double sigmoid_gain = 5.0;
  double kappa_similarity = 3.0;
  double kappa_price = 0.5;
  double kappa_outside = 1.0;
  double max_price = 5.0;
  int max_steps = 100;

  void validate() const;
};

/// 1 / (1 + exp(-gain * s)).
double acceptance_probability(double similarity, double gain);

/// Softmax of deterministic utilities: the closed-form logit choice probabilities.
std::vector<double> logit_probabilities(std::span<const double> utilities);

/// Index of the option with the largest utility plus i.i.d. standard Gumbel noise.
std::size_t gumbel_choice(std::span<const double> utilities, Rng& rng);

class Recommender : public Environment {
 public:
  Recommender(Mat features, RecommenderConfig cfg, std::uint64_t seed = 0);

  Vec reset() override;
  StepResult step(const ExecutableAction& action) override;
  void seed(std::uint64_t seed) override { rng_.seed(seed); }
  std::unique_ptr<Environment> clone() const override {
    return std::make_unique<Recommender>(*this);
  }

  const ActionSpaceSpec& action_space() const override { return spec_; }
  int observation_dim() const override { return static_cast<int>(features_.cols()); }
  int horizon() const override { return cfg_.max_steps; }
  EnvTraits traits() const override;

  /// Distinct recommended movies in action order, with their prices (hybrid).
  struct Offer {
    std::vector<int> movies;
    std::vector<double> prices;
  };
  Offer offer(const ExecutableAction& action) const;

  /// Deterministic utilities: outside option first, then each offered movie.
  std::vector<double> mnl_utilities(const Offer& offer) const;

  int catalog_size() const { return static_cast<int>(features_.rows()); }
  int current() const { return current_; }
  void set_current(int movie);
  double movie_reward(int movie) const { return movie_reward_(movie); }
  const Mat& similarity() const { return similarity_; }

 private:
  Vec observe() const;
  int random_other_movie(const std::vector<int>& excluded);

  Mat features_;
  Mat similarity_;
  Vec movie_reward_;
  double feature_scale_ = 1.0;
  RecommenderConfig cfg_;
  ActionSpaceSpec spec_;
  Rng rng_;
  int current_ = 0;
  int steps_ = 0;
};

}  // namespace dgrl
