#pragma once

// Common episodic interface. Observations are normalized to [0, 1].

#include "dgrl/action_space.hpp"
#include "dgrl/nn.hpp"

#include <cstdint>
#include <memory>
#include <string>

namespace dgrl {

struct StepResult {
  Vec observation;
  double reward = 0.0;
  bool terminal = false;   // absorbing; no bootstrap
  bool truncated = false;  // time limit; bootstrap from observation
  bool done() const { return terminal || truncated; }
};

/// Per-environment training conventions.
struct EnvTraits {
  std::string name;
  bool random_warmup = false;       // uniform-random policy early in training
  bool fourier_features = false;    // Fourier basis on the state
  bool encode_state_first = false;  // critic sees the state alone in its first layer
};

class Environment {
 public:
  virtual ~Environment() = default;

  virtual Vec reset() = 0;
  virtual StepResult step(const ExecutableAction& action) = 0;
  virtual void seed(std::uint64_t seed) = 0;
  virtual std::unique_ptr<Environment> clone() const = 0;

  virtual const ActionSpaceSpec& action_space() const = 0;
  virtual int observation_dim() const = 0;
  virtual int horizon() const = 0;
  virtual EnvTraits traits() const = 0;
};

/// Throws ActionError unless `action` fits `spec`.
void check_action(const ExecutableAction& action, const ActionSpaceSpec& spec);

}  // namespace dgrl
