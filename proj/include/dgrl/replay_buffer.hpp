#pragma once

#include "dgrl/action_space.hpp"
#include "dgrl/nn.hpp"

#include <cstddef>
#include <vector>

namespace dgrl {

/// One replay record. States are stored in the representation fed to the networks.
struct Transition {
  Vec state;
  ExecutableAction action;
  double reward = 0.0;
  Vec next_state;
  bool terminal = false;
};

/// Fixed-capacity ring buffer with uniform sampling (with replacement).
/// Single writer; concurrent sample() calls are safe only while nobody pushes.
class ReplayBuffer {
 public:
  explicit ReplayBuffer(std::size_t capacity);

  /// Evicts the oldest entry once full.
  void push(Transition t);

  /// Throws StateError if fewer than `batch` transitions are stored.
  std::vector<Transition> sample(std::size_t batch, Rng& rng) const;

  std::size_t size() const { return storage_.size(); }
  std::size_t capacity() const { return capacity_; }

  /// i-th stored transition counted from the oldest.
  const Transition& at(std::size_t i) const;

 private:
  std::size_t capacity_;
  std::size_t cursor_ = 0;  // next slot to overwrite once full
  std::vector<Transition> storage_;
};

}  // namespace dgrl
