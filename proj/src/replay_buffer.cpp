#include "dgrl/replay_buffer.hpp"

#include "dgrl/errors.hpp"

#include <algorithm>
#include <string>

namespace dgrl {

ReplayBuffer::ReplayBuffer(std::size_t capacity) : capacity_(capacity) {
  if (capacity == 0) throw ParameterError("replay buffer capacity must be positive");
  storage_.reserve(std::min<std::size_t>(capacity, 4096));
}

void ReplayBuffer::push(Transition t) {
  if (storage_.size() < capacity_) {
    storage_.push_back(std::move(t));
    return;
  }
  storage_[cursor_] = std::move(t);
  cursor_ = (cursor_ + 1) % capacity_;
}

std::vector<Transition> ReplayBuffer::sample(std::size_t batch, Rng& rng) const {
  if (storage_.size() < batch || batch == 0) {
    throw StateError("cannot sample " + std::to_string(batch) + " transitions from a buffer of " +
                     std::to_string(storage_.size()));
  }
  std::uniform_int_distribution<std::size_t> pick(0, storage_.size() - 1);
  std::vector<Transition> out;
  out.reserve(batch);
  for (std::size_t i = 0; i < batch; ++i) out.push_back(storage_[pick(rng)]);
  return out;
}

const Transition& ReplayBuffer::at(std::size_t i) const {
  if (i >= storage_.size()) throw StateError("replay index out of range");
  if (storage_.size() < capacity_) return storage_[i];
  return storage_[(cursor_ + i) % capacity_];
}

}  // namespace dgrl
