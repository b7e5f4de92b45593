#pragma once

#include <cstddef>
#include <stdexcept>
#include <vector>

#include "vanetqos/agents/state.hpp"
#include "vanetqos/rng.hpp"

namespace vanetqos {

/// Fixed-capacity FIFO ring of transitions.
class ReplayBuffer {
public:
    explicit ReplayBuffer(std::size_t capacity = 500) : capacity_(capacity) { storage_.reserve(capacity); }

    void push(const Transition& t) {
        if (storage_.size() < capacity_) {
            storage_.push_back(t);
            return;
        }
        storage_[head_] = t;
        head_ = (head_ + 1) % capacity_;
    }

    /// Uniform with replacement.
    std::vector<Transition> sample(std::size_t k, Rng& rng) const {
        if (storage_.empty()) throw std::logic_error("cannot sample from an empty replay buffer");
        std::vector<Transition> out;
        out.reserve(k);
        for (std::size_t i = 0; i < k; ++i) out.push_back(storage_[rng.index(storage_.size())]);
        return out;
    }

    /// i-th oldest stored transition.
    const Transition& at(std::size_t i) const { return storage_.at((head_ + i) % storage_.size()); }

    std::size_t size() const noexcept { return storage_.size(); }
    std::size_t capacity() const noexcept { return capacity_; }
    bool empty() const noexcept { return storage_.empty(); }

private:
    std::size_t capacity_;
    std::size_t head_ = 0;  // oldest element once full
    std::vector<Transition> storage_;
};

}  // namespace vanetqos
