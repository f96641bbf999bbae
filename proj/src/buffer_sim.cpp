#include "lqf/buffer_sim.hpp"

namespace lqf {

BufferSimulator::BufferSimulator(SystemConfig config)
    : config_(config), lengths_(static_cast<std::size_t>(config.n), 0), rng_(config.seed) {
    config_.validate();
    pending_dt_ = rng_.exponential((1.0 + config_.lambda) * static_cast<double>(config_.n));
}

void BufferSimulator::advance_to(double t) {
    const double rate = (1.0 + config_.lambda) * static_cast<double>(config_.n);
    while (now_ + pending_dt_ <= t) {
        now_ += pending_dt_;
        apply_event();
        pending_dt_ = rng_.exponential(rate);
    }
}

void BufferSimulator::apply_event() {
    const auto n = static_cast<std::uint64_t>(config_.n);
    if (rng_.uniform() * (1.0 + config_.lambda) < config_.lambda) {
        ++lengths_[rng_.below(n)];
        ++total_tasks_;
        return;
    }
    std::size_t chosen = rng_.below(n);
    std::int64_t longest = lengths_[chosen];
    std::int64_t ties = 1;
    for (std::int64_t j = 1; j < config_.d; ++j) {
        const std::size_t candidate = rng_.below(n);
        const std::int64_t length = lengths_[candidate];
        if (length > longest) {
            longest = length;
            chosen = candidate;
            ties = 1;
        } else if (length == longest && longest > 0) {
            // reservoir step keeps each tied buffer with probability 1/ties
            ++ties;
            if (rng_.below(static_cast<std::uint64_t>(ties)) == 0) chosen = candidate;
        }
    }
    if (longest == 0) return;  // wasted
    --lengths_[chosen];
    --total_tasks_;
}

CountState BufferSimulator::counts() const {
    std::vector<std::int64_t> counts(1, 0);
    for (auto length : lengths_) {
        if (static_cast<std::size_t>(length) >= counts.size()) counts.resize(static_cast<std::size_t>(length) + 1, 0);
        ++counts[static_cast<std::size_t>(length)];
    }
    return CountState(config_.n, std::move(counts));
}

double BufferSimulator::mean_queue_length() const {
    return static_cast<double>(total_tasks_) / static_cast<double>(config_.n);
}

}  // namespace lqf
