#pragma once

#include <cstdint>
#include <vector>

#include "lqf/ctmc.hpp"
#include "lqf/rng.hpp"

namespace lqf {

/// Buffer-level event loop that executes the scheduling policy literally:
/// each service opportunity draws d buffer indices with replacement, serves
/// the longest, and breaks ties uniformly. Same law as CountSimulator, but
/// its cost per service grows with d, which is what the performance/complexity
/// trade-off measures.
class BufferSimulator {
public:
    /// Starts from all-empty buffers.
    explicit BufferSimulator(SystemConfig config);

    void advance_to(double t);

    std::span<const std::int64_t> queue_lengths() const { return lengths_; }
    CountState counts() const;
    double mean_queue_length() const;
    double time() const { return now_; }

private:
    void apply_event();

    SystemConfig config_;
    std::vector<std::int64_t> lengths_;
    Rng rng_;
    double now_ = 0.0;
    double pending_dt_ = 0.0;
    std::int64_t total_tasks_ = 0;
};

}  // namespace lqf
