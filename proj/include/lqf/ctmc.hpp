#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "lqf/rng.hpp"

namespace lqf {

/// Parameters of one n-buffer randomized longest-queue-first system.
struct SystemConfig {
    std::int64_t n = 1;       // buffers; the server works at rate n
    std::int64_t d = 1;       // buffers sampled (with replacement) per service
    double lambda = 0.5;      // per-buffer Poisson arrival rate
    double horizon = 0.0;     // unscaled simulation time
    std::uint64_t seed = 0;

    /// Throws ConfigError unless n >= 1, d >= 1, 0 < lambda < 1, horizon >= 0.
    void validate() const;
};

/// Occupancy counts: counts()[l] is the number of buffers holding exactly l
/// tasks. The vector never has a trailing zero entry.
class CountState {
public:
    CountState() = default;
    CountState(std::int64_t n, std::vector<std::int64_t> counts);

    std::int64_t n() const { return n_; }
    std::span<const std::int64_t> counts() const { return counts_; }
    std::int64_t max_length() const { return static_cast<std::int64_t>(counts_.size()) - 1; }

    /// Number of buffers with queue length >= k.
    std::int64_t at_least(std::int64_t k) const;
    /// F_k = at_least(k) / n.
    double tail_fraction(std::int64_t k) const;
    /// Total queued tasks across all buffers.
    std::int64_t total_tasks() const;

    /// One buffer at length `from` gains a task.
    void add_task(std::int64_t from);
    /// One buffer at length `from` >= 1 loses a task.
    void remove_task(std::int64_t from);

    friend bool operator==(const CountState&, const CountState&) = default;

private:
    std::int64_t n_ = 0;
    std::vector<std::int64_t> counts_;
};

enum class EventKind { arrival, service, wasted };

struct EventRecord {
    EventKind kind = EventKind::wasted;
    double time = 0.0;
    std::int64_t affected_length = -1;  // -1 for wasted events
};

/// Sampled tail fractions F_{n,k}(t), k = 0..k_max, one row per record time.
class TailFractionPath {
public:
    TailFractionPath(std::vector<double> record_times, std::int64_t k_max);

    std::span<const double> record_times() const { return record_times_; }
    std::int64_t k_max() const { return k_max_; }
    std::size_t rows() const { return record_times_.size(); }

    double at(std::size_t row, std::int64_t k) const {
        return fractions_[row * static_cast<std::size_t>(k_max_ + 1) + static_cast<std::size_t>(k)];
    }
    std::span<const double> row(std::size_t r) const {
        const auto width = static_cast<std::size_t>(k_max_ + 1);
        return std::span<const double>(fractions_).subspan(r * width, width);
    }
    void set_row(std::size_t r, const CountState& state);

    friend bool operator==(const TailFractionPath&, const TailFractionPath&) = default;

private:
    std::vector<double> record_times_;
    std::int64_t k_max_;
    std::vector<double> fractions_;
};

/// All-empty state, or the given counts after checking they sum to n.
CountState initial_state(std::int64_t n, std::optional<std::vector<std::int64_t>> initial_counts = std::nullopt);

/// Maximum queue length among d buffers drawn uniformly with replacement.
/// Uses the tail identity P(M <= l) = (1 - F_{l+1})^d with a single uniform.
std::int64_t sample_max_length(const CountState& state, std::int64_t d, Rng& rng);

/// Exact pmf of sample_max_length: entry m is (1-F_{m+1})^d - (1-F_m)^d.
std::vector<double> max_length_pmf(const CountState& state, std::int64_t d);

struct StepResult {
    EventRecord event;
    double dt = 0.0;
};

/// Draws the next event of the aggregate clock (rate (1+lambda)n) and applies
/// it to `state` in place. `now` is the time before the event.
StepResult step(CountState& state, const SystemConfig& config, Rng& rng, double now = 0.0);

/// Event loop over the count representation. Only states at requested
/// times are observable, so each advance draws the number of aggregate-clock
/// ticks in the interval and applies that many jump-chain events.
class CountSimulator {
public:
    CountSimulator(SystemConfig config, CountState initial);

    /// Applies every event in (time(), t].
    void advance_to(double t);

    const CountState& state() const { return state_; }
    double time() const { return now_; }
    std::uint64_t events() const { return events_; }

private:
    SystemConfig config_;
    CountState state_;
    Rng rng_;
    double now_ = 0.0;
    std::uint64_t events_ = 0;
};

/// Simulates one trajectory, recording F_{n,0..k_max} at each record time
/// (state after the last event at or before that time).
TailFractionPath simulate(const SystemConfig& config, std::span<const double> record_times, std::int64_t k_max,
                          const CountState& initial);

/// (t, d^k F_{n,k}(t/d)) for every record time of `path`.
std::vector<std::pair<double, double>> scaled_view(const TailFractionPath& path, std::int64_t d, std::int64_t k);

/// Same, at the requested scaled times; each t/d must be a record time of
/// `path` (InterpolationError otherwise).
std::vector<std::pair<double, double>> scaled_view(const TailFractionPath& path, std::int64_t d, std::int64_t k,
                                                   std::span<const double> scaled_times);

/// Average queue length per buffer, equal to sum_{k>=1} F_k.
double mean_queue_length(const CountState& state);

}  // namespace lqf
