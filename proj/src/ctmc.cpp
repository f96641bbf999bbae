#include "lqf/ctmc.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include <fmt/format.h>

#include "lqf/errors.hpp"

namespace lqf {

void SystemConfig::validate() const {
    if (n < 1) throw ConfigError(fmt::format("n must be >= 1, got {}", n));
    if (d < 1) throw ConfigError(fmt::format("d must be >= 1, got {}", d));
    if (!(lambda > 0.0 && lambda < 1.0)) throw ConfigError(fmt::format("lambda must lie in (0,1), got {}", lambda));
    if (!(horizon >= 0.0)) throw ConfigError(fmt::format("horizon must be >= 0, got {}", horizon));
}

CountState::CountState(std::int64_t n, std::vector<std::int64_t> counts) : n_(n), counts_(std::move(counts)) {
    if (n < 1) throw ConfigError(fmt::format("n must be >= 1, got {}", n));
    if (std::any_of(counts_.begin(), counts_.end(), [](auto c) { return c < 0; }))
        throw ConfigError("occupancy counts must be nonnegative");
    const auto total = std::accumulate(counts_.begin(), counts_.end(), std::int64_t{0});
    if (total != n) throw ConfigError(fmt::format("occupancy counts sum to {}, expected n = {}", total, n));
    while (counts_.back() == 0) counts_.pop_back();
}

std::int64_t CountState::at_least(std::int64_t k) const {
    if (k <= 0) return n_;
    std::int64_t sum = 0;
    for (auto l = static_cast<std::size_t>(k); l < counts_.size(); ++l) sum += counts_[l];
    return sum;
}

double CountState::tail_fraction(std::int64_t k) const {
    return static_cast<double>(at_least(k)) / static_cast<double>(n_);
}

std::int64_t CountState::total_tasks() const {
    std::int64_t sum = 0;
    for (std::size_t l = 1; l < counts_.size(); ++l) sum += static_cast<std::int64_t>(l) * counts_[l];
    return sum;
}

void CountState::add_task(std::int64_t from) {
    const auto l = static_cast<std::size_t>(from);
    --counts_[l];
    if (l + 1 == counts_.size()) counts_.push_back(0);
    ++counts_[l + 1];
}

void CountState::remove_task(std::int64_t from) {
    const auto l = static_cast<std::size_t>(from);
    --counts_[l];
    ++counts_[l - 1];
    while (counts_.back() == 0) counts_.pop_back();
}

TailFractionPath::TailFractionPath(std::vector<double> record_times, std::int64_t k_max)
    : record_times_(std::move(record_times)),
      k_max_(k_max),
      fractions_(record_times_.size() * static_cast<std::size_t>(k_max + 1), 0.0) {}

void TailFractionPath::set_row(std::size_t r, const CountState& state) {
    const auto width = static_cast<std::size_t>(k_max_ + 1);
    const auto counts = state.counts();
    const double n = static_cast<double>(state.n());
    // suffix sums from the top level down
    std::int64_t above = 0;
    for (auto l = static_cast<std::int64_t>(counts.size()) - 1; l > k_max_; --l) above += counts[static_cast<std::size_t>(l)];
    for (auto k = k_max_; k >= 0; --k) {
        if (k < static_cast<std::int64_t>(counts.size())) above += counts[static_cast<std::size_t>(k)];
        fractions_[r * width + static_cast<std::size_t>(k)] = static_cast<double>(above) / n;
    }
}

namespace {

double integer_power(double x, std::int64_t e) {
    double result = 1.0;
    while (e > 0) {
        if (e & 1) result *= x;
        x *= x;
        e >>= 1;
    }
    return result;
}

// P(M <= l) = (fraction of buffers with length <= l)^d, inverted at u.
std::int64_t max_length_from_uniform(const CountState& state, std::int64_t d, double u) {
    const auto counts = state.counts();
    const double n = static_cast<double>(state.n());
    std::int64_t cumulative = 0;
    for (std::size_t l = 0; l < counts.size(); ++l) {
        cumulative += counts[l];
        if (integer_power(static_cast<double>(cumulative) / n, d) > u) return static_cast<std::int64_t>(l);
    }
    return state.max_length();
}

// Length of a uniformly chosen buffer, u uniform on [0, 1).
std::int64_t arrival_length_from_uniform(const CountState& state, double u) {
    const auto n = state.n();
    const auto j = std::min(static_cast<std::int64_t>(u * static_cast<double>(n)), n - 1);
    const auto counts = state.counts();
    std::int64_t cumulative = 0;
    for (std::size_t l = 0; l < counts.size(); ++l) {
        cumulative += counts[l];
        if (j < cumulative) return static_cast<std::int64_t>(l);
    }
    return state.max_length();
}

}  // namespace

CountState initial_state(std::int64_t n, std::optional<std::vector<std::int64_t>> initial_counts) {
    if (!initial_counts) return CountState(n, {n});
    return CountState(n, std::move(*initial_counts));
}

std::int64_t sample_max_length(const CountState& state, std::int64_t d, Rng& rng) {
    return max_length_from_uniform(state, d, rng.uniform());
}

std::vector<double> max_length_pmf(const CountState& state, std::int64_t d) {
    const auto counts = state.counts();
    const double n = static_cast<double>(state.n());
    std::vector<double> pmf(counts.size());
    std::int64_t cumulative = 0;
    double below = 0.0;
    for (std::size_t l = 0; l < counts.size(); ++l) {
        cumulative += counts[l];
        const double upto = std::pow(static_cast<double>(cumulative) / n, static_cast<double>(d));
        pmf[l] = upto - below;
        below = upto;
    }
    return pmf;
}

namespace {

// One uniform decides the event kind (arrival w.p. lambda/(1+lambda)) and,
// rescaled to [0, 1), the buffer or the sampled maximum.
EventRecord apply_event(CountState& state, const SystemConfig& config, Rng& rng, double time) {
    const double p_arrival = config.lambda / (1.0 + config.lambda);
    const double u = rng.uniform();
    if (u < p_arrival) {
        const auto l = arrival_length_from_uniform(state, u / p_arrival);
        state.add_task(l);
        return {EventKind::arrival, time, l};
    }
    const auto m = max_length_from_uniform(state, config.d, (u - p_arrival) / (1.0 - p_arrival));
    if (m == 0) return {EventKind::wasted, time, -1};
    state.remove_task(m);
    return {EventKind::service, time, m};
}

double total_rate(const SystemConfig& config) { return (1.0 + config.lambda) * static_cast<double>(config.n); }

}  // namespace

StepResult step(CountState& state, const SystemConfig& config, Rng& rng, double now) {
    const double dt = rng.exponential(total_rate(config));
    return {apply_event(state, config, rng, now + dt), dt};
}

CountSimulator::CountSimulator(SystemConfig config, CountState initial)
    : config_(config), state_(std::move(initial)), rng_(config.seed) {
    config_.validate();
    if (state_.n() != config_.n)
        throw ConfigError(fmt::format("initial state has n = {}, config has n = {}", state_.n(), config_.n));
}

void CountSimulator::advance_to(double t) {
    if (t <= now_) return;
    // the aggregate clock ticks Poisson((1+lambda) n (t - now)) times in (now, t]
    const double mean = total_rate(config_) * (t - now_);
    const auto ticks = std::poisson_distribution<std::uint64_t>(mean)(rng_.engine());
    for (std::uint64_t i = 0; i < ticks; ++i) apply_event(state_, config_, rng_, t);
    events_ += ticks;
    now_ = t;
}

TailFractionPath simulate(const SystemConfig& config, std::span<const double> record_times, std::int64_t k_max,
                          const CountState& initial) {
    if (k_max < 1) throw ConfigError(fmt::format("k_max must be >= 1, got {}", k_max));
    for (std::size_t i = 0; i < record_times.size(); ++i) {
        if (record_times[i] < 0.0 || record_times[i] > config.horizon)
            throw ConfigError(fmt::format("record time {} outside [0, {}]", record_times[i], config.horizon));
        if (i > 0 && record_times[i] < record_times[i - 1]) throw ConfigError("record times must be ascending");
    }
    CountSimulator sim(config, initial);
    TailFractionPath path(std::vector<double>(record_times.begin(), record_times.end()), k_max);
    for (std::size_t r = 0; r < record_times.size(); ++r) {
        sim.advance_to(record_times[r]);
        path.set_row(r, sim.state());
    }
    return path;
}

std::vector<std::pair<double, double>> scaled_view(const TailFractionPath& path, std::int64_t d, std::int64_t k) {
    if (k < 0 || k > path.k_max()) throw DomainError(fmt::format("level {} outside recorded range 0..{}", k, path.k_max()));
    const double scale = std::pow(static_cast<double>(d), static_cast<double>(k));
    std::vector<std::pair<double, double>> out;
    out.reserve(path.rows());
    for (std::size_t r = 0; r < path.rows(); ++r)
        out.emplace_back(path.record_times()[r] * static_cast<double>(d), scale * path.at(r, k));
    return out;
}

std::vector<std::pair<double, double>> scaled_view(const TailFractionPath& path, std::int64_t d, std::int64_t k,
                                                   std::span<const double> scaled_times) {
    if (k < 0 || k > path.k_max()) throw DomainError(fmt::format("level {} outside recorded range 0..{}", k, path.k_max()));
    const double scale = std::pow(static_cast<double>(d), static_cast<double>(k));
    const auto times = path.record_times();
    std::vector<std::pair<double, double>> out;
    out.reserve(scaled_times.size());
    for (double s : scaled_times) {
        const double raw = s / static_cast<double>(d);
        auto it = std::lower_bound(times.begin(), times.end(), raw - 1e-12 * std::max(1.0, std::abs(raw)));
        if (it == times.end() || std::abs(*it - raw) > 1e-12 * std::max(1.0, std::abs(raw)))
            throw InterpolationError(fmt::format("scaled time {} needs record time {}, which was not recorded", s, raw));
        out.emplace_back(s, scale * path.at(static_cast<std::size_t>(it - times.begin()), k));
    }
    return out;
}

double mean_queue_length(const CountState& state) {
    return static_cast<double>(state.total_tasks()) / static_cast<double>(state.n());
}

}  // namespace lqf
