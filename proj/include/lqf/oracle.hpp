#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "lqf/ctmc.hpp"

namespace lqf {

/// Outgoing transition of the truncated generator. target == lost marks
/// mass that would exceed the task cap.
struct Transition {
    static constexpr std::size_t lost = static_cast<std::size_t>(-1);
    std::size_t target = lost;
    double rate = 0.0;
};

/// Truncated state space reachable from a start state, with exact rates:
/// arrival from level l at lambda * counts[l], service at level m >= 1 at
/// n [(1-F_{m+1})^d - (1-F_m)^d]. Wasted service is the leftover self-loop.
struct TruncatedGenerator {
    std::vector<CountState> states;               // states[0] is the start state
    std::vector<std::vector<Transition>> out;     // off-diagonal moves (incl. lost)
    std::vector<double> wasted_rate;              // n (1 - F_1)^d per state
    double uniformization_rate = 0.0;             // (1 + lambda) n
};

TruncatedGenerator build_generator(const SystemConfig& config, const CountState& start, std::int64_t max_total_tasks,
                                   std::size_t max_states = 1'000'000);

struct OracleResult {
    std::map<std::vector<std::int64_t>, double> state_probabilities;  // keyed by trimmed counts
    double truncation_error_bound = 0.0;  // poisson_tail + truncation_loss
    double poisson_tail = 0.0;
    double truncation_loss = 0.0;
    double t = 0.0;
    std::int64_t n = 0;

    /// E[F_k(t)] under the computed (sub-stochastic) distribution.
    double expected_tail_fraction(std::int64_t k) const;
    double total_probability() const;
};

/// Transient distribution at time t by uniformization at rate (1+lambda)n.
/// Mass pushed past max_total_tasks is dropped and reported, never redistributed.
OracleResult uniformization_oracle(const SystemConfig& config, double t, std::int64_t max_total_tasks = 40,
                                   const CountState* start = nullptr, double poisson_epsilon = 1e-14);

/// Canonical text key of a count vector, e.g. "1:2" for counts [1, 2].
std::string encode_state(const std::vector<std::int64_t>& counts);

}  // namespace lqf
