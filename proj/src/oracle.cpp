#include "lqf/oracle.hpp"

#include <cmath>
#include <deque>
#include <unordered_map>

#include <boost/math/special_functions/gamma.hpp>
#include <fmt/format.h>

#include "lqf/errors.hpp"
#include "lqf/rng.hpp"

namespace lqf {

namespace {

struct CountsHash {
    std::size_t operator()(const std::vector<std::int64_t>& v) const noexcept {
        std::uint64_t h = v.size();
        for (auto c : v) h = mix64(h ^ static_cast<std::uint64_t>(c));
        return static_cast<std::size_t>(h);
    }
};

std::vector<std::int64_t> key_of(const CountState& s) { return {s.counts().begin(), s.counts().end()}; }

}  // namespace

std::string encode_state(const std::vector<std::int64_t>& counts) {
    std::string out;
    for (std::size_t i = 0; i < counts.size(); ++i) {
        if (i) out += ':';
        out += std::to_string(counts[i]);
    }
    return out;
}

TruncatedGenerator build_generator(const SystemConfig& config, const CountState& start, std::int64_t max_total_tasks,
                                   std::size_t max_states) {
    config.validate();
    if (start.n() != config.n) throw ConfigError(fmt::format("start state has n = {}, config has n = {}", start.n(), config.n));
    if (start.total_tasks() > max_total_tasks)
        throw ConfigError(fmt::format("start state holds {} tasks, above the cap {}", start.total_tasks(), max_total_tasks));

    const double n = static_cast<double>(config.n);
    const double d = static_cast<double>(config.d);
    TruncatedGenerator gen;
    gen.uniformization_rate = (1.0 + config.lambda) * n;

    std::unordered_map<std::vector<std::int64_t>, std::size_t, CountsHash> index;
    std::deque<std::size_t> frontier;
    auto intern = [&](const CountState& s) {
        auto [it, inserted] = index.try_emplace(key_of(s), gen.states.size());
        if (inserted) {
            if (gen.states.size() >= max_states)
                throw SizeError(fmt::format("oracle state space exceeds {} states", max_states));
            gen.states.push_back(s);
            frontier.push_back(it->second);
        }
        return it->second;
    };
    intern(start);

    while (!frontier.empty()) {
        const std::size_t i = frontier.front();
        frontier.pop_front();
        const CountState s = gen.states[i];
        const auto counts = s.counts();
        const bool at_cap = s.total_tasks() >= max_total_tasks;
        std::vector<Transition> moves;

        for (std::size_t l = 0; l < counts.size(); ++l) {
            if (counts[l] == 0) continue;
            const double rate = config.lambda * static_cast<double>(counts[l]);
            if (at_cap) {
                moves.push_back({Transition::lost, rate});
                continue;
            }
            CountState next = s;
            next.add_task(static_cast<std::int64_t>(l));
            moves.push_back({intern(next), rate});
        }

        std::int64_t cumulative = counts[0];
        double below = std::pow(static_cast<double>(cumulative) / n, d);
        const double wasted = n * below;
        for (std::size_t m = 1; m < counts.size(); ++m) {
            cumulative += counts[m];
            const double upto = std::pow(static_cast<double>(cumulative) / n, d);
            const double rate = n * (upto - below);
            below = upto;
            if (counts[m] == 0 || rate <= 0.0) continue;
            CountState next = s;
            next.remove_task(static_cast<std::int64_t>(m));
            moves.push_back({intern(next), rate});
        }

        if (gen.out.size() <= i) {
            gen.out.resize(i + 1);
            gen.wasted_rate.resize(i + 1);
        }
        gen.out[i] = std::move(moves);
        gen.wasted_rate[i] = wasted;
    }
    gen.out.resize(gen.states.size());
    gen.wasted_rate.resize(gen.states.size());
    return gen;
}

double OracleResult::expected_tail_fraction(std::int64_t k) const {
    double sum = 0.0;
    for (const auto& [counts, p] : state_probabilities) {
        std::int64_t at_least = 0;
        for (auto l = static_cast<std::size_t>(std::max<std::int64_t>(k, 0)); l < counts.size(); ++l) at_least += counts[l];
        sum += p * static_cast<double>(at_least) / static_cast<double>(n);
    }
    return sum;
}

double OracleResult::total_probability() const {
    double sum = 0.0;
    for (const auto& entry : state_probabilities) sum += entry.second;
    return sum;
}

OracleResult uniformization_oracle(const SystemConfig& config, double t, std::int64_t max_total_tasks,
                                   const CountState* start, double poisson_epsilon) {
    if (!(t >= 0.0)) throw DomainError(fmt::format("oracle time must be >= 0, got {}", t));
    const CountState origin = start ? *start : initial_state(config.n);
    const auto gen = build_generator(config, origin, max_total_tasks);
    const double rate = gen.uniformization_rate;
    const double mean_jumps = rate * t;
    const std::size_t size = gen.states.size();

    // Poisson(mean_jumps) weights, truncated once the remaining tail is below epsilon.
    std::vector<double> weights;
    double cumulative = 0.0;
    const double log_mean = mean_jumps > 0.0 ? std::log(mean_jumps) : 0.0;
    const auto hard_stop = static_cast<std::size_t>(mean_jumps + 50.0 * std::sqrt(mean_jumps) + 200.0);
    for (std::size_t k = 0; k <= hard_stop; ++k) {
        const double kk = static_cast<double>(k);
        const double w = mean_jumps > 0.0 ? std::exp(-mean_jumps + kk * log_mean - std::lgamma(kk + 1.0)) : (k == 0 ? 1.0 : 0.0);
        weights.push_back(w);
        cumulative += w;
        if (kk >= mean_jumps && 1.0 - cumulative < poisson_epsilon) break;
    }
    const auto last = weights.size() - 1;
    const double tail =
        mean_jumps > 0.0 ? boost::math::gamma_p(static_cast<double>(last + 1), mean_jumps) : 0.0;

    std::vector<double> v(size, 0.0), next(size, 0.0), pi(size, 0.0);
    v[0] = 1.0;
    double lost_so_far = 0.0;
    double truncation_loss = 0.0;
    for (std::size_t k = 0; k <= last; ++k) {
        if (k > 0) {
            std::fill(next.begin(), next.end(), 0.0);
            for (std::size_t i = 0; i < size; ++i) {
                if (v[i] == 0.0) continue;
                double stay = gen.wasted_rate[i];
                for (const auto& tr : gen.out[i]) {
                    const double moved = v[i] * tr.rate / rate;
                    if (tr.target == Transition::lost)
                        lost_so_far += moved;
                    else
                        next[tr.target] += moved;
                }
                next[i] += v[i] * stay / rate;
            }
            std::swap(v, next);
        }
        for (std::size_t i = 0; i < size; ++i) pi[i] += weights[k] * v[i];
        truncation_loss += weights[k] * lost_so_far;
    }

    OracleResult result;
    result.t = t;
    result.n = config.n;
    result.poisson_tail = tail;
    result.truncation_loss = truncation_loss;
    result.truncation_error_bound = tail + truncation_loss;
    for (std::size_t i = 0; i < size; ++i)
        if (pi[i] > 0.0) result.state_probabilities.emplace(key_of(gen.states[i]), pi[i]);
    return result;
}

}  // namespace lqf
