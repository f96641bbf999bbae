#include "lqf/diffusion.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "lqf/errors.hpp"
#include "lqf/rng.hpp"

namespace lqf {

namespace {

std::size_t step_count(double T, double dt) {
    if (!(dt > 0.0)) throw ConfigError(fmt::format("dt must be positive, got {}", dt));
    if (!(T >= 0.0)) throw ConfigError(fmt::format("T must be >= 0, got {}", T));
    return static_cast<std::size_t>(std::ceil(T / dt - 1e-9));
}

double grid_time(std::size_t m, std::size_t steps, double T, double dt) {
    return m == steps ? T : static_cast<double>(m) * dt;
}

void require_coverage(const FluidSolution& u, double T) {
    if (u.horizon() < T - 1e-12 * std::max(1.0, T))
        throw DomainError(fmt::format("fluid solution covers [0, {}] but [0, {}] is required", u.horizon(), T));
}

}  // namespace

TimeSeries solve_variance_ode(const FluidSolution& u1, double lambda, double T, double dt) {
    require_coverage(u1, T);
    const std::size_t steps = step_count(T, dt);
    auto rhs = [&](double t, double s) {
        const double e = std::exp(-u1.value(1, std::min(t, u1.horizon())));
        return -2.0 * e * s + lambda + (1.0 - e);
    };
    TimeSeries out;
    out.t.resize(steps + 1);
    out.value.resize(steps + 1);
    double s = 0.0;
    out.t[0] = 0.0;
    out.value[0] = 0.0;
    for (std::size_t m = 0; m < steps; ++m) {
        const double t = grid_time(m, steps, T, dt);
        const double h = grid_time(m + 1, steps, T, dt) - t;
        const double k1 = rhs(t, s);
        const double k2 = rhs(t + 0.5 * h, s + 0.5 * h * k1);
        const double k3 = rhs(t + 0.5 * h, s + 0.5 * h * k2);
        const double k4 = rhs(t + h, s + h * k3);
        s += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        out.t[m + 1] = t + h;
        out.value[m + 1] = s;
    }
    return out;
}

ZSampler::ZSampler(const FluidSolution& u1, double lambda, double T, double dt) : dt_(dt) {
    require_coverage(u1, T);
    const std::size_t steps = step_count(T, dt);
    grid_.resize(steps + 1);
    decay_.resize(steps);
    service_scale_.resize(steps);
    arrival_scale_ = std::sqrt(lambda * dt);
    for (std::size_t m = 0; m <= steps; ++m) grid_[m] = grid_time(m, steps, T, dt);
    for (std::size_t m = 0; m < steps; ++m) {
        const double h = grid_[m + 1] - grid_[m];
        const double e = std::exp(-u1.value(1, grid_[m]));
        decay_[m] = e * h;
        service_scale_[m] = std::sqrt((1.0 - e) * h);
    }
}

SdePath ZSampler::path(std::uint64_t seed) const {
    Rng rng(seed);
    SdePath out;
    out.grid = grid_;
    out.z.resize(grid_.size());
    out.level = 1;
    double z = 0.0;
    out.z[0] = z;
    for (std::size_t m = 0; m < decay_.size(); ++m) {
        const double h = grid_[m + 1] - grid_[m];
        const double arrival = (h == dt_) ? arrival_scale_ : arrival_scale_ * std::sqrt(h / dt_);
        const double xi1 = rng.normal();
        const double xi2 = rng.normal();
        z += -decay_[m] * z + arrival * xi1 - service_scale_[m] * xi2;
        out.z[m + 1] = z;
    }
    return out;
}

double ZSampler::terminal(std::uint64_t seed) const {
    Rng rng(seed);
    double z = 0.0;
    const std::size_t steps = decay_.size();
    for (std::size_t m = 0; m < steps; ++m) {
        const double h = grid_[m + 1] - grid_[m];
        const double arrival = (h == dt_) ? arrival_scale_ : arrival_scale_ * std::sqrt(h / dt_);
        const double xi1 = rng.normal();
        const double xi2 = rng.normal();
        z += -decay_[m] * z + arrival * xi1 - service_scale_[m] * xi2;
    }
    return z;
}

SdePath sample_z_path(const FluidSolution& u1, double lambda, double T, double dt, std::uint64_t seed) {
    return ZSampler(u1, lambda, T, dt).path(seed);
}

SdePath sample_zk_path(int k, const FluidSolution& u, double vk_star, double T, double dt, std::uint64_t seed) {
    if (k < 2 || static_cast<std::size_t>(k) > u.K())
        throw DomainError(fmt::format("Z_k needs 2 <= k <= K = {}, got k = {}", u.K(), k));
    require_coverage(u, T);
    const std::size_t steps = step_count(T, dt);
    const double lambda = u.lambda();
    Rng rng(seed);
    SdePath out;
    out.level = k;
    out.conjectural = true;
    out.grid.resize(steps + 1);
    out.z.resize(steps + 1);
    double z = vk_star;
    out.grid[0] = 0.0;
    out.z[0] = z;
    auto level_value = [&](std::size_t level, double t) {
        const double v = u.value(level, t);
        if (v < -1e-12) throw DomainError(fmt::format("u_{}({}) = {} is negative", level, t, v));
        return std::max(v, 0.0);
    };
    for (std::size_t m = 0; m < steps; ++m) {
        const double t = grid_time(m, steps, T, dt);
        const double h = grid_time(m + 1, steps, T, dt) - t;
        const double prev = level_value(static_cast<std::size_t>(k - 1), t);
        const double cur = level_value(static_cast<std::size_t>(k), t);
        const double xi1 = rng.normal();
        const double xi2 = rng.normal();
        z += -z * h + std::sqrt(lambda * prev * h) * xi1 - std::sqrt(cur * h) * xi2;
        out.grid[m + 1] = t + h;
        out.z[m + 1] = z;
    }
    return out;
}

F1Approximation::F1Approximation(std::int64_t d, double lambda, double horizon, double dt)
    : d_(d),
      lambda_(lambda),
      fluid_(solve_fluid(FluidConfig{lambda, {0.0, 0.0}, static_cast<double>(d) * horizon, dt})),
      variance_(solve_variance_ode(fluid_, lambda, static_cast<double>(d) * horizon, dt)),
      dt_(dt) {
    if (d < 1) throw ConfigError(fmt::format("d must be >= 1, got {}", d));
}

ApproxDistribution F1Approximation::at(std::int64_t n, double t, ApproxKind kind) const {
    if (n < 1) throw ConfigError(fmt::format("n must be >= 1, got {}", n));
    const double d = static_cast<double>(d_);
    const double s = d * t;
    if (s < 0.0 || s > fluid_.horizon() + 1e-9 * std::max(1.0, s))
        throw DomainError(fmt::format("t = {} outside the solved range [0, {}]", t, fluid_.horizon() / d));
    const double clamped = std::min(s, fluid_.horizon());

    // variance series shares the fluid grid
    const auto& vt = variance_.t;
    auto hi = std::upper_bound(vt.begin(), vt.end(), clamped);
    double var_z;
    if (hi == vt.end()) {
        var_z = variance_.value.back();
    } else {
        const auto j = static_cast<std::size_t>(hi - vt.begin());
        const double w = (clamped - vt[j - 1]) / (vt[j] - vt[j - 1]);
        var_z = (1.0 - w) * variance_.value[j - 1] + w * variance_.value[j];
    }

    ApproxDistribution out;
    out.kind = kind;
    out.n = n;
    out.d = d_;
    out.lambda = lambda_;
    out.t = t;
    out.mean = fluid_.value(1, clamped) / d;
    if (kind == ApproxKind::modified) out.mean -= fluid_.value(2, clamped) / (d * d);
    out.variance = std::max(0.0, var_z) / (static_cast<double>(n) * d);
    return out;
}

ApproxDistribution approx_f1_distribution(std::int64_t n, std::int64_t d, double lambda, double t, ApproxKind kind,
                                          double dt) {
    return F1Approximation(d, lambda, t, dt).at(n, t, kind);
}

MuSigma stationary_mu_sigma(std::int64_t n, std::int64_t d, double lambda, bool ode_consistent) {
    const double dd = static_cast<double>(d);
    const double scale = 1.0 / std::sqrt(static_cast<double>(n) * dd);
    const double ratio = lambda / (1.0 - lambda);
    return {(1.0 / dd - lambda / (dd * dd)) * -std::log1p(-lambda),
            scale * (ode_consistent ? std::sqrt(ratio) : ratio)};
}

bool ks_region_accepts(double mu, double sigma) {
    return sigma < mu / 3.0 && sigma > 2.0 * (mu - 0.25) / 3.0;
}

}  // namespace lqf
