#include "lqf/fluid.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "lqf/errors.hpp"

namespace lqf {

void FluidConfig::validate() const {
    if (!(lambda > 0.0 && lambda < 1.0)) throw ConfigError(fmt::format("lambda must lie in (0,1), got {}", lambda));
    if (v.empty()) throw ConfigError("fluid system needs at least one level");
    if (!(dt > 0.0)) throw ConfigError(fmt::format("dt must be positive, got {}", dt));
    if (!(T >= 0.0)) throw ConfigError(fmt::format("T must be >= 0, got {}", T));
    for (double vk : v)
        if (!(vk >= 0.0)) throw ConfigError(fmt::format("initial condition entries must be >= 0, got {}", vk));
}

FluidSolution::FluidSolution(std::vector<double> grid, std::vector<double> values, std::size_t K, double lambda)
    : grid_(std::move(grid)), values_(std::move(values)), K_(K), lambda_(lambda) {
    if (grid_.empty() || values_.size() != grid_.size() * K_)
        throw DomainError("fluid solution values do not match the grid");
}

double FluidSolution::value(std::size_t level, double t) const {
    if (level < 1 || level > K_) throw DomainError(fmt::format("level {} outside 1..{}", level, K_));
    const double tol = 1e-12 * std::max(1.0, horizon());
    if (t < -tol || t > horizon() + tol)
        throw DomainError(fmt::format("t = {} outside fluid solution range [0, {}]", t, horizon()));
    auto hi = std::upper_bound(grid_.begin(), grid_.end(), t);
    if (hi == grid_.end()) return at(grid_.size() - 1, level);
    if (hi == grid_.begin()) return at(0, level);
    const auto j = static_cast<std::size_t>(hi - grid_.begin());
    const double w = (t - grid_[j - 1]) / (grid_[j] - grid_[j - 1]);
    return (1.0 - w) * at(j - 1, level) + w * at(j, level);
}

std::vector<double> fluid_rhs(std::span<const double> u, double lambda) {
    std::vector<double> du(u.size());
    if (u.empty()) return du;
    du[0] = std::expm1(-u[0]) + lambda;
    for (std::size_t k = 1; k < u.size(); ++k) du[k] = lambda * u[k - 1] - u[k];
    return du;
}

FluidSolution solve_fluid(const FluidConfig& config) {
    config.validate();
    const std::size_t K = config.K();
    const double lambda = config.lambda;
    const auto steps = static_cast<std::size_t>(std::ceil(config.T / config.dt - 1e-9));

    std::vector<double> grid(steps + 1);
    std::vector<double> values((steps + 1) * K);
    std::copy(config.v.begin(), config.v.end(), values.begin());
    grid[0] = 0.0;

    std::vector<double> u(config.v), stage(K);
    for (std::size_t s = 0; s < steps; ++s) {
        const double t = static_cast<double>(s) * config.dt;
        const double t_next = (s + 1 == steps) ? config.T : static_cast<double>(s + 1) * config.dt;
        const double h = t_next - t;
        const auto k1 = fluid_rhs(u, lambda);
        for (std::size_t i = 0; i < K; ++i) stage[i] = u[i] + 0.5 * h * k1[i];
        const auto k2 = fluid_rhs(stage, lambda);
        for (std::size_t i = 0; i < K; ++i) stage[i] = u[i] + 0.5 * h * k2[i];
        const auto k3 = fluid_rhs(stage, lambda);
        for (std::size_t i = 0; i < K; ++i) stage[i] = u[i] + h * k3[i];
        const auto k4 = fluid_rhs(stage, lambda);
        for (std::size_t i = 0; i < K; ++i) u[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);

        grid[s + 1] = t_next;
        std::copy(u.begin(), u.end(), values.begin() + static_cast<std::ptrdiff_t>((s + 1) * K));
    }
    return FluidSolution(std::move(grid), std::move(values), K, lambda);
}

double u1_closed_form(double v1, double lambda, double t) {
    const double a = 1.0 - lambda;
    const double equilibrium = -std::log1p(-lambda);
    if (!(v1 < equilibrium))
        throw BranchUnsupportedError(
            fmt::format("closed form for u1 requires v1 < ln(1/(1-lambda)) = {}, got {}; use solve_fluid", equilibrium, v1));
    // ln((C e^{at} - 1) / (C a e^{at})) rewritten as ln(1 - e^{-at}/C) - ln a, with 1/C = 1 - a e^{v1}.
    const double inv_c = -std::expm1(std::log(a) + v1);
    return std::log1p(-std::exp(-a * t) * inv_c) - std::log(a);
}

std::vector<double> fixed_point(double lambda, std::size_t K) {
    if (!(lambda > 0.0 && lambda < 1.0)) throw ConfigError(fmt::format("lambda must lie in (0,1), got {}", lambda));
    std::vector<double> u(K);
    if (K == 0) return u;
    u[0] = -std::log1p(-lambda);
    for (std::size_t k = 1; k < K; ++k) u[k] = lambda * u[k - 1];
    return u;
}

}  // namespace lqf
