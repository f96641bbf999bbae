#pragma once

#include <cstdint>
#include <vector>

#include "lqf/fluid.hpp"

namespace lqf {

/// Time series on a uniform grid, e.g. sigma^2(t).
struct TimeSeries {
    std::vector<double> t;
    std::vector<double> value;
};

/// sigma^2' = -2 e^{-u1} sigma^2 + lambda + 1 - e^{-u1}, sigma^2(0) = 0, by RK4.
/// u1 is read from level 1 of `u1`; DomainError if it does not cover [0, T].
TimeSeries solve_variance_ode(const FluidSolution& u1, double lambda, double T, double dt);

struct SdePath {
    std::vector<double> grid;
    std::vector<double> z;
    int level = 1;             // 1 for Z, k >= 2 for Z_k
    bool conjectural = false;  // Z_k paths come from an unproven limit
};

/// Euler-Maruyama sampler for Z with coefficients frozen on a grid, so that
/// many paths can share the exp(-u1) evaluations.
class ZSampler {
public:
    ZSampler(const FluidSolution& u1, double lambda, double T, double dt);

    SdePath path(std::uint64_t seed) const;
    double terminal(std::uint64_t seed) const;
    std::size_t steps() const { return decay_.size(); }
    double dt() const { return dt_; }

private:
    double dt_;
    std::vector<double> grid_;
    std::vector<double> decay_;         // e^{-u1(t_m)} dt
    double arrival_scale_;              // sqrt(lambda dt)
    std::vector<double> service_scale_; // sqrt((1 - e^{-u1(t_m)}) dt)
};

/// Z(0) = 0, dZ = -e^{-u1} Z dt + sqrt(lambda) dB1 - sqrt(1 - e^{-u1}) dB2.
SdePath sample_z_path(const FluidSolution& u1, double lambda, double T, double dt, std::uint64_t seed);

/// Z_k(0) = vk_star, dZ_k = -Z_k dt + sqrt(lambda u_{k-1}) dB1 - sqrt(u_k) dB2.
/// Conjectural; the returned path is flagged as such.
SdePath sample_zk_path(int k, const FluidSolution& u, double vk_star, double T, double dt, std::uint64_t seed);

enum class ApproxKind { diffusion, modified };

struct ApproxDistribution {
    double mean = 0.0;
    double variance = 0.0;
    ApproxKind kind = ApproxKind::diffusion;
    std::int64_t n = 0;
    std::int64_t d = 0;
    double lambda = 0.0;
    double t = 0.0;
};

/// Normal approximations of F_{n,1}(t) for an initially empty system.
/// Solves u1, u2 and sigma^2 once on [0, d * horizon] and evaluates at any
/// n and unscaled t <= horizon.
class F1Approximation {
public:
    F1Approximation(std::int64_t d, double lambda, double horizon, double dt = 1e-3);

    ApproxDistribution at(std::int64_t n, double t, ApproxKind kind) const;

private:
    std::int64_t d_;
    double lambda_;
    FluidSolution fluid_;
    TimeSeries variance_;
    double dt_;
};

/// diffusion: mean u1(dt)/d; modified: u1(dt)/d - u2(dt)/d^2; both with variance sigma^2(dt)/(nd).
ApproxDistribution approx_f1_distribution(std::int64_t n, std::int64_t d, double lambda, double t, ApproxKind kind,
                                          double dt = 1e-3);

struct MuSigma {
    double mu = 0.0;
    double sigma = 0.0;
};

/// Large-t mean and standard deviation of F_{n,1}. By default sigma follows
/// the published criterion, (1/sqrt(nd)) lambda/(1-lambda); with
/// ode_consistent it is the stationary value of the variance ODE,
/// sqrt(lambda/(1-lambda))/sqrt(nd).
MuSigma stationary_mu_sigma(std::int64_t n, std::int64_t d, double lambda, bool ode_consistent = false);

/// sigma < mu/3 and sigma > 2(mu - 1/4)/3.
bool ks_region_accepts(double mu, double sigma);

}  // namespace lqf
