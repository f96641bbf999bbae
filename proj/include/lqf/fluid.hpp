#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace lqf {

struct FluidConfig {
    double lambda = 0.7;
    std::vector<double> v;  // initial condition, one entry per level; K = v.size()
    double T = 10.0;        // horizon on the fluid time scale
    double dt = 1e-3;

    std::size_t K() const { return v.size(); }
    void validate() const;
};

/// Grid solution of the fluid system with piecewise-linear dense output.
/// Immutable once constructed.
class FluidSolution {
public:
    /// `values` is row-major: K entries per grid point.
    FluidSolution(std::vector<double> grid, std::vector<double> values, std::size_t K, double lambda);

    std::span<const double> grid() const { return grid_; }
    std::size_t K() const { return K_; }
    double lambda() const { return lambda_; }
    double horizon() const { return grid_.back(); }

    /// u_level at grid index i; level is 1-based.
    double at(std::size_t i, std::size_t level) const { return values_[i * K_ + level - 1]; }
    /// u_level(t) by linear interpolation; DomainError outside [0, horizon].
    double value(std::size_t level, double t) const;

private:
    std::vector<double> grid_;
    std::vector<double> values_;
    std::size_t K_;
    double lambda_;
};

/// u1' = exp(-u1) - 1 + lambda;  uk' = lambda u_{k-1} - u_k.
std::vector<double> fluid_rhs(std::span<const double> u, double lambda);

/// Classical RK4 on {0, dt, 2dt, ..., T}; the last step is shortened to land on T.
FluidSolution solve_fluid(const FluidConfig& config);

/// Explicit u1(t) for v1 < ln(1/(1-lambda)); BranchUnsupportedError otherwise.
double u1_closed_form(double v1, double lambda, double t);

/// (lambda^{k-1} ln(1/(1-lambda)))_{k=1..K}, the globally stable critical point.
std::vector<double> fixed_point(double lambda, std::size_t K);

}  // namespace lqf
