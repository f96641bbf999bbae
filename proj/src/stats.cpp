#include "lqf/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <boost/math/distributions/normal.hpp>
#include <fmt/format.h>

#include "lqf/errors.hpp"

namespace lqf {

double ks_distance(const EmpiricalSample& sample, const std::function<double(double)>& cdf) {
    if (sample.values.empty()) throw DomainError("KS distance of an empty sample");
    std::vector<double> sorted(sample.values);
    std::sort(sorted.begin(), sorted.end());
    const double R = static_cast<double>(sorted.size());
    double d = 0.0;
    for (std::size_t i = 0; i < sorted.size(); ++i) {
        const double f = cdf(sorted[i]);
        d = std::max({d, static_cast<double>(i + 1) / R - f, f - static_cast<double>(i) / R});
    }
    return std::clamp(d, 0.0, 1.0);
}

double normal_cdf(double x, double mu, double sigma) {
    if (!(sigma > 0.0)) throw DomainError(fmt::format("normal_cdf needs sigma > 0, got {}", sigma));
    const double value = 0.5 * std::erfc(-(x - mu) / (sigma * std::numbers::sqrt2));
    return std::clamp(value, 0.0, 1.0);
}

double normal_pdf(double x, double mu, double sigma) {
    if (!(sigma > 0.0)) throw DomainError(fmt::format("normal_pdf needs sigma > 0, got {}", sigma));
    const double z = (x - mu) / sigma;
    return std::exp(-0.5 * z * z) / (sigma * std::sqrt(2.0 * std::numbers::pi));
}

std::vector<HistogramBin> histogram(const EmpiricalSample& sample, double bin_width) {
    if (!(bin_width > 0.0)) throw ConfigError(fmt::format("bin width must be positive, got {}", bin_width));
    if (sample.values.empty()) return {};
    // values sitting on a bin edge up to rounding (e.g. k/n with width 1/n) go to the bin on their right
    auto index_of = [&](double x) { return static_cast<std::int64_t>(std::floor(x / bin_width + 1e-9)); };
    const auto [lo_it, hi_it] = std::minmax_element(sample.values.begin(), sample.values.end());
    const auto first = index_of(*lo_it);
    const auto last = index_of(*hi_it);
    std::vector<HistogramBin> bins(static_cast<std::size_t>(last - first + 1));
    for (std::size_t b = 0; b < bins.size(); ++b) {
        bins[b].left = static_cast<double>(first + static_cast<std::int64_t>(b)) * bin_width;
        bins[b].right = bins[b].left + bin_width;
    }
    const double unit = 1.0 / (static_cast<double>(sample.values.size()) * bin_width);
    for (double x : sample.values) bins[static_cast<std::size_t>(index_of(x) - first)].density += unit;
    return bins;
}

Moments sample_moments(const std::vector<double>& values) {
    Moments m;
    if (values.empty()) return m;
    double sum = 0.0;
    for (double v : values) sum += v;
    m.mean = sum / static_cast<double>(values.size());
    if (values.size() < 2) return m;
    double ss = 0.0;
    for (double v : values) ss += (v - m.mean) * (v - m.mean);
    m.variance = ss / static_cast<double>(values.size() - 1);
    return m;
}

MeanCi mean_ci(const EmpiricalSample& sample, double confidence) {
    if (sample.values.size() < 2) throw DomainError("confidence interval needs at least 2 values");
    if (!(confidence > 0.0 && confidence < 1.0))
        throw DomainError(fmt::format("confidence must lie in (0,1), got {}", confidence));
    const auto m = sample_moments(sample.values);
    const double z = boost::math::quantile(boost::math::normal_distribution<double>(), 0.5 * (1.0 + confidence));
    return {m.mean, z * std::sqrt(m.variance / static_cast<double>(sample.values.size()))};
}

double median(std::vector<double> values) {
    if (values.empty()) throw DomainError("median of an empty set");
    std::sort(values.begin(), values.end());
    const std::size_t mid = values.size() / 2;
    return values.size() % 2 == 1 ? values[mid] : 0.5 * (values[mid - 1] + values[mid]);
}

double regression_slope(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size() || x.size() < 2) throw DomainError("regression needs two equally sized series of length >= 2");
    const auto mx = sample_moments(x).mean;
    const auto my = sample_moments(y).mean;
    double sxy = 0.0, sxx = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxy += (x[i] - mx) * (y[i] - my);
        sxx += (x[i] - mx) * (x[i] - mx);
    }
    return sxy / sxx;
}

}  // namespace lqf
