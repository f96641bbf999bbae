#pragma once

#include <cstdint>
#include <functional>
#include <vector>

namespace lqf {

struct SampleMeta {
    std::int64_t n = 0;
    std::int64_t d = 0;
    double lambda = 0.0;
    double t = 0.0;
};

struct EmpiricalSample {
    std::vector<double> values;
    SampleMeta meta;

    std::size_t replications() const { return values.size(); }
};

/// Exact two-sided one-sample KS statistic sup |F_R(x) - cdf(x)|.
double ks_distance(const EmpiricalSample& sample, const std::function<double(double)>& cdf);

/// Phi((x - mu)/sigma); DomainError unless sigma > 0.
double normal_cdf(double x, double mu, double sigma);

double normal_pdf(double x, double mu, double sigma);

struct HistogramBin {
    double left = 0.0;
    double right = 0.0;
    double density = 0.0;
};

/// Density-normalized histogram on bins [k w, (k+1) w), covering the sample
/// range including any empty bins in between.
std::vector<HistogramBin> histogram(const EmpiricalSample& sample, double bin_width);

struct MeanCi {
    double mean = 0.0;
    double halfwidth = 0.0;
};

/// Sample mean with normal-approximation halfwidth z_{(1+c)/2} s / sqrt(R).
MeanCi mean_ci(const EmpiricalSample& sample, double confidence);

/// Sample mean and unbiased sample variance.
struct Moments {
    double mean = 0.0;
    double variance = 0.0;
};
Moments sample_moments(const std::vector<double>& values);

/// Sample median (mean of the two middle values for even sizes).
double median(std::vector<double> values);

/// Least-squares slope of y against x.
double regression_slope(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace lqf
