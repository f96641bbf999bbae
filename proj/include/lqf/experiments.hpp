#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace lqf {

inline constexpr const char* kVersion = "0.1.0";

enum class ExperimentKind { sample_paths, histogram, ks_sweep, tradeoff };
enum class TimeScale { raw, fluid };

/// Declarative experiment. Loaded from a flat JSON object; see README for keys.
struct ExperimentSpec {
    ExperimentKind kind = ExperimentKind::histogram;
    std::vector<std::int64_t> n;
    std::vector<std::int64_t> d;        // unused by sample_paths (d is derived from n)
    std::vector<double> lambda{0.7};
    std::int64_t replications = 1000;
    std::vector<double> t_record{50.0};
    std::uint64_t master_seed = 0;
    std::string output_dir = "out";
    TimeScale time_scale = TimeScale::raw;
    double bin_width = 0.0;             // histogram; 0 means 1/n
    std::int64_t record_points = 500;   // sample_paths grid size
    double fluid_dt = 1e-3;

    /// Resolved spec as JSON; output_dir is left out so that the embedded
    /// CSV header depends only on parameters.
    nlohmann::json to_json() const;
};

/// Parses and validates; ConfigError with line context on failure.
ExperimentSpec parse_spec(const std::string& text);
ExperimentSpec load_spec(const std::filesystem::path& path);

struct RunOptions {
    unsigned workers = 1;
    bool write_files = true;
};

/// d(n) = round(10 log10 n); ConfigError when that is below 1.
std::int64_t log_rule_d(std::int64_t n);

struct SamplePathSummary {
    std::int64_t n = 0;
    std::int64_t d = 0;
    double mean_abs_deviation = 0.0;  // time average of |U_{n,1} - u1|, averaged over paths
};

struct HistogramSummary {
    std::int64_t n = 0;
    std::int64_t d = 0;
    double lambda = 0.0;
    double t = 0.0;
    std::int64_t replications = 0;
    double empirical_mean = 0.0;
    double empirical_variance = 0.0;
    double diffusion_mean = 0.0;
    double modified_mean = 0.0;
    double approx_variance = 0.0;
    double ks_diffusion = 0.0;
    double ks_modified = 0.0;
};

struct KsSweepRow {
    std::int64_t n = 0;
    std::int64_t d = 0;
    double lambda = 0.0;
    double t = 0.0;
    double mu = 0.0;
    double sigma = 0.0;
    double ks = 0.0;
    bool accepted = false;
};

struct TradeoffRow {
    std::int64_t n = 0;
    std::int64_t d = 0;
    double lambda = 0.0;
    double t = 0.0;
    double mean_queue_length = 0.0;
    double cpu_time_per_buffer = 0.0;  // median per-replication thread CPU seconds / n
};

struct ExperimentResult {
    std::vector<std::filesystem::path> files;
    std::vector<SamplePathSummary> sample_paths;
    std::vector<HistogramSummary> histograms;
    std::vector<KsSweepRow> ks_rows;
    std::vector<TradeoffRow> tradeoff_rows;
};

ExperimentResult run_sample_paths(const ExperimentSpec& spec, const RunOptions& options);
ExperimentResult run_histogram(const ExperimentSpec& spec, const RunOptions& options);
ExperimentResult run_ks_sweep(const ExperimentSpec& spec, const RunOptions& options);
ExperimentResult run_tradeoff(const ExperimentSpec& spec, const RunOptions& options);
ExperimentResult run_experiment(const ExperimentSpec& spec, const RunOptions& options);

/// Values of F_{n,1}(t) over `replications` seeded runs from an empty start.
std::vector<double> replicate_f1(std::int64_t n, std::int64_t d, double lambda, double t, std::int64_t replications,
                                 std::uint64_t seed, unsigned workers);

}  // namespace lqf
