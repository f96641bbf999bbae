// Acceptance suite. Prints one PASS/FAIL line per criterion and exits
// nonzero if any criterion fails.
//
//   acceptance [output_dir]
//
// Criteria 3-10 run twice (one worker, then several) into separate
// directories; criterion 11 compares the resulting CSV files byte by byte.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <fmt/format.h>

#include "lqf/csv.hpp"
#include "lqf/ctmc.hpp"
#include "lqf/diffusion.hpp"
#include "lqf/experiments.hpp"
#include "lqf/fluid.hpp"
#include "lqf/oracle.hpp"
#include "lqf/parallel.hpp"
#include "lqf/rng.hpp"
#include "lqf/stats.hpp"

namespace fs = std::filesystem;
using namespace lqf;

namespace {

// Fixed before any run; never tuned.
constexpr std::uint64_t kMasterSeed = 1;

int failures = 0;

void report(int id, bool pass, const std::string& detail) {
    if (!pass) ++failures;
    std::cout << fmt::format("criterion {:2}: {} {}", id, pass ? "PASS" : "FAIL", detail) << std::endl;
}

std::string slurp(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream out;
    out << in.rdbuf();
    return out.str();
}

// Drops the last column of every data row (tradeoff CPU timings).
std::string drop_last_column(const std::string& text) {
    std::istringstream in(text);
    std::string line, out;
    while (std::getline(in, line)) {
        if (!line.empty() && line[0] != '#') {
            const auto cut = line.rfind(',');
            if (cut != std::string::npos) line.resize(cut);
        }
        out += line + '\n';
    }
    return out;
}

double mean_of(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x;
    return s / static_cast<double>(v.size());
}

double standard_error(const std::vector<double>& v) {
    const auto m = sample_moments(v);
    return std::sqrt(m.variance / static_cast<double>(v.size()));
}

void write_csv(const fs::path& path, const std::string& body) {
    csv::write_file(path, fmt::format("# lqf {} seed={}\n", kVersion, kMasterSeed) + body);
}

ExperimentSpec base_spec(ExperimentKind kind, const fs::path& dir) {
    ExperimentSpec spec;
    spec.kind = kind;
    spec.master_seed = kMasterSeed;
    spec.output_dir = dir.string();
    spec.time_scale = kind == ExperimentKind::sample_paths ? TimeScale::fluid : TimeScale::raw;
    return spec;
}

// ---- criteria 1-2: deterministic numerics ----

void fixed_point_exactness() {
    double worst = 0.0;
    for (double lambda : {0.1, 0.5, 0.7, 0.9, 0.99}) {
        const auto u = fixed_point(lambda, 4);
        for (double r : fluid_rhs(u, lambda)) worst = std::max(worst, std::abs(r));
    }
    report(1, worst < 1e-14, fmt::format("max |rhs(u*)| = {:.3e} (< 1e-14)", worst));
}

void closed_form_vs_rk4() {
    const auto sol = solve_fluid(FluidConfig{0.7, {0.0}, 10.0, 1e-3});
    double worst = 0.0;
    for (std::size_t i = 0; i < sol.grid().size(); ++i)
        worst = std::max(worst, std::abs(sol.at(i, 1) - u1_closed_form(0.0, 0.7, sol.grid()[i])));
    report(2, worst < 1e-8, fmt::format("sup |closed form - RK4| = {:.3e} (< 1e-8)", worst));
}

// ---- criteria 3-10: stochastic runs, each writing CSV into dir ----

struct Outcome {
    std::vector<SamplePathSummary> paths;
    std::vector<std::string> oracle_lines;
    bool oracle_ok = true;
    int oracle_within = 0;
    double mm1_mean = 0.0, mm1_se = 0.0;
    double z_var = 0.0, z_var_se = 0.0, ode_var = 0.0, ode_var_fixed = 0.0;
    HistogramSummary fig4_d15, fig4_d5;
    std::vector<TradeoffRow> tradeoff;
    std::vector<KsSweepRow> ks;
};

void run_sample_paths_check(const fs::path& dir, unsigned workers, Outcome& out) {
    auto spec = base_spec(ExperimentKind::sample_paths, dir);
    spec.n = {100, 1000, 10000};
    spec.lambda = {0.7};
    spec.replications = 20;
    spec.t_record = {10.0};
    spec.record_points = 500;
    out.paths = run_experiment(spec, {workers, true}).sample_paths;
}

void run_oracle_check(const fs::path& dir, unsigned workers, Outcome& out) {
    constexpr std::int64_t reps = 100000;
    std::string body = "n,d,lambda,t,simulated_mean,standard_error,oracle_mean,oracle_error_bound\n";
    std::uint64_t stream = 0;
    const std::pair<std::int64_t, std::int64_t> systems[] = {{1, 1}, {2, 2}, {3, 2}};
    for (auto [n, d] : systems)
        for (double lambda : {0.5, 0.7})
            for (double t : {0.5, 2.0}) {
                const auto values = replicate_f1(n, d, lambda, t, reps, stream_seed(kMasterSeed, 100 + stream++), workers);
                const auto exact = uniformization_oracle(SystemConfig{n, d, lambda, t, 0}, t);
                const double m = mean_of(values), se = standard_error(values);
                const double target = exact.expected_tail_fraction(1);
                const bool ok = std::abs(m - target) <= 3.0 * se + exact.truncation_error_bound;
                out.oracle_ok = out.oracle_ok && ok;
                out.oracle_within += ok ? 1 : 0;
                out.oracle_lines.push_back(fmt::format("n={} d={} lambda={} t={}: sim {:.5f} oracle {:.5f} ({:.2f} SE)", n, d,
                                                       lambda, t, m, target, std::abs(m - target) / se));
                body += fmt::format("{},{},{},{},{},{},{},{}\n", n, d, csv::number(lambda), csv::number(t), csv::number(m),
                                    csv::number(se), csv::number(target), csv::number(exact.truncation_error_bound));
            }
    write_csv(dir / "oracle_equivalence.csv", body);
}

void run_mm1_check(const fs::path& dir, unsigned workers, Outcome& out) {
    const auto values = replicate_f1(1, 1, 0.5, 50.0, 100000, stream_seed(kMasterSeed, 200), workers);
    out.mm1_mean = mean_of(values);
    out.mm1_se = standard_error(values);
    write_csv(dir / "mm1.csv", fmt::format("n,d,lambda,t,replications,mean,standard_error\n1,1,0.5,50,100000,{},{}\n",
                                           csv::number(out.mm1_mean), csv::number(out.mm1_se)));
}

void run_variance_check(const fs::path& dir, unsigned workers, Outcome& out) {
    constexpr double lambda = 0.7, T = 10.0, dt = 1e-3;
    constexpr std::size_t paths = 100000;
    const auto u1 = solve_fluid(FluidConfig{lambda, {0.0}, T, dt});
    const ZSampler sampler(u1, lambda, T, dt);
    std::vector<double> z(paths);
    const auto seed = stream_seed(kMasterSeed, 300);
    parallel_for(paths, workers, [&](std::size_t i) { z[i] = sampler.terminal(replication_seed(seed, i)); });

    // SE of the sample variance from the fourth central moment
    const auto m = sample_moments(z);
    double m4 = 0.0;
    for (double x : z) m4 += std::pow(x - m.mean, 4);
    m4 /= static_cast<double>(paths);
    out.z_var = m.variance;
    out.z_var_se = std::sqrt((m4 - m.variance * m.variance) / static_cast<double>(paths));
    out.ode_var = solve_variance_ode(u1, lambda, T, dt).value.back();

    const auto at_fixed = solve_fluid(FluidConfig{lambda, {fixed_point(lambda, 1)[0]}, 50.0, dt});
    out.ode_var_fixed = solve_variance_ode(at_fixed, lambda, 50.0, dt).value.back();
    write_csv(dir / "variance.csv",
              fmt::format("quantity,value\nsde_sample_variance,{}\nsde_variance_se,{}\node_variance_t10,{}\n"
                          "ode_variance_fixed_point_t50,{}\n",
                          csv::number(out.z_var), csv::number(out.z_var_se), csv::number(out.ode_var),
                          csv::number(out.ode_var_fixed)));
}

void run_histogram_checks(const fs::path& dir, unsigned workers, Outcome& out) {
    auto spec = base_spec(ExperimentKind::histogram, dir);
    spec.n = {1000};
    spec.d = {5, 15};
    spec.lambda = {0.7};
    spec.t_record = {50.0};
    spec.replications = 1000;
    for (const auto& row : run_experiment(spec, {workers, true}).histograms) (row.d == 5 ? out.fig4_d5 : out.fig4_d15) = row;
}

void run_tradeoff_check(const fs::path& dir, unsigned workers, Outcome& out) {
    auto spec = base_spec(ExperimentKind::tradeoff, dir);
    spec.n = {100};
    spec.d = {2, 4, 10, 15, 20, 25};
    spec.lambda = {0.7};
    spec.t_record = {50.0};
    spec.replications = 200;
    out.tradeoff = run_experiment(spec, {workers, true}).tradeoff_rows;
}

void run_ks_check(const fs::path& dir, unsigned workers, Outcome& out) {
    auto spec = base_spec(ExperimentKind::ks_sweep, dir);
    spec.n = {200, 600, 1000};
    spec.d = {5, 10, 20};
    spec.lambda = {0.80, 0.90, 0.98};
    spec.t_record = {100.0};
    spec.replications = 1000;
    out.ks = run_experiment(spec, {workers, true}).ks_rows;
}

Outcome run_stochastic(const fs::path& dir, unsigned workers) {
    Outcome out;
    auto timed = [&](const char* name, auto&& fn) {
        const auto start = std::chrono::steady_clock::now();
        fn(dir, workers, out);
        const std::chrono::duration<double> took = std::chrono::steady_clock::now() - start;
        std::cout << fmt::format("  [{} workers] {} done in {:.1f} s", workers, name, took.count()) << std::endl;
    };
    timed("sample paths", run_sample_paths_check);
    timed("oracle equivalence", run_oracle_check);
    timed("M/M/1", run_mm1_check);
    timed("variance", run_variance_check);
    timed("histograms", run_histogram_checks);
    timed("tradeoff", run_tradeoff_check);
    timed("KS sweep", run_ks_check);
    return out;
}

void judge(const Outcome& out) {
    {
        bool monotone = true;
        std::string detail;
        for (std::size_t i = 0; i < out.paths.size(); ++i) {
            if (i > 0 && !(out.paths[i].mean_abs_deviation < out.paths[i - 1].mean_abs_deviation)) monotone = false;
            detail += fmt::format("n={} d={}: {:.4f}  ", out.paths[i].n, out.paths[i].d, out.paths[i].mean_abs_deviation);
        }
        const bool small = !out.paths.empty() && out.paths.back().mean_abs_deviation < 0.15;
        report(3, monotone && small, detail + "(decreasing, last < 0.15)");
    }
    {
        report(4, out.oracle_ok, fmt::format("{} of {} configurations within 3 SE of the oracle", out.oracle_within,
                                             out.oracle_lines.size()));
        for (const auto& line : out.oracle_lines) std::cout << "    " << line << '\n';
    }
    {
        const double dev = std::abs(out.mm1_mean - 0.5);
        report(5, dev <= 3.0 * out.mm1_se,
               fmt::format("mean {:.5f}, |mean - 0.5| = {:.2f} SE (<= 3)", out.mm1_mean, dev / out.mm1_se));
    }
    {
        const double dev = std::abs(out.z_var - out.ode_var);
        const double fixed_dev = std::abs(out.ode_var_fixed - 0.7 / 0.3);
        report(6, dev <= 3.0 * out.z_var_se && fixed_dev < 1e-6,
               fmt::format("Var Z(10) {:.5f} vs ODE {:.5f} ({:.2f} SE); fixed-point sigma^2(50) off by {:.2e}", out.z_var,
                           out.ode_var, dev / out.z_var_se, fixed_dev));
    }
    report(7, out.fig4_d15.ks_modified < 0.08,
           fmt::format("n=1000 d=15: KS to modified normal = {:.4f} (< 0.08)", out.fig4_d15.ks_modified));
    {
        const auto& h = out.fig4_d5;
        const double mod = std::abs(h.empirical_mean - h.modified_mean);
        const double dif = std::abs(h.empirical_mean - h.diffusion_mean);
        report(8, mod < dif,
               fmt::format("n=1000 d=5: empirical {:.5f}, |.-modified| = {:.5f}, |.-diffusion| = {:.5f}", h.empirical_mean,
                           mod, dif));
    }
    {
        std::vector<double> x, y;
        bool monotone = true;
        for (std::size_t i = 0; i < out.tradeoff.size(); ++i) {
            x.push_back(std::log(static_cast<double>(out.tradeoff[i].d)));
            y.push_back(std::log(out.tradeoff[i].mean_queue_length));
            if (i > 0 && !(out.tradeoff[i].cpu_time_per_buffer > out.tradeoff[i - 1].cpu_time_per_buffer)) monotone = false;
        }
        const double slope = regression_slope(x, y);
        std::string cpu;
        for (const auto& row : out.tradeoff) cpu += fmt::format(" {:.3g}", row.cpu_time_per_buffer);
        report(9, slope >= -1.25 && slope <= -0.75 && monotone,
               fmt::format("slope {:.4f} in [-1.25, -0.75]; CPU s/buffer by d:{} ({})", slope, cpu,
                           monotone ? "increasing" : "not increasing"));
    }
    {
        std::vector<double> accepted, rejected;
        for (const auto& row : out.ks) (row.accepted ? accepted : rejected).push_back(row.ks);
        const bool ok = !accepted.empty() && !rejected.empty() && median(accepted) < median(rejected);
        report(10, ok,
               fmt::format("accepted {} points median KS {:.4f}; rejected {} points median KS {:.4f}", accepted.size(),
                           accepted.empty() ? NAN : median(accepted), rejected.size(),
                           rejected.empty() ? NAN : median(rejected)));
    }
}

void compare_runs(const fs::path& a, const fs::path& b) {
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(a))
        if (entry.path().extension() == ".csv") files.push_back(entry.path().filename());
    std::sort(files.begin(), files.end());
    std::size_t mismatched = 0;
    std::string first;
    for (const auto& name : files) {
        std::string x = slurp(a / name), y = slurp(b / name);
        if (name == "tradeoff.csv") {
            x = drop_last_column(x);
            y = drop_last_column(y);
        }
        if (!fs::exists(b / name) || x != y) {
            if (mismatched++ == 0) first = name.string();
        }
    }
    std::size_t count_b = 0;
    for (const auto& entry : fs::directory_iterator(b))
        if (entry.path().extension() == ".csv") ++count_b;
    const bool ok = !files.empty() && mismatched == 0 && count_b == files.size();
    report(11, ok,
           fmt::format("{} CSV files compared, {} differ{}", files.size(), mismatched, first.empty() ? "" : " (first: " + first + ")"));
}

}  // namespace

int main(int argc, char** argv) {
    const fs::path root = argc > 1 ? fs::path(argv[1]) : fs::path("acceptance_out");
    fs::remove_all(root);
    const unsigned many = std::max(2u, std::thread::hardware_concurrency());

    fixed_point_exactness();
    closed_form_vs_rk4();

    const auto first = run_stochastic(root / "run_a", 1);
    judge(first);
    run_stochastic(root / "run_b", many);
    compare_runs(root / "run_a", root / "run_b");

    std::cout << (failures == 0 ? "all criteria passed" : fmt::format("{} criteria failed", failures)) << std::endl;
    return failures == 0 ? 0 : 1;
}
