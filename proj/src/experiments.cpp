#include "lqf/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <ctime>
#include <fstream>
#include <set>
#include <sstream>

#include <fmt/format.h>

#include "lqf/buffer_sim.hpp"
#include "lqf/csv.hpp"
#include "lqf/ctmc.hpp"
#include "lqf/diffusion.hpp"
#include "lqf/errors.hpp"
#include "lqf/fluid.hpp"
#include "lqf/parallel.hpp"
#include "lqf/rng.hpp"
#include "lqf/stats.hpp"

namespace lqf {

namespace {

using nlohmann::json;

const char* kind_name(ExperimentKind kind) {
    switch (kind) {
        case ExperimentKind::sample_paths: return "sample_paths";
        case ExperimentKind::histogram: return "histogram";
        case ExperimentKind::ks_sweep: return "ks_sweep";
        case ExperimentKind::tradeoff: return "tradeoff";
    }
    return "?";
}

// 1-based line of the first occurrence of "key" in the document, 0 if absent.
int line_of_key(const std::string& text, const std::string& key) {
    const auto pos = text.find('"' + key + '"');
    if (pos == std::string::npos) return 0;
    return 1 + static_cast<int>(std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(pos), '\n'));
}

[[noreturn]] void fail(const std::string& text, const std::string& key, const std::string& message) {
    const int line = line_of_key(text, key);
    if (line > 0) throw ConfigError(fmt::format("line {}: {}", line, message));
    throw ConfigError(message);
}

template <class T>
std::vector<T> read_grid(const std::string& text, const json& doc, const std::string& key) {
    const auto& node = doc.at(key);
    if (!node.is_array()) fail(text, key, fmt::format("'{}' must be an array", key));
    if (node.empty()) fail(text, key, fmt::format("'{}' must not be empty", key));
    std::vector<T> out;
    for (const auto& item : node) {
        if constexpr (std::is_integral_v<T>) {
            if (!item.is_number_integer()) fail(text, key, fmt::format("'{}' entries must be integers", key));
        } else {
            if (!item.is_number()) fail(text, key, fmt::format("'{}' entries must be numbers", key));
        }
        out.push_back(item.get<T>());
    }
    return out;
}

std::string spec_header(const ExperimentSpec& spec) {
    return fmt::format("# lqf {} spec={}\n", kVersion, spec.to_json().dump());
}

std::string tag(std::int64_t n, std::int64_t d, double lambda, double t) {
    return fmt::format("n{}_d{}_lambda{}_t{}", n, d, lambda, t);
}

double thread_cpu_seconds() {
    timespec ts{};
    clock_gettime(CLOCK_THREAD_CPUTIME_ID, &ts);
    return static_cast<double>(ts.tv_sec) + 1e-9 * static_cast<double>(ts.tv_nsec);
}

struct GridPoint {
    std::int64_t n;
    std::int64_t d;
    double lambda;
    double t;
    std::uint64_t seed;
};

// (n, d, lambda, t) in lexicographic order of the sorted, de-duplicated grids.
std::vector<GridPoint> grid_points(const ExperimentSpec& spec) {
    auto sorted = [](auto v) {
        std::sort(v.begin(), v.end());
        v.erase(std::unique(v.begin(), v.end()), v.end());
        return v;
    };
    std::vector<GridPoint> points;
    for (auto n : sorted(spec.n))
        for (auto d : sorted(spec.d))
            for (auto lambda : sorted(spec.lambda))
                for (auto t : sorted(spec.t_record))
                    points.push_back({n, d, lambda, t, stream_seed(spec.master_seed, points.size())});
    return points;
}

void emit(ExperimentResult& result, const ExperimentSpec& spec, const RunOptions& options, const std::string& name,
          const std::string& body) {
    const auto path = std::filesystem::path(spec.output_dir) / name;
    if (options.write_files) csv::write_file(path, spec_header(spec) + body);
    result.files.push_back(path);
}

}  // namespace

nlohmann::json ExperimentSpec::to_json() const {
    json j;
    j["kind"] = kind_name(kind);
    j["n"] = n;
    if (kind != ExperimentKind::sample_paths) j["d"] = d;
    j["lambda"] = lambda;
    j["replications"] = replications;
    j["t_record"] = t_record;
    j["master_seed"] = master_seed;
    j["time_scale"] = time_scale == TimeScale::raw ? "raw" : "fluid";
    if (kind == ExperimentKind::histogram) j["bin_width"] = bin_width;
    if (kind == ExperimentKind::sample_paths) j["record_points"] = record_points;
    j["fluid_dt"] = fluid_dt;
    return j;
}

ExperimentSpec parse_spec(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError(fmt::format("spec is not valid JSON: {}", e.what()));
    }
    if (!doc.is_object()) throw ConfigError("spec must be a JSON object");

    static const std::set<std::string> known{"kind",        "n",          "d",          "lambda",
                                             "replications", "t_record",   "master_seed", "output_dir",
                                             "time_scale",  "bin_width",  "record_points", "fluid_dt"};
    for (const auto& item : doc.items())
        if (!known.contains(item.key())) fail(text, item.key(), fmt::format("unknown key '{}'", item.key()));

    ExperimentSpec spec;
    if (!doc.contains("kind") || !doc["kind"].is_string()) throw ConfigError("'kind' is required");
    const auto kind = doc["kind"].get<std::string>();
    if (kind == "sample_paths") spec.kind = ExperimentKind::sample_paths;
    else if (kind == "histogram") spec.kind = ExperimentKind::histogram;
    else if (kind == "ks_sweep") spec.kind = ExperimentKind::ks_sweep;
    else if (kind == "tradeoff") spec.kind = ExperimentKind::tradeoff;
    else fail(text, "kind", fmt::format("unknown kind '{}'", kind));
    const bool paths = spec.kind == ExperimentKind::sample_paths;
    spec.time_scale = paths ? TimeScale::fluid : TimeScale::raw;

    if (!doc.contains("n")) throw ConfigError("'n' is required");
    spec.n = read_grid<std::int64_t>(text, doc, "n");
    for (auto n : spec.n)
        if (n < 1) fail(text, "n", fmt::format("n must be >= 1, got {}", n));

    if (paths) {
        if (doc.contains("d")) fail(text, "d", "sample_paths derives d from n; remove 'd'");
    } else {
        if (!doc.contains("d")) throw ConfigError("'d' is required");
        spec.d = read_grid<std::int64_t>(text, doc, "d");
        for (auto d : spec.d)
            if (d < 1) fail(text, "d", fmt::format("d must be >= 1, got {}", d));
    }

    if (doc.contains("lambda")) spec.lambda = read_grid<double>(text, doc, "lambda");
    for (double l : spec.lambda)
        if (!(l > 0.0 && l < 1.0)) fail(text, "lambda", fmt::format("lambda must lie in (0,1), got {}", l));

    if (doc.contains("replications")) {
        if (!doc["replications"].is_number_integer()) fail(text, "replications", "'replications' must be an integer");
        spec.replications = doc["replications"].get<std::int64_t>();
    }
    if (spec.replications < 1) fail(text, "replications", fmt::format("replications must be >= 1, got {}", spec.replications));

    if (doc.contains("t_record")) spec.t_record = read_grid<double>(text, doc, "t_record");
    for (double t : spec.t_record)
        if (!(t >= 0.0) || !std::isfinite(t)) fail(text, "t_record", fmt::format("record times must be finite and >= 0, got {}", t));

    if (doc.contains("master_seed")) {
        if (!doc["master_seed"].is_number_unsigned()) fail(text, "master_seed", "'master_seed' must be a nonnegative integer");
        spec.master_seed = doc["master_seed"].get<std::uint64_t>();
    }
    if (doc.contains("output_dir")) {
        if (!doc["output_dir"].is_string()) fail(text, "output_dir", "'output_dir' must be a string");
        spec.output_dir = doc["output_dir"].get<std::string>();
    }
    if (doc.contains("time_scale")) {
        const auto& ts = doc["time_scale"];
        if (!ts.is_string() || (ts != "raw" && ts != "fluid")) fail(text, "time_scale", "'time_scale' must be \"raw\" or \"fluid\"");
        const auto wanted = ts == "raw" ? TimeScale::raw : TimeScale::fluid;
        if (wanted != spec.time_scale)
            fail(text, "time_scale",
                 fmt::format("{} experiments use time_scale \"{}\"", kind, paths ? "fluid" : "raw"));
    }
    if (doc.contains("bin_width")) {
        if (spec.kind != ExperimentKind::histogram) fail(text, "bin_width", "'bin_width' applies to histogram only");
        if (!doc["bin_width"].is_number()) fail(text, "bin_width", "'bin_width' must be a number");
        spec.bin_width = doc["bin_width"].get<double>();
        if (!(spec.bin_width > 0.0)) fail(text, "bin_width", "'bin_width' must be positive");
    }
    if (doc.contains("record_points")) {
        if (!paths) fail(text, "record_points", "'record_points' applies to sample_paths only");
        if (!doc["record_points"].is_number_integer()) fail(text, "record_points", "'record_points' must be an integer");
        spec.record_points = doc["record_points"].get<std::int64_t>();
        if (spec.record_points < 2) fail(text, "record_points", "'record_points' must be >= 2");
    }
    if (doc.contains("fluid_dt")) {
        if (!doc["fluid_dt"].is_number()) fail(text, "fluid_dt", "'fluid_dt' must be a number");
        spec.fluid_dt = doc["fluid_dt"].get<double>();
        if (!(spec.fluid_dt > 0.0)) fail(text, "fluid_dt", "'fluid_dt' must be positive");
    }
    return spec;
}

ExperimentSpec load_spec(const std::filesystem::path& path) {
    std::ifstream file(path, std::ios::binary);
    if (!file) throw ConfigError(fmt::format("cannot read spec file {}", path.string()));
    std::stringstream buffer;
    buffer << file.rdbuf();
    try {
        return parse_spec(buffer.str());
    } catch (const ConfigError& e) {
        throw ConfigError(fmt::format("{}: {}", path.string(), e.what()));
    }
}

std::int64_t log_rule_d(std::int64_t n) {
    const auto d = static_cast<std::int64_t>(std::llround(10.0 * std::log10(static_cast<double>(n))));
    if (d < 1) throw ConfigError(fmt::format("d(n) = round(10 log10 {}) = {} is below 1", n, d));
    return d;
}

std::vector<double> replicate_f1(std::int64_t n, std::int64_t d, double lambda, double t, std::int64_t replications,
                                 std::uint64_t seed, unsigned workers) {
    std::vector<double> values(static_cast<std::size_t>(replications));
    parallel_for(values.size(), workers, [&](std::size_t i) {
        SystemConfig config{n, d, lambda, t, replication_seed(seed, i)};
        CountSimulator sim(config, initial_state(n));
        sim.advance_to(t);
        values[i] = sim.state().tail_fraction(1);
    });
    return values;
}

ExperimentResult run_sample_paths(const ExperimentSpec& spec, const RunOptions& options) {
    if (spec.kind != ExperimentKind::sample_paths) throw ConfigError("run_sample_paths needs kind sample_paths");
    ExperimentResult result;
    const double T = *std::max_element(spec.t_record.begin(), spec.t_record.end());
    const auto points = static_cast<std::size_t>(spec.record_points);
    std::vector<double> grid(points);
    for (std::size_t i = 0; i < points; ++i) grid[i] = T * static_cast<double>(i) / static_cast<double>(points - 1);

    const double lambda = spec.lambda.front();
    const auto fluid = solve_fluid(FluidConfig{lambda, {0.0}, T, spec.fluid_dt});
    std::vector<double> u1(points);
    for (std::size_t i = 0; i < points; ++i) u1[i] = fluid.value(1, grid[i]);

    auto ns = spec.n;
    std::sort(ns.begin(), ns.end());
    ns.erase(std::unique(ns.begin(), ns.end()), ns.end());
    std::string summary = "n,d,lambda,replications,mean_abs_deviation\n";
    for (std::size_t p = 0; p < ns.size(); ++p) {
        const auto n = ns[p];
        const auto d = log_rule_d(n);
        const double dd = static_cast<double>(d);
        std::vector<double> raw(points);
        for (std::size_t i = 0; i < points; ++i) raw[i] = grid[i] / dd;
        raw.back() = T / dd;

        const auto reps = static_cast<std::size_t>(spec.replications);
        const auto point_seed = stream_seed(spec.master_seed, p);
        std::vector<std::vector<double>> scaled(reps);
        parallel_for(reps, options.workers, [&](std::size_t r) {
            SystemConfig config{n, d, lambda, T / dd, replication_seed(point_seed, r)};
            const auto path = simulate(config, raw, 1, initial_state(n));
            std::vector<double> u(points);
            for (std::size_t i = 0; i < points; ++i) u[i] = dd * path.at(i, 1);
            scaled[r] = std::move(u);
        });

        // trapezoidal time average over the uniform grid
        double total = 0.0;
        for (const auto& path : scaled) {
            double area = 0.0;
            for (std::size_t i = 0; i + 1 < points; ++i)
                area += 0.5 * (std::abs(path[i] - u1[i]) + std::abs(path[i + 1] - u1[i + 1])) * (grid[i + 1] - grid[i]);
            total += T > 0.0 ? area / T : std::abs(path[0] - u1[0]);
        }
        const double deviation = total / static_cast<double>(reps);
        result.sample_paths.push_back({n, d, deviation});
        summary += fmt::format("{},{},{},{},{}\n", n, d, csv::number(lambda), reps, csv::number(deviation));

        std::string body = "t,fluid";
        for (std::size_t r = 0; r < reps; ++r) body += fmt::format(",path{}", r);
        body += '\n';
        for (std::size_t i = 0; i < points; ++i) {
            body += csv::number(grid[i]) + ',' + csv::number(u1[i]);
            for (const auto& path : scaled) body += ',' + csv::number(path[i]);
            body += '\n';
        }
        emit(result, spec, options, fmt::format("sample_paths_n{}_d{}.csv", n, d), body);
    }
    emit(result, spec, options, "sample_paths_summary.csv", summary);
    return result;
}

ExperimentResult run_histogram(const ExperimentSpec& spec, const RunOptions& options) {
    if (spec.kind != ExperimentKind::histogram) throw ConfigError("run_histogram needs kind histogram");
    ExperimentResult result;
    std::string summary =
        "n,d,lambda,t,replications,empirical_mean,empirical_variance,diffusion_mean,modified_mean,approx_variance,"
        "ks_diffusion,ks_modified\n";
    for (const auto& pt : grid_points(spec)) {
        EmpiricalSample sample{replicate_f1(pt.n, pt.d, pt.lambda, pt.t, spec.replications, pt.seed, options.workers),
                               {pt.n, pt.d, pt.lambda, pt.t}};
        const F1Approximation approx(pt.d, pt.lambda, pt.t, spec.fluid_dt);
        const auto diffusion = approx.at(pt.n, pt.t, ApproxKind::diffusion);
        const auto modified = approx.at(pt.n, pt.t, ApproxKind::modified);
        const auto moments = sample_moments(sample.values);
        const double sd = std::sqrt(diffusion.variance);

        HistogramSummary row{pt.n, pt.d, pt.lambda, pt.t, spec.replications, moments.mean, moments.variance,
                             diffusion.mean, modified.mean, diffusion.variance, std::nan(""), std::nan("")};
        if (sd > 0.0) {
            row.ks_diffusion = ks_distance(sample, [&](double x) { return normal_cdf(x, diffusion.mean, sd); });
            row.ks_modified = ks_distance(sample, [&](double x) { return normal_cdf(x, modified.mean, sd); });
        }
        result.histograms.push_back(row);
        summary += fmt::format("{},{},{},{},{},{},{},{},{},{},{},{}\n", pt.n, pt.d, csv::number(pt.lambda),
                               csv::number(pt.t), spec.replications, csv::number(row.empirical_mean),
                               csv::number(row.empirical_variance), csv::number(row.diffusion_mean),
                               csv::number(row.modified_mean), csv::number(row.approx_variance),
                               csv::number(row.ks_diffusion), csv::number(row.ks_modified));

        const double width = spec.bin_width > 0.0 ? spec.bin_width : 1.0 / static_cast<double>(pt.n);
        const auto bins = histogram(sample, width);
        const auto name = tag(pt.n, pt.d, pt.lambda, pt.t);
        emit(result, spec, options, "histogram_" + name + ".csv", csv::histogram(bins));

        // overlay densities over the histogram range padded by 4 sd
        std::string overlay = "x,diffusion_pdf,modified_pdf\n";
        if (sd > 0.0) {
            const double lo = std::min(bins.front().left, std::min(diffusion.mean, modified.mean) - 4.0 * sd);
            const double hi = std::max(bins.back().right, std::max(diffusion.mean, modified.mean) + 4.0 * sd);
            constexpr int kPoints = 201;
            for (int i = 0; i < kPoints; ++i) {
                const double x = lo + (hi - lo) * i / (kPoints - 1);
                overlay += csv::number(x) + ',' + csv::number(normal_pdf(x, diffusion.mean, sd)) + ',' +
                           csv::number(normal_pdf(x, modified.mean, sd)) + '\n';
            }
        }
        emit(result, spec, options, "overlay_" + name + ".csv", overlay);
    }
    emit(result, spec, options, "histogram_summary.csv", summary);
    return result;
}

ExperimentResult run_ks_sweep(const ExperimentSpec& spec, const RunOptions& options) {
    if (spec.kind != ExperimentKind::ks_sweep) throw ConfigError("run_ks_sweep needs kind ks_sweep");
    ExperimentResult result;
    for (const auto& pt : grid_points(spec)) {
        EmpiricalSample sample{replicate_f1(pt.n, pt.d, pt.lambda, pt.t, spec.replications, pt.seed, options.workers),
                               {pt.n, pt.d, pt.lambda, pt.t}};
        const auto modified = approx_f1_distribution(pt.n, pt.d, pt.lambda, pt.t, ApproxKind::modified, spec.fluid_dt);
        const double sd = std::sqrt(modified.variance);
        const auto ms = stationary_mu_sigma(pt.n, pt.d, pt.lambda);
        KsSweepRow row{pt.n, pt.d, pt.lambda, pt.t, ms.mu, ms.sigma, std::nan(""), ks_region_accepts(ms.mu, ms.sigma)};
        if (sd > 0.0) row.ks = ks_distance(sample, [&](double x) { return normal_cdf(x, modified.mean, sd); });
        result.ks_rows.push_back(row);
    }
    std::sort(result.ks_rows.begin(), result.ks_rows.end(), [](const KsSweepRow& a, const KsSweepRow& b) {
        return std::tie(a.n, a.d, a.lambda, a.t) < std::tie(b.n, b.d, b.lambda, b.t);
    });
    std::string body = "n,d,lambda,t,replications,mu,sigma,ks,region_accepts\n";
    for (const auto& r : result.ks_rows)
        body += fmt::format("{},{},{},{},{},{},{},{},{}\n", r.n, r.d, csv::number(r.lambda), csv::number(r.t),
                            spec.replications, csv::number(r.mu), csv::number(r.sigma), csv::number(r.ks),
                            r.accepted ? 1 : 0);
    emit(result, spec, options, "ks_sweep.csv", body);
    return result;
}

ExperimentResult run_tradeoff(const ExperimentSpec& spec, const RunOptions& options) {
    if (spec.kind != ExperimentKind::tradeoff) throw ConfigError("run_tradeoff needs kind tradeoff");
    ExperimentResult result;
    const auto reps = static_cast<std::size_t>(spec.replications);
    std::string body = "n,d,lambda,t,replications,mean_queue_length,cpu_time_per_buffer\n";
    for (const auto& pt : grid_points(spec)) {
        std::vector<double> lengths(reps), cpu(reps);
        parallel_for(reps, options.workers, [&](std::size_t i) {
            BufferSimulator sim(SystemConfig{pt.n, pt.d, pt.lambda, pt.t, replication_seed(pt.seed, i)});
            const double start = thread_cpu_seconds();
            sim.advance_to(pt.t);
            cpu[i] = thread_cpu_seconds() - start;
            lengths[i] = sim.mean_queue_length();
        });
        TradeoffRow row{pt.n, pt.d, pt.lambda, pt.t, sample_moments(lengths).mean,
                        median(cpu) / static_cast<double>(pt.n)};
        result.tradeoff_rows.push_back(row);
        body += fmt::format("{},{},{},{},{},{},{}\n", row.n, row.d, csv::number(row.lambda), csv::number(row.t),
                            reps, csv::number(row.mean_queue_length), csv::number(row.cpu_time_per_buffer));
    }
    emit(result, spec, options, "tradeoff.csv", body);
    return result;
}

ExperimentResult run_experiment(const ExperimentSpec& spec, const RunOptions& options) {
    switch (spec.kind) {
        case ExperimentKind::sample_paths: return run_sample_paths(spec, options);
        case ExperimentKind::histogram: return run_histogram(spec, options);
        case ExperimentKind::ks_sweep: return run_ks_sweep(spec, options);
        case ExperimentKind::tradeoff: return run_tradeoff(spec, options);
    }
    throw ConfigError("unknown experiment kind");
}

}  // namespace lqf
