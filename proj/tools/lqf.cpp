// lqf: experiment runner and numerical utilities for randomized
// longest-queue-first parallel queues.
//
//   lqf run <spec.json> [--out DIR] [--workers N] [--seed S]
//   lqf fluid --lambda L --K K --T T [--dt DT]
//   lqf oracle --n N --d D --lambda L --t T [--max-total M]
//
// Exit codes: 0 success, 2 configuration error, 3 numerical-domain error.

#include <iostream>

#include <CLI11.hpp>

#include "lqf/csv.hpp"
#include "lqf/errors.hpp"
#include "lqf/experiments.hpp"
#include "lqf/fluid.hpp"
#include "lqf/oracle.hpp"
#include "lqf/parallel.hpp"

namespace {

constexpr int kConfigError = 2;
constexpr int kDomainError = 3;

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Randomized longest-queue-first simulator and limit toolkit"};
    app.set_version_flag("--version", lqf::kVersion);
    app.require_subcommand(1);

    auto* run = app.add_subcommand("run", "Run an experiment described by a JSON spec");
    std::string spec_path;
    std::string out_dir;
    unsigned workers = lqf::default_workers();
    std::uint64_t seed = 0;
    run->add_option("spec", spec_path, "Experiment spec (JSON)")->required();
    run->add_option("--out", out_dir, "Output directory (overrides output_dir)");
    run->add_option("--workers", workers, "Worker threads")->check(CLI::PositiveNumber);
    auto* seed_opt = run->add_option("--seed", seed, "Master seed (overrides master_seed)");

    auto* fluid = app.add_subcommand("fluid", "Print the fluid solution as CSV (empty start)");
    double lambda = 0.7;
    std::size_t K = 2;
    double T = 10.0;
    double dt = 1e-3;
    fluid->add_option("--lambda", lambda, "Arrival rate per buffer")->required();
    fluid->add_option("--K", K, "Number of levels")->required()->check(CLI::PositiveNumber);
    fluid->add_option("--T", T, "Horizon (fluid time)")->required();
    fluid->add_option("--dt", dt, "RK4 step");

    auto* oracle = app.add_subcommand("oracle", "Print the exact transient distribution as CSV (empty start)");
    std::int64_t n = 2;
    std::int64_t d = 2;
    double t = 1.0;
    std::int64_t max_total = 40;
    oracle->add_option("--n", n, "Buffers")->required();
    oracle->add_option("--d", d, "Samples per service")->required();
    oracle->add_option("--lambda", lambda, "Arrival rate per buffer")->required();
    oracle->add_option("--t", t, "Time")->required();
    oracle->add_option("--max-total", max_total, "Cap on total queued tasks");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kConfigError;
    }

    try {
        if (*run) {
            auto spec = lqf::load_spec(spec_path);
            if (!out_dir.empty()) spec.output_dir = out_dir;
            if (*seed_opt) spec.master_seed = seed;
            const auto result = lqf::run_experiment(spec, lqf::RunOptions{workers, true});
            for (const auto& file : result.files) std::cout << file.string() << '\n';
        } else if (*fluid) {
            const auto solution = lqf::solve_fluid(lqf::FluidConfig{lambda, std::vector<double>(K, 0.0), T, dt});
            std::cout << lqf::csv::fluid_solution(solution);
        } else if (*oracle) {
            const lqf::SystemConfig config{n, d, lambda, t, 0};
            const auto result = lqf::uniformization_oracle(config, t, max_total);
            std::cout << lqf::csv::oracle_result(result);
            std::cerr << "truncation_error_bound=" << lqf::csv::number(result.truncation_error_bound) << '\n';
        }
    } catch (const lqf::ConfigError& e) {
        std::cerr << "configuration error: " << e.what() << '\n';
        return kConfigError;
    } catch (const lqf::DomainError& e) {
        std::cerr << "numerical-domain error: " << e.what() << '\n';
        return kDomainError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
