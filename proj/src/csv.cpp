#include "lqf/csv.hpp"

#include <fstream>

#include <fmt/format.h>

#include "lqf/errors.hpp"

namespace lqf::csv {

std::string number(double x) { return fmt::format("{:.17g}", x); }

std::string tail_fraction_path(const TailFractionPath& path) {
    std::string out = "t";
    for (std::int64_t k = 0; k <= path.k_max(); ++k) out += fmt::format(",F{}", k);
    out += '\n';
    for (std::size_t r = 0; r < path.rows(); ++r) {
        out += number(path.record_times()[r]);
        for (double f : path.row(r)) out += ',' + number(f);
        out += '\n';
    }
    return out;
}

std::string fluid_solution(const FluidSolution& solution) {
    std::string out = "t";
    for (std::size_t k = 1; k <= solution.K(); ++k) out += fmt::format(",u{}", k);
    out += '\n';
    for (std::size_t i = 0; i < solution.grid().size(); ++i) {
        out += number(solution.grid()[i]);
        for (std::size_t k = 1; k <= solution.K(); ++k) out += ',' + number(solution.at(i, k));
        out += '\n';
    }
    return out;
}

std::string time_series(const TimeSeries& series) {
    std::string out = "t,value\n";
    for (std::size_t i = 0; i < series.t.size(); ++i) out += number(series.t[i]) + ',' + number(series.value[i]) + '\n';
    return out;
}

std::string sde_path(const SdePath& path) { return time_series(TimeSeries{path.grid, path.z}); }

std::string histogram(const std::vector<HistogramBin>& bins) {
    std::string out = "bin_left,bin_right,density\n";
    for (const auto& b : bins) out += number(b.left) + ',' + number(b.right) + ',' + number(b.density) + '\n';
    return out;
}

std::string oracle_result(const OracleResult& result) {
    std::string out = "state,probability\n";
    for (const auto& [counts, p] : result.state_probabilities) out += encode_state(counts) + ',' + number(p) + '\n';
    return out;
}

void write_file(const std::filesystem::path& path, const std::string& content) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream file(path, std::ios::binary | std::ios::trunc);
    if (!file) throw ConfigError(fmt::format("cannot open {} for writing", path.string()));
    file.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!file) throw ConfigError(fmt::format("failed writing {}", path.string()));
}

}  // namespace lqf::csv
