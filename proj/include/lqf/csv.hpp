#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "lqf/ctmc.hpp"
#include "lqf/diffusion.hpp"
#include "lqf/fluid.hpp"
#include "lqf/oracle.hpp"
#include "lqf/stats.hpp"

namespace lqf::csv {

/// Shortest text that still round-trips: 17 significant digits, '.' separator.
std::string number(double x);

/// `t,F0,...,Fk`
std::string tail_fraction_path(const TailFractionPath& path);
/// `t,u1,...,uK`
std::string fluid_solution(const FluidSolution& solution);
/// `t,value`
std::string time_series(const TimeSeries& series);
std::string sde_path(const SdePath& path);
/// `bin_left,bin_right,density`
std::string histogram(const std::vector<HistogramBin>& bins);
/// `state,probability`, states encoded as colon-joined counts.
std::string oracle_result(const OracleResult& result);

/// Writes bytes verbatim (LF line endings on every platform).
void write_file(const std::filesystem::path& path, const std::string& content);

}  // namespace lqf::csv
