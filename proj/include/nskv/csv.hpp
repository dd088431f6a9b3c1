// CSV output. Numbers are written in scientific notation with 17
// significant digits, which round-trips any double.
#pragma once

#include <string>
#include <vector>

#include "nskv/diagnostics.hpp"
#include "nskv/evolution.hpp"

namespace nskv {

/// "%.16e" formatting.
std::string format_number(double v);

/// Columns: t_tau, energy, enstrophy, max_speed, align_cos, boundary_frac.
void write_diagnostics_csv(const std::string& path, const DiagSeries& series, double tau);
DiagSeries read_diagnostics_csv(const std::string& path, double tau);

/// Long format: t_tau, <axis>, density. A leading '#' line states the
/// normalization.
void write_marginal_csv(const std::string& path, const MarginalSeries& m, double tau);

/// Generic table writer used by reports.
void write_table_csv(const std::string& path, const std::vector<std::string>& header,
                     const std::vector<std::vector<double>>& rows);

}  // namespace nskv
