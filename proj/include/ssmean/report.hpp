#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "ssmean/simlab.hpp"

namespace ssmean {

enum class ReportFormat { Text, Csv, Json };

ReportFormat parse_report_format(const std::string& name);

/// Aligned table, 6 significant digits.
void write_text(std::ostream& os, const std::vector<SimulationReport>& reports);

/// One line per (cell, estimator, m); doubles at full precision.
/// Columns: setting,p,n,m,estimator,loss,ci_length,miscoverage,coverage,mc_se,
/// ci_length_se,miscoverage_se,reps,failures,theta
void write_csv(std::ostream& os, const std::vector<SimulationReport>& reports);

void write_json(std::ostream& os, const std::vector<SimulationReport>& reports);

void write_report(std::ostream& os, const std::vector<SimulationReport>& reports, ReportFormat format);

/// "%.6g" and "%.17g" helpers shared with the CLI.
std::string format_short(double v);
std::string format_full(double v);

}  // namespace ssmean
