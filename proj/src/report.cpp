#include "ssmean/report.hpp"

#include <cstdio>
#include <iomanip>
#include <ostream>

#include <json.hpp>

#include "ssmean/error.hpp"

namespace ssmean {

namespace {

std::string m_label(const EstimatorRow& row) {
    if (row.m) return std::to_string(*row.m);
    if (row.estimator.rfind("ls", 0) == 0 || row.estimator == "oracle") return "inf";
    return "-";
}

}  // namespace

std::string format_short(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

std::string format_full(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

ReportFormat parse_report_format(const std::string& name) {
    if (name == "text") return ReportFormat::Text;
    if (name == "csv") return ReportFormat::Csv;
    if (name == "json") return ReportFormat::Json;
    throw Error(ErrorCode::InvalidArgs, "format must be text, csv or json, got '" + name + "'");
}

void write_text(std::ostream& os, const std::vector<SimulationReport>& reports) {
    for (const SimulationReport& r : reports) {
        os << "setting " << to_string(r.dgp.id) << "  (p, n) = (" << r.dgp.p << ", " << r.dgp.n
           << ")  reps = " << r.reps << "  alpha = " << format_short(r.alpha)
           << "  theta = " << format_short(r.theta) << "  seed = " << r.dgp.seed << '\n';
        os << std::left << std::setw(12) << "estimator" << std::right << std::setw(8) << "m"
           << std::setw(14) << "sq_loss" << std::setw(14) << "mc_se" << std::setw(14) << "n*loss"
           << std::setw(14) << "ci_length" << std::setw(13) << "miscoverage" << std::setw(10)
           << "coverage" << std::setw(9) << "failed" << '\n';
        for (const EstimatorRow& row : r.rows) {
            os << std::left << std::setw(12) << row.estimator << std::right << std::setw(8)
               << m_label(row) << std::setw(14) << format_short(row.avg_sq_loss) << std::setw(14)
               << format_short(row.loss_se) << std::setw(14)
               << format_short(static_cast<double>(r.dgp.n) * row.avg_sq_loss) << std::setw(14)
               << format_short(row.avg_ci_length) << std::setw(13) << format_short(row.miscoverage)
               << std::setw(10) << format_short(row.coverage()) << std::setw(9) << row.failures
               << '\n';
        }
        os << '\n';
    }
}

void write_csv(std::ostream& os, const std::vector<SimulationReport>& reports) {
    os << "setting,p,n,m,estimator,loss,ci_length,miscoverage,coverage,mc_se,ci_length_se,"
          "miscoverage_se,reps,failures,theta\n";
    for (const SimulationReport& r : reports) {
        for (const EstimatorRow& row : r.rows) {
            os << to_string(r.dgp.id) << ',' << r.dgp.p << ',' << r.dgp.n << ',' << m_label(row)
               << ',' << row.estimator << ',' << format_full(row.avg_sq_loss) << ','
               << format_full(row.avg_ci_length) << ',' << format_full(row.miscoverage) << ','
               << format_full(row.coverage()) << ',' << format_full(row.loss_se) << ','
               << format_full(row.ci_length_se) << ',' << format_full(row.miscoverage_se()) << ','
               << row.reps << ',' << row.failures << ',' << format_full(r.theta) << '\n';
        }
    }
}

void write_json(std::ostream& os, const std::vector<SimulationReport>& reports) {
    nlohmann::ordered_json cells = nlohmann::ordered_json::array();
    for (const SimulationReport& r : reports) {
        nlohmann::ordered_json rows = nlohmann::ordered_json::array();
        for (const EstimatorRow& row : r.rows) {
            rows.push_back({{"estimator", row.estimator},
                            {"m", m_label(row)},
                            {"loss", row.avg_sq_loss},
                            {"ci_length", row.avg_ci_length},
                            {"miscoverage", row.miscoverage},
                            {"coverage", row.coverage()},
                            {"mc_se", row.loss_se},
                            {"ci_length_se", row.ci_length_se},
                            {"miscoverage_se", row.miscoverage_se()},
                            {"reps", row.reps},
                            {"failures", row.failures}});
        }
        cells.push_back({{"setting", to_string(r.dgp.id)},
                         {"p", r.dgp.p},
                         {"n", r.dgp.n},
                         {"reps", r.reps},
                         {"alpha", r.alpha},
                         {"seed", r.dgp.seed},
                         {"theta", r.theta},
                         {"rows", std::move(rows)}});
    }
    os << cells.dump(2) << '\n';
}

void write_report(std::ostream& os, const std::vector<SimulationReport>& reports, ReportFormat format) {
    switch (format) {
    case ReportFormat::Text: write_text(os, reports); break;
    case ReportFormat::Csv: write_csv(os, reports); break;
    case ReportFormat::Json: write_json(os, reports); break;
    }
}

}  // namespace ssmean
