#include "ssmean/cli.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <optional>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "ssmean/ate.hpp"
#include "ssmean/basis.hpp"
#include "ssmean/csv_io.hpp"
#include "ssmean/error.hpp"
#include "ssmean/report.hpp"
#include "ssmean/simlab.hpp"

namespace ssmean::cli {

namespace {

struct EstimateOptions {
    std::string labeled;
    std::string response = "y";
    std::string unlabeled;
    std::string mu;
    std::vector<std::string> estimators;
    double alpha = 0.05;
    std::string basis = "none";
    bool truncate = false;
    std::string out;
    std::string format = "text";
};

struct SimulateOptions {
    std::string setting;
    std::size_t n = 100;
    std::size_t p = 1;
    std::vector<std::size_t> ms;
    std::size_t reps = 1000;
    std::uint64_t seed = 1;
    double alpha = 0.05;
    unsigned threads = 1;
    double tau2 = 1.0;
    std::string basis = "none";
    bool no_truncated = false;
    bool no_oracle = false;
    std::string out;
    std::string format = "text";
};

struct AteOptions {
    std::string treatment;
    std::string control;
    std::string extra;
    std::string response = "y";
    double alpha = 0.05;
    std::string out;
    std::string format = "text";
};

// Writes to --out when given, otherwise to the provided stream.
template <typename Fn>
void emit(const std::string& path, std::ostream& fallback, Fn&& write) {
    if (path.empty()) {
        write(fallback);
        return;
    }
    std::ofstream file(path, std::ios::binary);
    if (!file) throw Error(ErrorCode::Io, "cannot write " + path);
    write(file);
    if (!file) throw Error(ErrorCode::Io, "write failed for " + path);
}

Vector read_mu(const std::string& text) {
    std::error_code ec;
    if (std::filesystem::is_regular_file(text, ec)) {
        std::ifstream in(text);
        std::stringstream buf;
        buf << in.rdbuf();
        std::string contents = buf.str();
        std::replace(contents.begin(), contents.end(), '\n', ',');
        while (!contents.empty() && (contents.back() == ',' || contents.back() == '\r')) contents.pop_back();
        return parse_number_list(contents);
    }
    return parse_number_list(text);
}

std::string variance_label(EstimatorKind kind) {
    switch (kind) {
    case EstimatorKind::SampleMean: return "sigma2_y";
    case EstimatorKind::LS: return "mse";
    case EstimatorKind::SSLS: return "nu2";
    case EstimatorKind::OracleIdeal:
    case EstimatorKind::OracleSS: return "oracle_var";
    }
    return "variance";
}

struct EstimateRun {
    std::vector<MeanEstimate> estimates;
    std::vector<std::string> notes;
    LabeledTable table;
    Vector xbar;
    std::optional<Vector> xbar_full;
    std::size_t m = 0;
};

std::vector<std::string> split_names(const std::vector<std::string>& raw) {
    std::vector<std::string> out;
    for (const auto& item : raw) {
        std::stringstream ss(item);
        std::string part;
        while (std::getline(ss, part, ',')) {
            if (!part.empty()) out.push_back(part);
        }
    }
    return out;
}

EstimateRun run_estimate(const EstimateOptions& o) {
    EstimateRun run;
    run.table = load_labeled_csv(o.labeled, o.response);

    Dataset ds;
    ds.y = run.table.y;
    ds.x = run.table.x;
    if (!o.unlabeled.empty()) {
        ds.x_unlabeled = load_unlabeled_csv(o.unlabeled, run.table.covariates);
    }
    if (!o.mu.empty()) ds.known_mu = read_mu(o.mu);
    ds.validate();
    run.m = ds.m();
    run.xbar = column_means(ds.x);
    if (!o.unlabeled.empty()) {
        Vector full = column_sums(ds.x);
        const Vector extra = column_sums(ds.x_unlabeled);
        for (std::size_t j = 0; j < full.size(); ++j) {
            full[j] = (full[j] + (ds.m() > 0 ? extra[j] : 0.0)) / static_cast<double>(ds.n() + ds.m());
        }
        run.xbar_full = std::move(full);
    }

    const BasisSpec basis = parse_basis(o.basis);
    std::vector<std::string> wanted = split_names(o.estimators);
    const bool automatic = wanted.empty() || std::find(wanted.begin(), wanted.end(), "all") != wanted.end();
    if (automatic) {
        wanted = {"mean"};
        if (ds.known_mu) wanted.push_back("ls");
        if (!o.unlabeled.empty() || !ds.known_mu) wanted.push_back("ssls");
    }

    for (const std::string& name : wanted) {
        if (name == "mean") {
            run.estimates.push_back(estimate_sample_mean(ds, o.alpha));
        } else if (name == "ls") {
            if (automatic && basis.family == BasisFamily::Polynomial) {
                run.notes.push_back("ls skipped: polynomial basis means are unknown, use ssls");
                continue;
            }
            run.estimates.push_back(estimate_ls_augmented(ds, basis, o.alpha, o.truncate));
        } else if (name == "ssls") {
            run.estimates.push_back(estimate_ssls_augmented(ds, basis, o.alpha, o.truncate));
        } else {
            throw Error(ErrorCode::InvalidArgs, "unknown estimator '" + name + "' (mean, ls, ssls, all)");
        }
    }
    return run;
}

void write_estimate_text(std::ostream& os, const EstimateRun& run, double alpha) {
    os << "labeled n = " << run.table.y.size() << ", unlabeled m = " << run.m
       << ", covariates p = " << run.table.covariates.size() << ", alpha = " << format_short(alpha)
       << "\n\n";
    os << std::left << std::setw(10) << "estimator" << std::right << std::setw(14) << "estimate"
       << std::setw(10) << "var_basis" << std::setw(14) << "variance" << std::setw(14) << "ci_lower"
       << std::setw(14) << "ci_upper" << std::setw(14) << "ci_length" << std::setw(14)
       << "adjustment" << std::setw(11) << "truncated" << '\n';
    for (const MeanEstimate& e : run.estimates) {
        os << std::left << std::setw(10) << to_string(e.kind) << std::right << std::setw(14)
           << format_short(e.theta_hat) << std::setw(10) << variance_label(e.kind) << std::setw(14)
           << format_short(e.variance_per_n) << std::setw(14) << format_short(e.ci_lower)
           << std::setw(14) << format_short(e.ci_upper) << std::setw(14)
           << format_short(e.ci_length()) << std::setw(14)
           << (e.adjustment ? format_short(*e.adjustment) : std::string("-")) << std::setw(11)
           << (e.truncated ? "yes" : "no") << '\n';
    }
    for (const auto& note : run.notes) os << "note: " << note << '\n';

    // Coefficients from the first regression estimate, with the covariate means
    // that drive the adjustment.
    const auto reg = std::find_if(run.estimates.begin(), run.estimates.end(),
                                  [](const MeanEstimate& e) { return e.fit.has_value(); });
    if (reg == run.estimates.end()) return;
    const RegressionFit& fit = *reg->fit;
    os << "\nregression fit" << (reg->basis.empty() || reg->basis == "none" ? "" : " (basis " + reg->basis + ")")
       << ": mse = " << format_short(fit.mse) << ", condition = " << format_short(fit.condition_estimate)
       << '\n';
    os << std::left << std::setw(24) << "term" << std::right << std::setw(14) << "beta";
    const bool full = run.xbar_full.has_value();
    if (full) os << std::setw(16) << "xbar_full-xbar" << std::setw(14) << "xbar" << std::setw(14) << "xbar_full";
    os << '\n' << std::left << std::setw(24) << "(intercept)" << std::right << std::setw(14)
       << format_short(fit.beta1) << '\n';
    for (std::size_t j = 0; j < fit.beta2.size(); ++j) {
        const std::string name =
            j < run.table.covariates.size() ? run.table.covariates[j] : "basis_" + std::to_string(j - run.table.covariates.size() + 1);
        os << std::left << std::setw(24) << name << std::right << std::setw(14) << format_short(fit.beta2[j]);
        if (full && j < run.xbar.size()) {
            os << std::setw(16) << format_short((*run.xbar_full)[j] - run.xbar[j]) << std::setw(14)
               << format_short(run.xbar[j]) << std::setw(14) << format_short((*run.xbar_full)[j]);
        }
        os << '\n';
    }
    for (const MeanEstimate& e : run.estimates) {
        if (e.kind == EstimatorKind::SSLS && e.adjustment) {
            os << "adjustment beta2^T (xbar_full - xbar) = " << format_short(*e.adjustment) << '\n';
        }
    }
}

void write_estimate_csv(std::ostream& os, const EstimateRun& run) {
    os << "estimator,estimate,variance_basis,variance,ci_lower,ci_upper,ci_length,alpha,n,m,"
          "adjustment,truncated,basis\n";
    for (const MeanEstimate& e : run.estimates) {
        os << to_string(e.kind) << ',' << format_full(e.theta_hat) << ',' << variance_label(e.kind)
           << ',' << format_full(e.variance_per_n) << ',' << format_full(e.ci_lower) << ','
           << format_full(e.ci_upper) << ',' << format_full(e.ci_length()) << ','
           << format_full(e.alpha) << ',' << e.n << ',' << run.m << ','
           << (e.adjustment ? format_full(*e.adjustment) : std::string()) << ','
           << (e.truncated ? 1 : 0) << ',' << (e.basis.empty() ? "none" : e.basis) << '\n';
    }
}

void write_estimate_json(std::ostream& os, const EstimateRun& run) {
    nlohmann::ordered_json arr = nlohmann::ordered_json::array();
    for (const MeanEstimate& e : run.estimates) {
        nlohmann::ordered_json j = {{"estimator", to_string(e.kind)},
                                    {"estimate", e.theta_hat},
                                    {"variance_basis", variance_label(e.kind)},
                                    {"variance", e.variance_per_n},
                                    {"ci_lower", e.ci_lower},
                                    {"ci_upper", e.ci_upper},
                                    {"ci_length", e.ci_length()},
                                    {"alpha", e.alpha},
                                    {"n", e.n},
                                    {"m", run.m},
                                    {"truncated", e.truncated},
                                    {"basis", e.basis.empty() ? "none" : e.basis}};
        if (e.adjustment) j["adjustment"] = *e.adjustment;
        if (e.fit) {
            j["intercept"] = e.fit->beta1;
            j["slopes"] = e.fit->beta2;
            j["mse"] = e.fit->mse;
        }
        arr.push_back(std::move(j));
    }
    nlohmann::ordered_json doc = {{"covariates", run.table.covariates}, {"estimates", std::move(arr)}};
    os << doc.dump(2) << '\n';
}

int cmd_estimate(const EstimateOptions& o, std::ostream& out) {
    const EstimateRun run = run_estimate(o);
    const ReportFormat fmt = parse_report_format(o.format);
    emit(o.out, out, [&](std::ostream& os) {
        switch (fmt) {
        case ReportFormat::Text: write_estimate_text(os, run, o.alpha); break;
        case ReportFormat::Csv: write_estimate_csv(os, run); break;
        case ReportFormat::Json: write_estimate_json(os, run); break;
        }
    });
    return kExitOk;
}

int cmd_simulate(const SimulateOptions& o, std::ostream& out) {
    SimulationConfig config;
    config.dgp.id = parse_dgp(o.setting);
    config.dgp.n = o.n;
    config.dgp.p = o.p;
    config.dgp.seed = o.seed;
    config.dgp.tau2 = o.tau2;
    config.ms = o.ms;
    config.reps = o.reps;
    config.alpha = o.alpha;
    config.threads = o.threads;
    config.truncated_variants = !o.no_truncated;
    config.oracle = !o.no_oracle;
    const BasisSpec basis = parse_basis(o.basis);
    if (basis.family != BasisFamily::None) config.basis = basis;
    const ReportFormat fmt = parse_report_format(o.format);
    const std::vector<SimulationReport> reports{run_simulation(config)};
    emit(o.out, out, [&](std::ostream& os) { write_report(os, reports, fmt); });
    return kExitOk;
}

int cmd_ate(const AteOptions& o, std::ostream& out) {
    const LabeledTable t = load_labeled_csv(o.treatment, o.response);
    const LabeledTable c = load_labeled_csv(o.control, o.response);
    if (c.covariates.size() != t.covariates.size() ||
        !std::is_permutation(c.covariates.begin(), c.covariates.end(), t.covariates.begin())) {
        throw Error(ErrorCode::ColumnMismatch, "treatment and control files have different covariates");
    }
    AteDataset ds;
    ds.y_t = t.y;
    ds.x_t = t.x;
    // Reorder control columns to the treatment order.
    ds.y_c = c.y;
    ds.x_c = Matrix(c.x.rows(), t.covariates.size());
    for (std::size_t j = 0; j < t.covariates.size(); ++j) {
        const auto src = static_cast<std::size_t>(
            std::find(c.covariates.begin(), c.covariates.end(), t.covariates[j]) - c.covariates.begin());
        for (std::size_t r = 0; r < c.x.rows(); ++r) ds.x_c(r, j) = c.x(r, src);
    }
    if (!o.extra.empty()) ds.extra_x = load_unlabeled_csv(o.extra, t.covariates);
    const AteEstimate e = estimate_ate(ds, o.alpha);
    const ReportFormat fmt = parse_report_format(o.format);

    emit(o.out, out, [&](std::ostream& os) {
        switch (fmt) {
        case ReportFormat::Text:
            os << "n_t = " << ds.y_t.size() << ", n_c = " << ds.y_c.size() << ", m = " << ds.extra_x.rows()
               << ", alpha = " << format_short(o.alpha) << '\n';
            os << "d_hat = " << format_short(e.d_hat) << "  V_hat^2 = " << format_short(e.v_hat2)
               << "  CI = [" << format_short(e.ci_lower) << ", " << format_short(e.ci_upper) << "]\n";
            os << "mse_t = " << format_short(e.fit_t.mse) << "  mse_c = " << format_short(e.fit_c.mse) << '\n';
            break;
        case ReportFormat::Csv:
            os << "d_hat,v_hat2,ci_lower,ci_upper,alpha,n_t,n_c,m,mse_t,mse_c\n"
               << format_full(e.d_hat) << ',' << format_full(e.v_hat2) << ',' << format_full(e.ci_lower)
               << ',' << format_full(e.ci_upper) << ',' << format_full(o.alpha) << ',' << ds.y_t.size()
               << ',' << ds.y_c.size() << ',' << ds.extra_x.rows() << ',' << format_full(e.fit_t.mse)
               << ',' << format_full(e.fit_c.mse) << '\n';
            break;
        case ReportFormat::Json: {
            nlohmann::ordered_json j = {{"d_hat", e.d_hat},        {"v_hat2", e.v_hat2},
                                        {"ci_lower", e.ci_lower},  {"ci_upper", e.ci_upper},
                                        {"alpha", o.alpha},        {"mu_hat", e.mu_hat},
                                        {"slopes_t", e.fit_t.beta2}, {"slopes_c", e.fit_c.beta2},
                                        {"mse_t", e.fit_t.mse},    {"mse_c", e.fit_c.mse}};
            os << j.dump(2) << '\n';
            break;
        }
        }
    });
    return kExitOk;
}

const CLI::Validator kOpenUnit(
    [](std::string& text) -> std::string {
        try {
            const double v = std::stod(text);
            if (v > 0.0 && v < 1.0) return {};
        } catch (const std::exception&) {
        }
        return "alpha must lie strictly between 0 and 1, got " + text;
    },
    "(0,1)");

const CLI::Validator kBasis(
    [](std::string& text) -> std::string {
        try {
            parse_basis(text);
        } catch (const Error& e) {
            return e.what();
        }
        return {};
    },
    "none|poly:D|trig:Q");

const CLI::Validator kFormat = CLI::IsMember({"text", "csv", "json"});

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Semi-supervised estimation of a population mean"};
    app.require_subcommand(1);

    EstimateOptions est;
    auto* estimate = app.add_subcommand("estimate", "Estimate the mean of a labeled CSV response");
    estimate->add_option("--labeled", est.labeled, "CSV with header; response plus covariates")->required();
    estimate->add_option("--response", est.response, "Response column name")->capture_default_str();
    estimate->add_option("--unlabeled", est.unlabeled, "CSV of covariate-only rows");
    estimate->add_option("--mu", est.mu, "Known covariate mean: \"v1,v2,...\" or a file holding it");
    estimate->add_option("--estimator", est.estimators, "mean, ls, ssls or all (comma separated)");
    estimate->add_option("--alpha", est.alpha, "1 - confidence level")->check(kOpenUnit)->capture_default_str();
    estimate->add_option("--basis", est.basis, "none, poly:D or trig:Q")->check(kBasis)->capture_default_str();
    estimate->add_flag("--truncate", est.truncate, "Clamp regression estimates to the response band");
    estimate->add_option("--out", est.out, "Output file (default stdout)");
    estimate->add_option("--format", est.format, "text, csv or json")->check(kFormat)->capture_default_str();

    SimulateOptions sim;
    auto* simulate = app.add_subcommand("simulate", "Monte Carlo study of the estimators");
    simulate->add_option("--setting", sim.setting, "gauss-quad, heavy-tail, poisson or gauss-linear")
        ->required()
        ->check(CLI::IsMember({"gauss-quad", "heavy-tail", "poisson", "gauss-linear"}));
    simulate->add_option("--n", sim.n, "Labeled sample size")->capture_default_str();
    simulate->add_option("--p", sim.p, "Covariate dimension")->capture_default_str();
    simulate->add_option("--m", sim.ms, "Unlabeled sizes, comma separated")->delimiter(',');
    simulate->add_option("--reps", sim.reps, "Replications")->capture_default_str();
    simulate->add_option("--seed", sim.seed, "Seed")->capture_default_str();
    simulate->add_option("--alpha", sim.alpha, "1 - confidence level")->check(kOpenUnit)->capture_default_str();
    simulate->add_option("--threads", sim.threads, "Worker threads")->capture_default_str();
    simulate->add_option("--tau2", sim.tau2, "Noise variance for gauss-linear")->capture_default_str();
    simulate->add_option("--basis", sim.basis, "Also run augmented estimators: poly:D or trig:Q")->check(kBasis);
    simulate->add_flag("--no-truncated", sim.no_truncated, "Skip the truncated variants");
    simulate->add_flag("--no-oracle", sim.no_oracle, "Skip the oracle estimators");
    simulate->add_option("--out", sim.out, "Output file (default stdout)");
    simulate->add_option("--format", sim.format, "text, csv or json")->check(kFormat)->capture_default_str();

    AteOptions ate;
    auto* ate_cmd = app.add_subcommand("ate", "Average treatment effect with covariate adjustment");
    ate_cmd->add_option("--treatment", ate.treatment, "Treatment arm CSV")->required();
    ate_cmd->add_option("--control", ate.control, "Control arm CSV")->required();
    ate_cmd->add_option("--extra", ate.extra, "Covariate-only rows from the same population");
    ate_cmd->add_option("--response", ate.response, "Response column name")->capture_default_str();
    ate_cmd->add_option("--alpha", ate.alpha, "1 - confidence level")->check(kOpenUnit)->capture_default_str();
    ate_cmd->add_option("--out", ate.out, "Output file (default stdout)");
    ate_cmd->add_option("--format", ate.format, "text, csv or json")->check(kFormat)->capture_default_str();

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << '\n';
        return kExitIo;
    }

    try {
        if (*estimate) return cmd_estimate(est, out);
        if (*simulate) return cmd_simulate(sim, out);
        if (*ate_cmd) return cmd_ate(ate, out);
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return e.is_io() ? kExitIo : kExitEstimation;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitIo;
    }
    return kExitIo;
}

}  // namespace ssmean::cli
