#include "ssmean/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "ssmean/error.hpp"
#include "ssmean/normal.hpp"

namespace ssmean {

namespace {

MeanEstimate with_interval(MeanEstimate e, double alpha) {
    const double z = z_two_sided(alpha);
    const double half = z * std::sqrt(e.variance_per_n / static_cast<double>(e.n));
    e.alpha = alpha;
    e.ci_lower = e.theta_hat - half;
    e.ci_upper = e.theta_hat + half;
    return e;
}

void require_labeled(const Dataset& ds, std::size_t min_n, const char* what) {
    ds.validate();
    if (ds.n() < min_n) {
        throw Error(ErrorCode::InsufficientData, std::string(what) + " needs n >= " +
                                                     std::to_string(min_n) + ", got " +
                                                     std::to_string(ds.n()));
    }
}

}  // namespace

void Dataset::validate() const {
    if (y.empty()) throw Error(ErrorCode::InsufficientData, "dataset has no labeled rows");
    if (x.rows() != y.size()) {
        throw Error(ErrorCode::DimensionMismatch, "response has " + std::to_string(y.size()) +
                                                      " rows, covariates have " +
                                                      std::to_string(x.rows()));
    }
    if (x_unlabeled.rows() > 0 && x_unlabeled.cols() != x.cols()) {
        throw Error(ErrorCode::DimensionMismatch,
                    "unlabeled rows have " + std::to_string(x_unlabeled.cols()) +
                        " columns, labeled rows have " + std::to_string(x.cols()));
    }
    if (known_mu && known_mu->size() != x.cols()) {
        throw Error(ErrorCode::DimensionMismatch, "known mean has length " +
                                                      std::to_string(known_mu->size()) +
                                                      ", expected " + std::to_string(x.cols()));
    }
    const bool finite =
        std::all_of(y.begin(), y.end(), [](double v) { return std::isfinite(v); }) &&
        x.all_finite() && x_unlabeled.all_finite() &&
        (!known_mu ||
         std::all_of(known_mu->begin(), known_mu->end(), [](double v) { return std::isfinite(v); }));
    if (!finite) throw Error(ErrorCode::InvalidArgs, "dataset contains non-finite values");
}

std::string to_string(EstimatorKind kind) {
    switch (kind) {
    case EstimatorKind::SampleMean: return "mean";
    case EstimatorKind::LS: return "ls";
    case EstimatorKind::SSLS: return "ssls";
    case EstimatorKind::OracleIdeal: return "oracle";
    case EstimatorKind::OracleSS: return "oracle_ss";
    }
    return "unknown";
}

TruncationBand TruncationBand::from_responses(std::span<const double> y) {
    const auto [lo, hi] = std::minmax_element(y.begin(), y.end());
    const double n = static_cast<double>(y.size());
    TruncationBand b;
    b.lower = (n + 1.0) * *lo - n * *hi;
    b.upper = (n + 1.0) * *hi - n * *lo;
    b.center = (*hi + *lo) / 2.0;
    b.half_width = (n + 0.5) * (*hi - *lo);
    return b;
}

std::pair<double, bool> TruncationBand::apply(double x) const noexcept {
    if (x > upper) return {upper, true};
    if (x < lower) return {lower, true};
    return {x, false};
}

std::pair<double, bool> truncate_to_band(double x, std::span<const double> y) {
    if (y.empty()) throw Error(ErrorCode::InsufficientData, "truncation needs at least one response");
    return TruncationBand::from_responses(y).apply(x);
}

LabeledSummary summarize(std::span<const double> y, const Matrix& x) {
    const std::size_t n = y.size();
    const std::size_t p = x.cols();
    if (x.rows() != n) {
        throw Error(ErrorCode::DimensionMismatch, "response and covariate row counts differ");
    }
    if (n < p + 2) {
        throw Error(ErrorCode::InsufficientData, "least squares needs n >= p + 2 (n=" +
                                                     std::to_string(n) + ", p=" + std::to_string(p) +
                                                     ")");
    }
    const OlsSolution sol = ols_solve(build_design(x), y);
    if (!sol.rank_ok) {
        throw Error(ErrorCode::RankDeficient,
                    "design is numerically singular (condition estimate " +
                        std::to_string(sol.condition_estimate) + ")");
    }

    LabeledSummary s;
    s.n = n;
    s.p = p;
    s.ybar = mean(y);
    s.sigma2_y = sample_variance(y);
    s.x_sum = column_sums(x);
    s.xbar = s.x_sum;
    for (double& v : s.xbar) v /= static_cast<double>(n);
    s.fit.beta1 = sol.beta[0];
    s.fit.beta2.assign(sol.beta.begin() + 1, sol.beta.end());
    double rss = 0.0;
    for (double r : sol.residuals) rss += r * r;
    s.fit.mse = rss / static_cast<double>(n - p - 1);
    s.fit.condition_estimate = sol.condition_estimate;
    s.band = TruncationBand::from_responses(y);
    return s;
}

double adjusted_mean(const LabeledSummary& s, std::span<const double> center) {
    double shift = 0.0;
    for (std::size_t j = 0; j < s.p; ++j) shift += s.fit.beta2[j] * (s.xbar[j] - center[j]);
    return s.ybar - shift;
}

Vector pooled_mean(const LabeledSummary& s, const Matrix& x_unlabeled) {
    Vector mu = s.x_sum;
    for (std::size_t k = 0; k < x_unlabeled.rows(); ++k) {
        auto r = x_unlabeled.row(k);
        for (std::size_t j = 0; j < mu.size(); ++j) mu[j] += r[j];
    }
    const double total = static_cast<double>(s.n + x_unlabeled.rows());
    for (double& v : mu) v /= total;
    return mu;
}

namespace {

MeanEstimate regression_estimate(const LabeledSummary& s, EstimatorKind kind,
                                 std::span<const double> center, double variance, double alpha,
                                 bool truncate) {
    MeanEstimate e;
    e.kind = kind;
    e.n = s.n;
    e.theta_hat = adjusted_mean(s, center);
    e.adjustment = e.theta_hat - s.ybar;
    if (truncate) {
        const auto [value, clamped] = s.band.apply(e.theta_hat);
        e.theta_hat = value;
        e.truncated = clamped;
    }
    e.variance_per_n = variance;
    e.fit = s.fit;
    return with_interval(std::move(e), alpha);
}

}  // namespace

MeanEstimate ls_from_summary(const LabeledSummary& s, std::span<const double> mu, double alpha,
                             bool truncate) {
    if (mu.size() != s.p) {
        throw Error(ErrorCode::DimensionMismatch, "known mean has length " +
                                                      std::to_string(mu.size()) + ", expected " +
                                                      std::to_string(s.p));
    }
    return regression_estimate(s, EstimatorKind::LS, mu, s.fit.mse, alpha, truncate);
}

MeanEstimate ssls_from_summary(const LabeledSummary& s, std::span<const double> mu_hat,
                               std::size_t m, double alpha, bool truncate) {
    const double total = static_cast<double>(s.n + m);
    const double nu2 = (static_cast<double>(m) / total) * s.fit.mse +
                       (static_cast<double>(s.n) / total) * s.sigma2_y;
    return regression_estimate(s, EstimatorKind::SSLS, mu_hat, nu2, alpha, truncate);
}

MeanEstimate sample_mean_from_summary(const LabeledSummary& s, double alpha) {
    MeanEstimate e;
    e.kind = EstimatorKind::SampleMean;
    e.n = s.n;
    e.theta_hat = s.ybar;
    e.variance_per_n = s.sigma2_y;
    return with_interval(std::move(e), alpha);
}

MeanEstimate estimate_sample_mean(const Dataset& ds, double alpha) {
    require_labeled(ds, 2, "sample mean interval");
    MeanEstimate e;
    e.kind = EstimatorKind::SampleMean;
    e.n = ds.n();
    e.theta_hat = mean(ds.y);
    e.variance_per_n = sample_variance(ds.y);
    return with_interval(std::move(e), alpha);
}

MeanEstimate estimate_ls(const Dataset& ds, double alpha, bool truncate) {
    ds.validate();
    if (!ds.known_mu) {
        throw Error(ErrorCode::MissingMu, "the least squares estimator needs the population covariate mean");
    }
    const LabeledSummary s = summarize(ds.y, ds.x);
    return ls_from_summary(s, *ds.known_mu, alpha, truncate);
}

MeanEstimate estimate_ssls(const Dataset& ds, double alpha, bool truncate) {
    ds.validate();
    const LabeledSummary s = summarize(ds.y, ds.x);
    const Vector mu_hat = pooled_mean(s, ds.x_unlabeled);
    return ssls_from_summary(s, mu_hat, ds.m(), alpha, truncate);
}

MeanEstimate estimate_oracle(const Dataset& ds, const ResponseSurface& xi0, double e_xi0,
                             double alpha) {
    require_labeled(ds, 2, "oracle estimator");
    Vector centered(ds.n());
    for (std::size_t k = 0; k < ds.n(); ++k) centered[k] = ds.y[k] - xi0(ds.x.row(k));
    MeanEstimate e;
    e.kind = EstimatorKind::OracleIdeal;
    e.n = ds.n();
    e.theta_hat = mean(centered) + e_xi0;
    e.variance_per_n = sample_variance(centered);
    return with_interval(std::move(e), alpha);
}

MeanEstimate oracle_ss_from_surface(std::span<const double> y,
                                    std::span<const double> surface_labeled,
                                    std::span<const double> surface_unlabeled, double alpha) {
    const std::size_t n = y.size();
    const std::size_t m = surface_unlabeled.size();
    if (surface_labeled.size() != n) {
        throw Error(ErrorCode::DimensionMismatch, "one surface value per labeled row expected");
    }
    if (n < 2) throw Error(ErrorCode::InsufficientData, "semi-supervised oracle needs n >= 2");
    Vector centered(n);
    Vector pooled(n + m);
    for (std::size_t k = 0; k < n; ++k) {
        centered[k] = y[k] - surface_labeled[k];
        pooled[k] = surface_labeled[k];
    }
    std::copy(surface_unlabeled.begin(), surface_unlabeled.end(), pooled.begin() + static_cast<std::ptrdiff_t>(n));

    MeanEstimate e;
    e.kind = EstimatorKind::OracleSS;
    e.n = n;
    e.theta_hat = mean(y) - mean(surface_labeled) + mean(pooled);
    e.variance_per_n = sample_variance(centered) +
                       (static_cast<double>(n) / static_cast<double>(n + m)) * sample_variance(pooled);
    return with_interval(std::move(e), alpha);
}

MeanEstimate estimate_oracle_ss(const Dataset& ds, const ResponseSurface& xi0, double alpha) {
    require_labeled(ds, 2, "semi-supervised oracle estimator");
    Vector labeled(ds.n());
    Vector unlabeled(ds.m());
    for (std::size_t k = 0; k < ds.n(); ++k) labeled[k] = xi0(ds.x.row(k));
    for (std::size_t k = 0; k < ds.m(); ++k) unlabeled[k] = xi0(ds.x_unlabeled.row(k));
    return oracle_ss_from_surface(ds.y, labeled, unlabeled, alpha);
}

GaussianRisk gaussian_exact_risk(std::size_t n, std::size_t p, std::optional<std::size_t> m,
                                 double tau2, double slope_quadform) {
    if (n <= p + 2) {
        throw Error(ErrorCode::InvalidArgs, "exact Gaussian risk needs n > p + 2");
    }
    if (tau2 < 0.0 || slope_quadform < 0.0) {
        throw Error(ErrorCode::InvalidArgs, "variances must be nonnegative");
    }
    const double excess = static_cast<double>(p) * tau2 / static_cast<double>(n - p - 2);
    GaussianRisk r;
    r.ls = tau2 + excess;
    if (!m) {
        r.ssls = r.ls;
        return r;
    }
    const double total = static_cast<double>(n + *m);
    const double w_unlabeled = static_cast<double>(*m) / total;
    const double w_labeled = static_cast<double>(n) / total;
    r.ssls = tau2 + w_unlabeled * excess + w_labeled * slope_quadform;
    return r;
}

}  // namespace ssmean
