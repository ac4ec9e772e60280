#pragma once

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <utility>

#include "ssmean/linalg.hpp"

namespace ssmean {

/// Labeled rows (y, x), unlabeled covariate rows, and optionally the known
/// population covariate mean (the "ideal" setting).
struct Dataset {
    Vector y;
    Matrix x;
    Matrix x_unlabeled;
    std::optional<Vector> known_mu;

    std::size_t n() const noexcept { return y.size(); }
    std::size_t p() const noexcept { return x.cols(); }
    std::size_t m() const noexcept { return x_unlabeled.rows(); }

    /// Throws DimensionMismatch / InsufficientData / InvalidArgs on violated invariants.
    void validate() const;
};

enum class EstimatorKind { SampleMean, LS, SSLS, OracleIdeal, OracleSS };

std::string to_string(EstimatorKind kind);

struct RegressionFit {
    double beta1 = 0.0;
    Vector beta2;
    double mse = 0.0;
    double condition_estimate = 0.0;
};

struct MeanEstimate {
    EstimatorKind kind = EstimatorKind::SampleMean;
    double theta_hat = 0.0;
    /// Variance on the sqrt(n) scale: half-width is z * sqrt(variance_per_n / n).
    double variance_per_n = 0.0;
    std::size_t n = 0;
    double ci_lower = 0.0;
    double ci_upper = 0.0;
    double alpha = 0.05;
    bool truncated = false;
    std::optional<RegressionFit> fit;
    /// beta2^T (center - xbar): the shift applied to the sample mean.
    std::optional<double> adjustment;
    /// Basis label for augmented estimators, empty otherwise.
    std::string basis;

    double ci_length() const noexcept { return ci_upper - ci_lower; }
    bool covers(double theta) const noexcept { return ci_lower <= theta && theta <= ci_upper; }
};

/// Clamp band built from the range of the labeled responses.
struct TruncationBand {
    double lower = 0.0;
    double upper = 0.0;
    double center = 0.0;
    double half_width = 0.0;

    static TruncationBand from_responses(std::span<const double> y);

    /// Returns the clamped value and whether clamping happened.
    std::pair<double, bool> apply(double x) const noexcept;
};

std::pair<double, bool> truncate_to_band(double x, std::span<const double> y);

/// Everything the regression-based estimators need from the labeled sample.
/// Computing it once lets several estimators share one least-squares fit.
struct LabeledSummary {
    std::size_t n = 0;
    std::size_t p = 0;
    double ybar = 0.0;
    double sigma2_y = 0.0;
    Vector xbar;
    Vector x_sum;
    RegressionFit fit;
    TruncationBand band;
};

/// Fits OLS of y on (1, x). Throws InsufficientData when n < p + 2 and
/// RankDeficient when the design is numerically singular.
LabeledSummary summarize(std::span<const double> y, const Matrix& x);

/// ybar - beta2^T (xbar - center); the shared point formula of LS and SSLS.
double adjusted_mean(const LabeledSummary& s, std::span<const double> center);

/// Pooled covariate mean over labeled and unlabeled rows.
Vector pooled_mean(const LabeledSummary& s, const Matrix& x_unlabeled);

MeanEstimate ls_from_summary(const LabeledSummary& s, std::span<const double> mu, double alpha,
                             bool truncate);
MeanEstimate ssls_from_summary(const LabeledSummary& s, std::span<const double> mu_hat,
                               std::size_t m, double alpha, bool truncate);
MeanEstimate sample_mean_from_summary(const LabeledSummary& s, double alpha);

MeanEstimate estimate_sample_mean(const Dataset& ds, double alpha);
MeanEstimate estimate_ls(const Dataset& ds, double alpha, bool truncate = false);
MeanEstimate estimate_ssls(const Dataset& ds, double alpha, bool truncate = false);

using ResponseSurface = std::function<double(std::span<const double>)>;

/// Ideal oracle: mean of y - xi0(x) plus the supplied E xi0(X).
MeanEstimate estimate_oracle(const Dataset& ds, const ResponseSurface& xi0, double e_xi0,
                             double alpha);

/// Semi-supervised oracle: E xi0(X) replaced by its pooled average over n + m rows.
MeanEstimate estimate_oracle_ss(const Dataset& ds, const ResponseSurface& xi0, double alpha);

/// Same estimator from precomputed surface values at the labeled and
/// unlabeled rows.
MeanEstimate oracle_ss_from_surface(std::span<const double> y,
                                    std::span<const double> surface_labeled,
                                    std::span<const double> surface_unlabeled, double alpha);

struct GaussianRisk {
    double ls = 0.0;
    double ssls = 0.0;
};

/// n * E(theta_hat - theta)^2 under a Gaussian linear model; m == nullopt
/// means infinitely many unlabeled rows.
GaussianRisk gaussian_exact_risk(std::size_t n, std::size_t p, std::optional<std::size_t> m,
                                 double tau2, double slope_quadform);

}  // namespace ssmean
