#pragma once

#include "ssmean/estimators.hpp"

namespace ssmean {

/// Randomized two-arm sample plus covariate-only rows from the same population.
struct AteDataset {
    Vector y_t;
    Matrix x_t;
    Vector y_c;
    Matrix x_c;
    Matrix extra_x;

    std::size_t p() const noexcept { return x_t.cols(); }
    void validate() const;
};

struct AteEstimate {
    double d_hat = 0.0;
    double v_hat2 = 0.0;
    double ci_lower = 0.0;
    double ci_upper = 0.0;
    double alpha = 0.05;
    RegressionFit fit_t;
    RegressionFit fit_c;
    Vector mu_hat;
    /// Pooled centered second-moment matrix of all covariate rows.
    Matrix sigma_x;
};

/// d_hat = (1, mu_hat)^T (beta_t - beta_c) with mu_hat pooled over every
/// covariate row; V_hat^2 = MSE_t/n_t + MSE_c/n_c + D^T Sigma_X D / N where D is
/// the slope difference and N = n_t + n_c + m. The CI half-width is
/// z * sqrt(V_hat^2).
AteEstimate estimate_ate(const AteDataset& ds, double alpha);

}  // namespace ssmean
