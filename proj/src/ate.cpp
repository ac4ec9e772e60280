#include "ssmean/ate.hpp"

#include <cmath>
#include <string>

#include "ssmean/error.hpp"
#include "ssmean/normal.hpp"

namespace ssmean {

void AteDataset::validate() const {
    const std::size_t p = x_t.cols();
    if (x_c.cols() != p || (extra_x.rows() > 0 && extra_x.cols() != p)) {
        throw Error(ErrorCode::DimensionMismatch, "treatment, control and extra covariates differ in width");
    }
    if (y_t.size() != x_t.rows() || y_c.size() != x_c.rows()) {
        throw Error(ErrorCode::DimensionMismatch, "response and covariate row counts differ");
    }
    if (y_t.size() < p + 2 || y_c.size() < p + 2) {
        throw Error(ErrorCode::InsufficientData, "each arm needs at least p + 2 = " +
                                                     std::to_string(p + 2) + " labeled rows");
    }
}

AteEstimate estimate_ate(const AteDataset& ds, double alpha) {
    ds.validate();
    const double z = z_two_sided(alpha);
    const std::size_t p = ds.p();
    const std::size_t n_t = ds.y_t.size();
    const std::size_t n_c = ds.y_c.size();
    const std::size_t m = ds.extra_x.rows();
    const double total = static_cast<double>(n_t + n_c + m);

    const LabeledSummary st = summarize(ds.y_t, ds.x_t);
    const LabeledSummary sc = summarize(ds.y_c, ds.x_c);

    AteEstimate out;
    out.alpha = alpha;
    out.fit_t = st.fit;
    out.fit_c = sc.fit;
    out.mu_hat.assign(p, 0.0);
    const Vector extra_sum = column_sums(ds.extra_x);
    for (std::size_t j = 0; j < p; ++j) {
        out.mu_hat[j] = (st.x_sum[j] + sc.x_sum[j] + (m > 0 ? extra_sum[j] : 0.0)) / total;
    }

    Vector slope_diff(p);
    for (std::size_t j = 0; j < p; ++j) slope_diff[j] = st.fit.beta2[j] - sc.fit.beta2[j];
    out.d_hat = (st.fit.beta1 - sc.fit.beta1) + dot(out.mu_hat, slope_diff);

    // Sum of the three blocks' centered outer products, divided by N.
    out.sigma_x = Matrix(p, p);
    for (const Matrix* block : {&ds.x_t, &ds.x_c, &ds.extra_x}) {
        if (block->rows() == 0) continue;
        const Matrix c = sample_cov(*block, out.mu_hat);
        const double w = static_cast<double>(block->rows()) / total;
        for (std::size_t i = 0; i < p; ++i) {
            for (std::size_t j = 0; j < p; ++j) out.sigma_x(i, j) += w * c(i, j);
        }
    }

    out.v_hat2 = st.fit.mse / static_cast<double>(n_t) + sc.fit.mse / static_cast<double>(n_c) +
                 quadratic_form(out.sigma_x, slope_diff) / total;
    const double half = z * std::sqrt(out.v_hat2);
    out.ci_lower = out.d_hat - half;
    out.ci_upper = out.d_hat + half;
    return out;
}

}  // namespace ssmean
