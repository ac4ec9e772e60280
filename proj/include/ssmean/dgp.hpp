#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include "ssmean/basis.hpp"
#include "ssmean/estimators.hpp"
#include "ssmean/rng.hpp"

namespace ssmean {

/// Heavy-tailed law with density proportional to 1 / (1 + |x|^3).
namespace p3 {

/// Integral of 1 / (1 + |x|^3) over the real line, 4 pi / (3 sqrt 3).
double normalizer();
double density(double x);
double cdf(double x);
/// Inverse CDF; |error| of cdf(quantile(u)) - u is far below 1e-6.
double quantile(double u);
double sample(RngStream& rng);

}  // namespace p3

enum class DgpId { GaussQuad, HeavyTail, PoissonChain, GaussLinear };

std::string to_string(DgpId id);
/// Accepts the CLI names gauss-quad, heavy-tail, poisson, gauss-linear.
DgpId parse_dgp(std::string_view name);

struct DgpSpec {
    DgpId id = DgpId::GaussLinear;
    std::size_t n = 100;
    std::size_t p = 1;
    /// Unlabeled rows drawn per replication.
    std::size_t m = 0;
    std::uint64_t seed = 1;
    /// GaussLinear only: noise variance, intercept and common slope.
    double tau2 = 1.0;
    double intercept = 1.0;
    double slope = 1.0;
};

/// A data-generating process with its structural parameters frozen from
/// stream 0 of the seed. Replication k draws from stream k + 1.
class Dgp {
public:
    explicit Dgp(DgpSpec spec);

    const DgpSpec& spec() const noexcept { return spec_; }

    /// Labeled n rows, m unlabeled rows, known covariate mean attached.
    Dataset draw(std::uint64_t rep_index) const;

    double theta() const noexcept { return theta_; }
    const Vector& mu() const noexcept { return mu_; }
    /// E(Y | X = x).
    double surface(std::span<const double> x) const;
    double surface_mean() const noexcept { return theta_; }
    /// sigma^2 = E Var(Y | X); infinite for HeavyTail.
    double oracle_variance() const noexcept { return oracle_variance_; }
    /// Var(Y), i.e. n Var(Ybar); infinite for HeavyTail.
    double response_variance() const noexcept { return response_variance_; }
    /// Var(xi(X)).
    double surface_variance() const noexcept { return response_variance_ - oracle_variance_; }

    /// GaussLinear: tau^2 and beta_(2)^T Sigma beta_(2) of the linear model.
    std::optional<GaussianRisk> exact_risk(std::optional<std::size_t> m) const;

    /// Population means of the Polynomial basis columns, when the covariates
    /// are Gaussian.
    std::optional<Vector> polynomial_means(std::size_t degree) const;

private:
    void fill_row(RngStream& rng, std::span<double> x) const;
    double response(RngStream& rng, std::span<const double> x) const;

    DgpSpec spec_;
    Vector mu_;
    Matrix chol_;
    Vector beta_;
    double theta_ = 0.0;
    double oracle_variance_ = 0.0;
    double response_variance_ = 0.0;
};

}  // namespace ssmean
