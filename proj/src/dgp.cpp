#include "ssmean/dgp.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>

#include "ssmean/error.hpp"

namespace ssmean {

namespace p3 {

namespace {

constexpr double kTableEdge = 1000.0;
constexpr std::size_t kTableSize = 4096;

// Integral of 1 / (1 + x^3) over [0, t].
double half_integral(double t) {
    const double s3 = std::sqrt(3.0);
    return std::log((1.0 + t) * (1.0 + t) / (t * t - t + 1.0)) / 6.0 +
           (std::atan((2.0 * t - 1.0) / s3) + std::numbers::pi / 6.0) / s3;
}

// P(|X| > t).
double survival(double t) {
    if (t > kTableEdge) {
        // Two-term tail expansion of the integral of x^-3 (1 - x^-3 + ...).
        const double t2 = t * t;
        return (2.0 / normalizer()) * (1.0 / (2.0 * t2) - 1.0 / (5.0 * t2 * t2 * t));
    }
    return 1.0 - 2.0 * half_integral(t) / normalizer();
}

struct SurvivalTable {
    std::array<double, kTableSize> t{};
    std::array<double, kTableSize> s{};

    SurvivalTable() {
        // Grid dense near zero, spread out towards the edge.
        const double top = std::asinh(kTableEdge);
        for (std::size_t i = 0; i < kTableSize; ++i) {
            t[i] = std::sinh(top * static_cast<double>(i) / static_cast<double>(kTableSize - 1));
            s[i] = survival(t[i]);
        }
        t.back() = kTableEdge;
        s.front() = 1.0;
    }
};

const SurvivalTable& table() {
    static const SurvivalTable tab;
    return tab;
}

// Solves P(|X| > t) = v for t.
double magnitude_for_survival(double v) {
    const SurvivalTable& tab = table();
    if (v <= tab.s.back()) {
        // Pareto-type tail: survival ~ 1 / (C t^2).
        double t = 1.0 / std::sqrt(normalizer() * v);
        for (int it = 0; it < 3; ++it) {
            const double f = survival(t) - v;
            t += f * normalizer() * (1.0 + t * t * t) / 2.0;
        }
        return t;
    }
    // s is decreasing in t; bracket s[lo] >= v > s[lo + 1].
    const auto it = std::lower_bound(tab.s.rbegin(), tab.s.rend(), v);
    const std::size_t lo = static_cast<std::size_t>(tab.s.rend() - it) - 1;
    const std::size_t hi = std::min(lo + 1, kTableSize - 1);
    double t = tab.t[lo];
    if (hi != lo && tab.s[lo] != tab.s[hi]) {
        const double w = (tab.s[lo] - v) / (tab.s[lo] - tab.s[hi]);
        t = tab.t[lo] + w * (tab.t[hi] - tab.t[lo]);
    }
    for (int step = 0; step < 3; ++step) {
        const double f = survival(t) - v;
        t += f * normalizer() * (1.0 + t * t * t) / 2.0;
        t = std::max(t, 0.0);
    }
    return t;
}

}  // namespace

double normalizer() { return 4.0 * std::numbers::pi / (3.0 * std::sqrt(3.0)); }

double density(double x) {
    const double a = std::abs(x);
    return 1.0 / (normalizer() * (1.0 + a * a * a));
}

double cdf(double x) {
    const double tail = 0.5 * survival(std::abs(x));
    return x < 0 ? tail : 1.0 - tail;
}

double quantile(double u) {
    if (!(u > 0.0 && u < 1.0)) throw Error(ErrorCode::InvalidArgs, "P3 quantile needs u in (0,1)");
    if (u < 0.5) return -magnitude_for_survival(2.0 * u);
    return magnitude_for_survival(2.0 * (1.0 - u));
}

double sample(RngStream& rng) { return quantile(rng.uniform()); }

}  // namespace p3

std::string to_string(DgpId id) {
    switch (id) {
    case DgpId::GaussQuad: return "gauss-quad";
    case DgpId::HeavyTail: return "heavy-tail";
    case DgpId::PoissonChain: return "poisson";
    case DgpId::GaussLinear: return "gauss-linear";
    }
    return "unknown";
}

DgpId parse_dgp(std::string_view name) {
    if (name == "gauss-quad") return DgpId::GaussQuad;
    if (name == "heavy-tail") return DgpId::HeavyTail;
    if (name == "poisson") return DgpId::PoissonChain;
    if (name == "gauss-linear") return DgpId::GaussLinear;
    throw Error(ErrorCode::InvalidSpec, "unknown setting '" + std::string(name) + "'");
}

Dgp::Dgp(DgpSpec spec) : spec_(spec) {
    const std::size_t p = spec_.p;
    if (p == 0 || spec_.n == 0) throw Error(ErrorCode::InvalidSpec, "n and p must be positive");
    if (spec_.id == DgpId::GaussLinear && spec_.tau2 < 0.0) {
        throw Error(ErrorCode::InvalidSpec, "tau2 must be nonnegative");
    }
    const double pd = static_cast<double>(p);
    mu_.assign(p, 0.0);

    switch (spec_.id) {
    case DgpId::GaussQuad: {
        RngStream rng = rng_stream(spec_.seed, 0);
        for (double& v : mu_) v = rng.normal();
        beta_.resize(p + 1);
        for (double& v : beta_) v = rng.normal();
        Matrix sigma(p, p, 1.0 / (2.0 * pd));
        for (std::size_t i = 0; i < p; ++i) sigma(i, i) = 1.0;
        chol_ = cholesky(sigma);

        const std::span<const double> slopes(beta_.data() + 1, p);
        const double mu_sq = dot(mu_, mu_);
        theta_ = mu_sq + beta_[0] + dot(mu_, slopes);
        oracle_variance_ = 2.0 * (mu_sq + pd) / pd;
        double trace_sq = 0.0;
        for (double v : sigma.data()) trace_sq += v * v;
        Vector lin(p);
        for (std::size_t j = 0; j < p; ++j) lin[j] = 2.0 * mu_[j] + slopes[j];
        response_variance_ = oracle_variance_ + 2.0 * trace_sq + quadratic_form(sigma, lin);
        break;
    }
    case DgpId::HeavyTail:
        theta_ = 0.0;
        oracle_variance_ = std::numeric_limits<double>::infinity();
        response_variance_ = std::numeric_limits<double>::infinity();
        break;
    case DgpId::PoissonChain:
        std::fill(mu_.begin(), mu_.end(), 10.0);
        theta_ = 100.0;
        oracle_variance_ = 100.0;
        response_variance_ = 1100.0;
        break;
    case DgpId::GaussLinear:
        beta_.assign(p + 1, spec_.slope);
        beta_[0] = spec_.intercept;
        theta_ = spec_.intercept;
        oracle_variance_ = spec_.tau2;
        response_variance_ = spec_.tau2 + pd * spec_.slope * spec_.slope;
        break;
    }
}

double Dgp::surface(std::span<const double> x) const {
    switch (spec_.id) {
    case DgpId::GaussQuad: {
        const double norm2 = dot(x, x);
        return norm2 - static_cast<double>(spec_.p) + beta_[0] +
               dot(x, std::span<const double>(beta_.data() + 1, spec_.p));
    }
    case DgpId::HeavyTail: {
        double s = 0.0;
        for (double v : x) s += std::sin(v) + v;
        return s;
    }
    case DgpId::PoissonChain: return 10.0 * x[0];
    case DgpId::GaussLinear:
        return beta_[0] + dot(x, std::span<const double>(beta_.data() + 1, spec_.p));
    }
    return 0.0;
}

void Dgp::fill_row(RngStream& rng, std::span<double> x) const {
    const std::size_t p = spec_.p;
    switch (spec_.id) {
    case DgpId::GaussQuad: {
        thread_local Vector z;
        z.resize(p);
        for (double& v : z) v = rng.normal();
        for (std::size_t i = 0; i < p; ++i) {
            double s = mu_[i];
            for (std::size_t k = 0; k <= i; ++k) s += chol_(i, k) * z[k];
            x[i] = s;
        }
        break;
    }
    case DgpId::HeavyTail:
        for (double& v : x) v = p3::sample(rng);
        break;
    case DgpId::PoissonChain:
        for (double& v : x) v = static_cast<double>(rng.poisson(10.0));
        break;
    case DgpId::GaussLinear:
        for (double& v : x) v = rng.normal();
        break;
    }
}

double Dgp::response(RngStream& rng, std::span<const double> x) const {
    switch (spec_.id) {
    case DgpId::GaussQuad: {
        const double sd = std::sqrt(2.0 * dot(x, x) / static_cast<double>(spec_.p));
        return surface(x) + sd * rng.normal();
    }
    case DgpId::HeavyTail: return surface(x) + 0.5 * p3::sample(rng);
    case DgpId::PoissonChain: return static_cast<double>(rng.poisson(10.0 * x[0]));
    case DgpId::GaussLinear: return surface(x) + std::sqrt(spec_.tau2) * rng.normal();
    }
    return 0.0;
}

Dataset Dgp::draw(std::uint64_t rep_index) const {
    RngStream rng = rng_stream(spec_.seed, rep_index + 1);
    Dataset ds;
    ds.x = Matrix(spec_.n, spec_.p);
    ds.y.resize(spec_.n);
    for (std::size_t k = 0; k < spec_.n; ++k) {
        fill_row(rng, ds.x.row(k));
        ds.y[k] = response(rng, ds.x.row(k));
    }
    ds.x_unlabeled = Matrix(spec_.m, spec_.p);
    for (std::size_t k = 0; k < spec_.m; ++k) fill_row(rng, ds.x_unlabeled.row(k));
    ds.known_mu = mu_;
    return ds;
}

std::optional<GaussianRisk> Dgp::exact_risk(std::optional<std::size_t> m) const {
    if (spec_.id != DgpId::GaussLinear || spec_.n <= spec_.p + 2) return std::nullopt;
    const double slope_quadform = static_cast<double>(spec_.p) * spec_.slope * spec_.slope;
    return gaussian_exact_risk(spec_.n, spec_.p, m, spec_.tau2, slope_quadform);
}

std::optional<Vector> Dgp::polynomial_means(std::size_t degree) const {
    if (spec_.id != DgpId::GaussQuad && spec_.id != DgpId::GaussLinear) return std::nullopt;
    const std::size_t p = spec_.p;
    // Both Gaussian settings have unit marginal variances.
    Vector out(p * (degree >= 2 ? degree - 1 : 0));
    for (std::size_t j = 0; j < p; ++j) {
        double prev = 1.0;
        double cur = mu_[j];
        for (std::size_t d = 2; d <= degree; ++d) {
            const double next = mu_[j] * cur + static_cast<double>(d - 1) * prev;
            prev = cur;
            cur = next;
            out[(d - 2) * p + j] = cur;
        }
    }
    return out;
}

}  // namespace ssmean
