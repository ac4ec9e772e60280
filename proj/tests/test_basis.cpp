#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "ssmean/basis.hpp"
#include "ssmean/dgp.hpp"
#include "ssmean/error.hpp"
#include "test_support.hpp"

using namespace ssmean;

namespace {

struct PairedRisk {
    double base = 0.0;
    double augmented = 0.0;
    double diff_se = 0.0;
};

// Risk of LS and basis-augmented LS on the same draws.
PairedRisk paired_ls_risk(const DgpSpec& spec, const BasisSpec& basis, std::size_t reps) {
    const Dgp dgp(spec);
    std::vector<double> d(reps);
    PairedRisk out;
    for (std::size_t r = 0; r < reps; ++r) {
        const Dataset ds = dgp.draw(r);
        const double a = estimate_ls(ds, 0.05, false).theta_hat - dgp.theta();
        const double b = estimate_ls_augmented(ds, basis, 0.05).theta_hat - dgp.theta();
        out.base += a * a;
        out.augmented += b * b;
        d[r] = a * a - b * b;
    }
    out.base /= static_cast<double>(reps);
    out.augmented /= static_cast<double>(reps);
    out.diff_se = std::sqrt(sample_variance(d) / static_cast<double>(reps));
    return out;
}

}  // namespace

TEST_CASE("identity augmentation") {
    Dataset ds;
    ds.y = {1, 2, 3, 4};
    ds.x = Matrix{{0}, {1}, {2}, {5}};
    ds.known_mu = Vector{1};
    const Dataset out = augment(ds, BasisSpec::none());
    CHECK(out.x == ds.x);
    CHECK(out.known_mu == ds.known_mu);
    CHECK(out.y == ds.y);
    const Dataset poly1 = augment(ds, BasisSpec::polynomial(1));
    CHECK(poly1.x == ds.x);
}

TEST_CASE("polynomial squares") {
    Dataset ds;
    ds.y = {1, 2, 3, 4};
    ds.x = Matrix{{0}, {1}, {2}, {3}};
    const Dataset out = augment(ds, BasisSpec::polynomial(2));
    REQUIRE(out.p() == 2);
    CHECK(out.x(0, 1) == 0.0);
    CHECK(out.x(1, 1) == 1.0);
    CHECK(out.x(2, 1) == 4.0);
    CHECK(out.x(3, 1) == 9.0);
    CHECK_FALSE(out.known_mu.has_value());
}

TEST_CASE("trig on pooled ranks matches a direct rank computation") {
    Dataset ds;
    ds.y = {1, 2, 3, 4, 5, 6};
    ds.x = Matrix{{0.4}, {-1.0}, {2.5}, {0.1}, {7.0}, {-3.0}};
    ds.x_unlabeled = Matrix{{0.2}, {5.0}};
    const Dataset out = augment(ds, BasisSpec::trig_on_rank(2));
    REQUIRE(out.p() == 3);
    const std::vector<double> pooled{0.4, -1.0, 2.5, 0.1, 7.0, -3.0, 0.2, 5.0};
    const double big_n = 8.0;
    for (std::size_t k = 0; k < pooled.size(); ++k) {
        int rank = 1;
        for (double v : pooled) rank += v < pooled[k] ? 1 : 0;
        const double z = rank / big_n - (big_n + 1) / (2 * big_n);
        const double c = std::sqrt(2.0) * std::cos(2 * std::numbers::pi * z);
        const double s = std::sqrt(2.0) * std::sin(2 * std::numbers::pi * z);
        const auto row = k < 6 ? out.x.row(k) : out.x_unlabeled.row(k - 6);
        CHECK(row[1] == doctest::Approx(c).epsilon(1e-14));
        CHECK(row[2] == doctest::Approx(s).epsilon(1e-14));
    }
}

TEST_CASE("rank transform averages ties") {
    const Vector z = pooled_rank_transform(Vector{3, 1, 3, 2});
    // Ranks 4 and 3 share 3.5; N = 4, offset 5/8.
    CHECK(z[0] == doctest::Approx(3.5 / 4 - 5.0 / 8));
    CHECK(z[2] == z[0]);
    CHECK(z[1] == doctest::Approx(1.0 / 4 - 5.0 / 8));
    CHECK(z[3] == doctest::Approx(2.0 / 4 - 5.0 / 8));
}

TEST_CASE("trig columns are bounded and extend a known mean with zeros") {
    std::mt19937_64 gen(3);
    Dataset ds;
    ds.x = testing_support::random_matrix(gen, 60, 2);
    ds.x_unlabeled = testing_support::random_matrix(gen, 40, 2);
    ds.y = testing_support::random_vector(gen, 60);
    ds.known_mu = Vector{0, 0};
    const Dataset out = augment(ds, BasisSpec::trig_on_rank(4));
    CHECK(out.p() == 10);
    CHECK(out.n() == ds.n());
    CHECK(out.m() == ds.m());
    for (std::size_t i = 0; i < out.n(); ++i)
        for (std::size_t j = 2; j < 10; ++j) CHECK(std::abs(out.x(i, j)) <= std::sqrt(2.0) + 1e-15);
    REQUIRE(out.known_mu);
    CHECK(out.known_mu->size() == 10);
    CHECK((*out.known_mu)[9] == 0.0);
}

TEST_CASE("default q") {
    CHECK(default_q(100) == 4);
    CHECK(default_q(8) == 2);
    CHECK(default_q(1000) == 10);
    CHECK(default_q(999) == 9);
    CHECK(default_q(5, 2) == 1);
}

TEST_CASE("overflow and spec errors") {
    Dataset ds;
    ds.y = {1, 2, 3, 4};
    ds.x = Matrix{{0}, {1}, {2}, {3}};
    try {
        augment(ds, BasisSpec::polynomial(3));
        FAIL("expected overflow");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::DimensionOverflow);
    }
    BasisSpec bad = BasisSpec::polynomial(2);
    bad.known_means = Vector{1, 2};
    CHECK_THROWS_AS(augment(ds, bad), Error);
    CHECK(parse_basis("none").family == BasisFamily::None);
    CHECK(parse_basis("poly:3").degree == 3);
    CHECK(parse_basis("trig:8").per_column == 8);
    CHECK_THROWS_AS(parse_basis("spline:3"), Error);
    CHECK_THROWS_AS(parse_basis("poly:x"), Error);
    CHECK_THROWS_AS(parse_basis("poly"), Error);
}

TEST_CASE("augmented estimators with q = 0 equal the base estimators") {
    std::mt19937_64 gen(9);
    Dataset ds;
    ds.x = testing_support::random_matrix(gen, 30, 2);
    ds.x_unlabeled = testing_support::random_matrix(gen, 10, 2);
    ds.y = testing_support::random_vector(gen, 30);
    ds.known_mu = Vector{0.1, -0.1};
    CHECK(estimate_ls_augmented(ds, BasisSpec::none(), 0.05).theta_hat == estimate_ls(ds, 0.05, false).theta_hat);
    CHECK(estimate_ssls_augmented(ds, BasisSpec::none(), 0.05).theta_hat ==
          estimate_ssls(ds, 0.05, false).theta_hat);
    CHECK(estimate_ssls_augmented(ds, BasisSpec::polynomial(2), 0.05).basis == "poly:2");
}

TEST_CASE("nested least squares never fits worse") {
    std::mt19937_64 gen(10);
    for (int t = 0; t < 30; ++t) {
        Dataset ds;
        ds.x = testing_support::random_matrix(gen, 40, 2);
        ds.y.resize(40);
        for (std::size_t i = 0; i < 40; ++i) ds.y[i] = ds.x(i, 0) * ds.x(i, 0) + std::sin(ds.x(i, 1));
        const LabeledSummary base = summarize(ds.y, ds.x);
        for (const BasisSpec& spec : {BasisSpec::polynomial(3), BasisSpec::trig_on_rank(2)}) {
            const Dataset aug = augment(ds, spec);
            const LabeledSummary s = summarize(aug.y, aug.x);
            const double rss_aug = s.fit.mse * static_cast<double>(40 - aug.p() - 1);
            const double rss_base = base.fit.mse * static_cast<double>(40 - 3);
            CHECK(rss_aug <= rss_base * (1 + 1e-12));
        }
    }
}

TEST_CASE("polynomial basis lowers LS risk under a quadratic surface") {
    DgpSpec spec;
    spec.id = DgpId::GaussQuad;
    spec.n = 500;
    spec.p = 1;
    spec.seed = 77;
    const Dgp dgp(spec);
    BasisSpec basis = BasisSpec::polynomial(2);
    basis.known_means = dgp.polynomial_means(2);
    const PairedRisk r = paired_ls_risk(spec, basis, 400);
    MESSAGE("base " << r.base << " augmented " << r.augmented << " se " << r.diff_se);
    CHECK(r.base - r.augmented > 3 * r.diff_se);
}

TEST_CASE("polynomial basis does no harm under a linear surface") {
    DgpSpec spec;
    spec.id = DgpId::GaussLinear;
    spec.n = 200;
    spec.p = 2;
    spec.seed = 78;
    const Dgp dgp(spec);
    BasisSpec basis = BasisSpec::polynomial(2);
    basis.known_means = dgp.polynomial_means(2);
    const PairedRisk r = paired_ls_risk(spec, basis, 1000);
    MESSAGE("base " << r.base << " augmented " << r.augmented << " se " << r.diff_se);
    CHECK(std::abs(r.base - r.augmented) <= 3 * r.diff_se);
}
