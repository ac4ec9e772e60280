#include <doctest.h>

#include <cmath>
#include <vector>

#include "ssmean/rng.hpp"

using namespace ssmean;

TEST_CASE("same seed and stream reproduce the sequence") {
    RngStream a = rng_stream(42, 7);
    RngStream b = rng_stream(42, 7);
    for (int i = 0; i < 1000; ++i) {
        const double u = a.uniform();
        CHECK(u == b.uniform());
        CHECK(u > 0.0);
        CHECK(u < 1.0);
    }
    for (int i = 0; i < 100; ++i) CHECK(a.normal() == b.normal());
}

TEST_CASE("different streams and seeds diverge") {
    RngStream a(1, 0);
    RngStream b(1, 1);
    RngStream c(2, 0);
    int same_ab = 0;
    int same_ac = 0;
    for (int i = 0; i < 100; ++i) {
        const double u = a.uniform();
        same_ab += u == b.uniform();
        same_ac += u == c.uniform();
    }
    CHECK(same_ab == 0);
    CHECK(same_ac == 0);
}

TEST_CASE("adjacent streams are uncorrelated") {
    const int n = 100000;
    for (std::uint64_t s : {0ull, 1ull, 1000ull}) {
        RngStream a(99, s);
        RngStream b(99, s + 1);
        double sa = 0, sb = 0, saa = 0, sbb = 0, sab = 0;
        for (int i = 0; i < n; ++i) {
            const double x = a.uniform();
            const double y = b.uniform();
            sa += x;
            sb += y;
            saa += x * x;
            sbb += y * y;
            sab += x * y;
        }
        const double cov = sab / n - (sa / n) * (sb / n);
        const double rho = cov / std::sqrt((saa / n - sa * sa / n / n) * (sbb / n - sb * sb / n / n));
        CHECK(std::abs(rho) < 0.01);
    }
}

TEST_CASE("normal draws have unit moments") {
    RngStream r(123, 0);
    const int n = 1000000;
    double s = 0, ss = 0;
    for (int i = 0; i < n; ++i) {
        const double z = r.normal();
        s += z;
        ss += z * z;
    }
    const double m = s / n;
    const double v = ss / n - m * m;
    CHECK(std::abs(m) < 4.0 / std::sqrt(n));
    // Var of the sample variance is about 2/n for a normal.
    CHECK(std::abs(v - 1.0) < 4.0 * std::sqrt(2.0 / n));
}

TEST_CASE("poisson draws have matching mean and variance") {
    RngStream r(5, 3);
    const int n = 200000;
    double s = 0, ss = 0;
    for (int i = 0; i < n; ++i) {
        const double k = static_cast<double>(r.poisson(10.0));
        s += k;
        ss += k * k;
    }
    const double m = s / n;
    CHECK(std::abs(m - 10.0) < 4.0 * std::sqrt(10.0 / n));
    CHECK(std::abs(ss / n - m * m - 10.0) < 0.2);
}
