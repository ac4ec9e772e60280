#include "ssmean/basis.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numbers>
#include <numeric>

#include "ssmean/error.hpp"

namespace ssmean {

BasisSpec BasisSpec::polynomial(std::size_t degree) {
    BasisSpec s;
    s.family = BasisFamily::Polynomial;
    s.degree = degree;
    return s;
}

BasisSpec BasisSpec::trig_on_rank(std::size_t per_column) {
    BasisSpec s;
    s.family = BasisFamily::TrigOnRank;
    s.per_column = per_column;
    return s;
}

std::size_t BasisSpec::added(std::size_t p) const {
    switch (family) {
    case BasisFamily::None: return 0;
    case BasisFamily::Polynomial: return degree >= 2 ? p * (degree - 1) : 0;
    case BasisFamily::TrigOnRank: return p * per_column;
    case BasisFamily::Custom: return custom.size();
    }
    return 0;
}

std::string BasisSpec::label() const {
    switch (family) {
    case BasisFamily::None: return "none";
    case BasisFamily::Polynomial: return "poly:" + std::to_string(degree);
    case BasisFamily::TrigOnRank: return "trig:" + std::to_string(per_column);
    case BasisFamily::Custom: return "custom:" + std::to_string(custom.size());
    }
    return "none";
}

BasisSpec parse_basis(std::string_view text) {
    if (text == "none" || text.empty()) return BasisSpec::none();
    const auto colon = text.find(':');
    if (colon == std::string_view::npos) {
        throw Error(ErrorCode::InvalidSpec, "basis must be none, poly:D or trig:Q, got '" +
                                                std::string(text) + "'");
    }
    const std::string_view family = text.substr(0, colon);
    const std::string_view arg = text.substr(colon + 1);
    std::size_t value = 0;
    const auto [ptr, ec] = std::from_chars(arg.data(), arg.data() + arg.size(), value);
    if (ec != std::errc{} || ptr != arg.data() + arg.size()) {
        throw Error(ErrorCode::InvalidSpec, "bad basis parameter '" + std::string(arg) + "'");
    }
    if (family == "poly") {
        if (value < 1) throw Error(ErrorCode::InvalidSpec, "polynomial degree must be >= 1");
        return BasisSpec::polynomial(value);
    }
    if (family == "trig") return BasisSpec::trig_on_rank(value);
    throw Error(ErrorCode::InvalidSpec, "unknown basis family '" + std::string(family) + "'");
}

std::size_t default_q(std::size_t n, std::size_t p) {
    auto q = static_cast<std::size_t>(std::llround(std::cbrt(static_cast<double>(n))));
    while (q > 0 && q * q * q > n) --q;
    while ((q + 1) * (q + 1) * (q + 1) <= n) ++q;
    q = std::max<std::size_t>(q, 1);
    if (n < p + 2) return 0;
    return std::min(q, n - 2 - p);
}

Vector pooled_rank_transform(std::span<const double> values) {
    const std::size_t total = values.size();
    std::vector<std::size_t> order(total);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
    Vector z(total);
    const double big_n = static_cast<double>(total);
    const double offset = (big_n + 1.0) / (2.0 * big_n);
    std::size_t i = 0;
    while (i < total) {
        std::size_t j = i;
        while (j + 1 < total && values[order[j + 1]] == values[order[i]]) ++j;
        // 1-based ranks i+1 .. j+1 share their average.
        const double rank = (static_cast<double>(i + 1) + static_cast<double>(j + 1)) / 2.0;
        for (std::size_t k = i; k <= j; ++k) z[order[k]] = rank / big_n - offset;
        i = j + 1;
    }
    return z;
}

namespace {

Matrix append_columns(const Matrix& base, const Matrix& extra) {
    Matrix out(base.rows(), base.cols() + extra.cols());
    for (std::size_t i = 0; i < base.rows(); ++i) {
        auto dst = out.row(i);
        auto a = base.row(i);
        auto b = extra.row(i);
        std::copy(a.begin(), a.end(), dst.begin());
        std::copy(b.begin(), b.end(), dst.begin() + static_cast<std::ptrdiff_t>(a.size()));
    }
    return out;
}

Matrix polynomial_columns(const Matrix& x, std::size_t degree) {
    const std::size_t p = x.cols();
    Matrix out(x.rows(), p * (degree - 1));
    for (std::size_t i = 0; i < x.rows(); ++i) {
        auto r = x.row(i);
        for (std::size_t d = 2; d <= degree; ++d) {
            for (std::size_t j = 0; j < p; ++j) {
                out(i, (d - 2) * p + j) = std::pow(r[j], static_cast<double>(d));
            }
        }
    }
    return out;
}

// Trig columns for the pooled rows (labeled first, then unlabeled).
Matrix trig_columns(const Matrix& labeled, const Matrix& unlabeled, std::size_t per_column) {
    const std::size_t n = labeled.rows();
    const std::size_t m = unlabeled.rows();
    const std::size_t p = labeled.cols();
    Matrix out(n + m, p * per_column);
    Vector column(n + m);
    for (std::size_t j = 0; j < p; ++j) {
        for (std::size_t k = 0; k < n; ++k) column[k] = labeled(k, j);
        for (std::size_t k = 0; k < m; ++k) column[n + k] = unlabeled(k, j);
        const Vector z = pooled_rank_transform(column);
        for (std::size_t row = 0; row < n + m; ++row) {
            for (std::size_t f = 0; f < per_column; ++f) {
                const double freq = static_cast<double>(f / 2 + 1);
                const double arg = 2.0 * std::numbers::pi * freq * z[row];
                out(row, j * per_column + f) =
                    std::numbers::sqrt2 * (f % 2 == 0 ? std::cos(arg) : std::sin(arg));
            }
        }
    }
    return out;
}

Matrix custom_columns(const Matrix& x, const BasisSpec& spec) {
    Matrix out(x.rows(), spec.custom.size());
    for (std::size_t i = 0; i < x.rows(); ++i) {
        for (std::size_t f = 0; f < spec.custom.size(); ++f) out(i, f) = spec.custom[f](x.row(i));
    }
    return out;
}

Matrix rows_slice(const Matrix& a, std::size_t begin, std::size_t count) {
    std::vector<double> data(a.data().begin() + static_cast<std::ptrdiff_t>(begin * a.cols()),
                             a.data().begin() + static_cast<std::ptrdiff_t>((begin + count) * a.cols()));
    return Matrix(count, a.cols(), std::move(data));
}

}  // namespace

Dataset augment(const Dataset& ds, const BasisSpec& spec) {
    ds.validate();
    const std::size_t p = ds.p();
    const std::size_t q = spec.added(p);
    if (q == 0) return ds;
    if (p + q + 2 > ds.n()) {
        throw Error(ErrorCode::DimensionOverflow,
                    "augmented dimension " + std::to_string(p + q) + " exceeds n - 2 = " +
                        std::to_string(ds.n() >= 2 ? ds.n() - 2 : 0));
    }
    if (spec.known_means && spec.known_means->size() != q) {
        throw Error(ErrorCode::InvalidSpec, "basis has " + std::to_string(q) + " columns but " +
                                                std::to_string(spec.known_means->size()) +
                                                " known means");
    }

    // Unlabeled rows may be stored as 0x0; give them the labeled width.
    const Matrix unlabeled = ds.m() > 0 ? ds.x_unlabeled : Matrix(0, p);
    Matrix extra_labeled;
    Matrix extra_unlabeled;
    switch (spec.family) {
    case BasisFamily::Polynomial:
        extra_labeled = polynomial_columns(ds.x, spec.degree);
        extra_unlabeled = polynomial_columns(unlabeled, spec.degree);
        break;
    case BasisFamily::TrigOnRank: {
        const Matrix pooled = trig_columns(ds.x, unlabeled, spec.per_column);
        extra_labeled = rows_slice(pooled, 0, ds.n());
        extra_unlabeled = rows_slice(pooled, ds.n(), ds.m());
        break;
    }
    case BasisFamily::Custom:
        extra_labeled = custom_columns(ds.x, spec);
        extra_unlabeled = custom_columns(unlabeled, spec);
        break;
    case BasisFamily::None: return ds;
    }

    Dataset out;
    out.y = ds.y;
    out.x = append_columns(ds.x, extra_labeled);
    out.x_unlabeled = append_columns(unlabeled, extra_unlabeled);
    if (ds.known_mu) {
        if (spec.known_means) {
            Vector mu = *ds.known_mu;
            mu.insert(mu.end(), spec.known_means->begin(), spec.known_means->end());
            out.known_mu = std::move(mu);
        } else if (spec.family == BasisFamily::TrigOnRank) {
            // Under a known P_X the rank transform is uniform, so every
            // trigonometric column has mean zero.
            Vector mu = *ds.known_mu;
            mu.resize(p + q, 0.0);
            out.known_mu = std::move(mu);
        }
    }
    return out;
}

MeanEstimate estimate_ls_augmented(const Dataset& ds, const BasisSpec& spec, double alpha,
                                   bool truncate) {
    MeanEstimate e = estimate_ls(augment(ds, spec), alpha, truncate);
    e.basis = spec.label();
    return e;
}

MeanEstimate estimate_ssls_augmented(const Dataset& ds, const BasisSpec& spec, double alpha,
                                     bool truncate) {
    MeanEstimate e = estimate_ssls(augment(ds, spec), alpha, truncate);
    e.basis = spec.label();
    return e;
}

}  // namespace ssmean
