#include "ssmean/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "ssmean/error.hpp"

namespace ssmean {

Matrix::Matrix(std::size_t rows, std::size_t cols, std::vector<double> row_major)
    : rows_(rows), cols_(cols), data_(std::move(row_major)) {
    if (data_.size() != rows_ * cols_) {
        throw Error(ErrorCode::DimensionMismatch,
                    "matrix " + std::to_string(rows_) + "x" + std::to_string(cols_) +
                        " given " + std::to_string(data_.size()) + " entries");
    }
}

Matrix::Matrix(std::initializer_list<std::initializer_list<double>> rows) {
    for (const auto& r : rows) {
        push_row(std::span<const double>(r.begin(), r.size()));
    }
}

Matrix Matrix::column(std::span<const double> values) {
    return Matrix(values.size(), 1, std::vector<double>(values.begin(), values.end()));
}

void Matrix::push_row(std::span<const double> values) {
    if (rows_ == 0 && cols_ == 0) {
        cols_ = values.size();
    } else if (values.size() != cols_) {
        throw Error(ErrorCode::DimensionMismatch,
                    "row of width " + std::to_string(values.size()) + " pushed into matrix of width " +
                        std::to_string(cols_));
    }
    data_.insert(data_.end(), values.begin(), values.end());
    ++rows_;
}

bool Matrix::all_finite() const noexcept {
    return std::all_of(data_.begin(), data_.end(), [](double v) { return std::isfinite(v); });
}

Matrix build_design(const Matrix& x_rows) {
    const std::size_t n = x_rows.rows();
    const std::size_t p = x_rows.cols();
    Matrix design(n, p + 1);
    for (std::size_t i = 0; i < n; ++i) {
        design(i, 0) = 1.0;
        auto src = x_rows.row(i);
        std::copy(src.begin(), src.end(), design.row(i).begin() + 1);
    }
    return design;
}

OlsSolution ols_solve(const Matrix& design, std::span<const double> y) {
    const std::size_t n = design.rows();
    const std::size_t k = design.cols();
    if (y.size() != n) {
        throw Error(ErrorCode::DimensionMismatch,
                    "design has " + std::to_string(n) + " rows, response has " + std::to_string(y.size()));
    }
    if (k == 0 || n < k) {
        throw Error(ErrorCode::DimensionMismatch,
                    "least squares needs rows >= columns, got " + std::to_string(n) + "x" +
                        std::to_string(k));
    }

    // Column-major working copy: a[j] is column j.
    std::vector<Vector> a(k, Vector(n));
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < k; ++j) a[j][i] = design(i, j);
    }
    Vector qty(y.begin(), y.end());
    std::vector<std::size_t> perm(k);
    std::iota(perm.begin(), perm.end(), 0);
    Vector rdiag(k, 0.0);

    for (std::size_t j = 0; j < k; ++j) {
        // Pivot: remaining column with the largest trailing norm.
        std::size_t best = j;
        double best_norm = -1.0;
        for (std::size_t c = j; c < k; ++c) {
            double s = 0.0;
            for (std::size_t i = j; i < n; ++i) s += a[c][i] * a[c][i];
            if (s > best_norm) {
                best_norm = s;
                best = c;
            }
        }
        std::swap(a[j], a[best]);
        std::swap(perm[j], perm[best]);

        Vector& v = a[j];
        const double norm = std::sqrt(best_norm);
        if (norm == 0.0) {
            rdiag[j] = 0.0;
            continue;
        }
        const double alpha = v[j] > 0 ? -norm : norm;
        v[j] -= alpha;
        double vnorm2 = 0.0;
        for (std::size_t i = j; i < n; ++i) vnorm2 += v[i] * v[i];
        rdiag[j] = alpha;
        if (vnorm2 == 0.0) continue;

        auto reflect = [&](Vector& target) {
            double s = 0.0;
            for (std::size_t i = j; i < n; ++i) s += v[i] * target[i];
            const double f = 2.0 * s / vnorm2;
            for (std::size_t i = j; i < n; ++i) target[i] -= f * v[i];
        };
        for (std::size_t c = j + 1; c < k; ++c) reflect(a[c]);
        reflect(qty);
    }

    OlsSolution out;
    const double largest = std::abs(rdiag[0]);
    const double smallest = std::abs(rdiag[k - 1]);
    out.condition_estimate =
        smallest > 0.0 ? largest / smallest : std::numeric_limits<double>::infinity();
    out.rank_ok = largest > 0.0 && smallest >= kRankTolerance * largest;
    out.beta.assign(k, 0.0);
    if (!out.rank_ok) {
        out.residuals.assign(y.begin(), y.end());
        return out;
    }

    // Back substitution on R z = (Q^T y)[0:k]; R's strict upper part lives in a[c][r], r < c.
    Vector z(k, 0.0);
    for (std::size_t r = k; r-- > 0;) {
        double s = qty[r];
        for (std::size_t c = r + 1; c < k; ++c) s -= a[c][r] * z[c];
        z[r] = s / rdiag[r];
    }
    for (std::size_t j = 0; j < k; ++j) out.beta[perm[j]] = z[j];

    out.residuals.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        out.residuals[i] = y[i] - dot(design.row(i), out.beta);
    }
    return out;
}

Matrix sample_cov(const Matrix& x_rows, std::span<const double> center) {
    const std::size_t n = x_rows.rows();
    const std::size_t p = x_rows.cols();
    if (center.size() != p) {
        throw Error(ErrorCode::DimensionMismatch,
                    "center has length " + std::to_string(center.size()) + ", rows have " +
                        std::to_string(p));
    }
    if (n == 0) throw Error(ErrorCode::InsufficientData, "covariance of zero rows");
    Matrix cov(p, p);
    Vector d(p);
    for (std::size_t k = 0; k < n; ++k) {
        auto r = x_rows.row(k);
        for (std::size_t i = 0; i < p; ++i) d[i] = r[i] - center[i];
        for (std::size_t i = 0; i < p; ++i) {
            for (std::size_t j = 0; j <= i; ++j) cov(i, j) += d[i] * d[j];
        }
    }
    for (std::size_t i = 0; i < p; ++i) {
        for (std::size_t j = 0; j <= i; ++j) {
            cov(i, j) /= static_cast<double>(n);
            cov(j, i) = cov(i, j);
        }
    }
    return cov;
}

Vector column_sums(const Matrix& x_rows) {
    Vector s(x_rows.cols(), 0.0);
    for (std::size_t k = 0; k < x_rows.rows(); ++k) {
        auto r = x_rows.row(k);
        for (std::size_t j = 0; j < s.size(); ++j) s[j] += r[j];
    }
    return s;
}

Vector column_means(const Matrix& x_rows) {
    Vector s = column_sums(x_rows);
    if (x_rows.rows() > 0) {
        for (double& v : s) v /= static_cast<double>(x_rows.rows());
    }
    return s;
}

double mean(std::span<const double> v) {
    if (v.empty()) return 0.0;
    return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

double sample_variance(std::span<const double> v) {
    if (v.size() < 2) return 0.0;
    const double m = mean(v);
    double s = 0.0;
    for (double x : v) s += (x - m) * (x - m);
    return s / static_cast<double>(v.size() - 1);
}

double dot(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

Vector matvec(const Matrix& a, std::span<const double> x) {
    Vector out(a.rows());
    for (std::size_t i = 0; i < a.rows(); ++i) out[i] = dot(a.row(i), x);
    return out;
}

Vector transpose_matvec(const Matrix& a, std::span<const double> b) {
    Vector out(a.cols(), 0.0);
    for (std::size_t i = 0; i < a.rows(); ++i) {
        auto r = a.row(i);
        for (std::size_t j = 0; j < a.cols(); ++j) out[j] += r[j] * b[i];
    }
    return out;
}

double quadratic_form(const Matrix& a, std::span<const double> x) {
    return dot(x, matvec(a, x));
}

Matrix cholesky(const Matrix& a) {
    const std::size_t p = a.rows();
    if (a.cols() != p) throw Error(ErrorCode::DimensionMismatch, "cholesky of non-square matrix");
    Matrix l(p, p);
    for (std::size_t j = 0; j < p; ++j) {
        double d = a(j, j);
        for (std::size_t k = 0; k < j; ++k) d -= l(j, k) * l(j, k);
        if (!(d > 0.0)) throw Error(ErrorCode::RankDeficient, "matrix is not positive definite");
        l(j, j) = std::sqrt(d);
        for (std::size_t i = j + 1; i < p; ++i) {
            double s = a(i, j);
            for (std::size_t k = 0; k < j; ++k) s -= l(i, k) * l(j, k);
            l(i, j) = s / l(j, j);
        }
    }
    return l;
}

}  // namespace ssmean
