#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

namespace ssmean {

using Vector = std::vector<double>;

/// Dense row-major matrix. Rows are observations throughout the library.
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
        : rows_(rows), cols_(cols), data_(rows * cols, fill) {}
    Matrix(std::size_t rows, std::size_t cols, std::vector<double> row_major);
    Matrix(std::initializer_list<std::initializer_list<double>> rows);

    static Matrix column(std::span<const double> values);

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }
    bool empty() const noexcept { return data_.empty(); }

    double& operator()(std::size_t r, std::size_t c) noexcept { return data_[r * cols_ + c]; }
    double operator()(std::size_t r, std::size_t c) const noexcept { return data_[r * cols_ + c]; }

    std::span<double> row(std::size_t r) noexcept { return {data_.data() + r * cols_, cols_}; }
    std::span<const double> row(std::size_t r) const noexcept {
        return {data_.data() + r * cols_, cols_};
    }

    const std::vector<double>& data() const noexcept { return data_; }

    /// Appends one row; on an empty 0×0 matrix the width is taken from the row.
    void push_row(std::span<const double> values);

    bool all_finite() const noexcept;

    friend bool operator==(const Matrix&, const Matrix&) = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

struct OlsSolution {
    Vector beta;
    Vector residuals;
    bool rank_ok = false;
    /// Ratio of largest to smallest pivot of the triangular factor.
    double condition_estimate = 0.0;
};

/// Pivot ratio below which the design is treated as rank deficient.
inline constexpr double kRankTolerance = 1e-10;

/// Prepends an all-ones intercept column.
Matrix build_design(const Matrix& x_rows);

/// Least squares through a column-pivoted Householder QR. A numerically
/// singular design yields rank_ok == false and zero coefficients; callers
/// decide whether that is fatal. Throws DimensionMismatch on shape errors.
OlsSolution ols_solve(const Matrix& design, std::span<const double> y);

/// (1/n) sum_k (x_k - center)(x_k - center)^T.
Matrix sample_cov(const Matrix& x_rows, std::span<const double> center);

Vector column_means(const Matrix& x_rows);

/// Column sums; used to pool means over several blocks without copying rows.
Vector column_sums(const Matrix& x_rows);

double mean(std::span<const double> v);

/// Unbiased sample variance (divisor n-1); zero for n < 2.
double sample_variance(std::span<const double> v);

double dot(std::span<const double> a, std::span<const double> b);

Vector matvec(const Matrix& a, std::span<const double> x);

/// a^T b for row-major a.
Vector transpose_matvec(const Matrix& a, std::span<const double> b);

/// x^T A x for square A.
double quadratic_form(const Matrix& a, std::span<const double> x);

/// Lower-triangular Cholesky factor; throws RankDeficient when `a` is not
/// positive definite.
Matrix cholesky(const Matrix& a);

}  // namespace ssmean
