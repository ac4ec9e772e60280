#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ssmean/estimators.hpp"

namespace ssmean {

enum class BasisFamily { None, Polynomial, TrigOnRank, Custom };

/// Extra covariates g_1(X), ..., g_q(X) appended to each row.
///
/// Polynomial{degree}: x_j^2, ..., x_j^degree for every original column j.
/// TrigOnRank{per_column}: for every column, sqrt(2)cos(2 pi k z), sqrt(2)sin(2 pi k z)
/// alternating with k = 1, 2, ..., where z is the pooled mid-rank transform of
/// that column; per_column functions in total.
/// Custom: caller-supplied functions of the whole row.
struct BasisSpec {
    BasisFamily family = BasisFamily::None;
    std::size_t degree = 2;
    std::size_t per_column = 0;
    std::vector<std::function<double(std::span<const double>)>> custom;
    /// Population means of the added columns, when the caller knows them.
    /// With a known covariate mean in the dataset this keeps the ideal setting
    /// available after augmentation.
    std::optional<Vector> known_means;

    static BasisSpec none() { return {}; }
    static BasisSpec polynomial(std::size_t degree);
    static BasisSpec trig_on_rank(std::size_t per_column);

    /// Number of added columns for p original covariates.
    std::size_t added(std::size_t p) const;

    /// "none", "poly:D", "trig:Q" or "custom:Q".
    std::string label() const;
};

/// Parses the CLI forms `none`, `poly:D`, `trig:Q`; throws InvalidSpec.
BasisSpec parse_basis(std::string_view text);

/// max(1, floor(n^(1/3))), reduced so that p + q <= n - 2.
std::size_t default_q(std::size_t n, std::size_t p = 1);

/// Pooled mid-rank transform: rank k of N values maps to k/N - (N+1)/(2N),
/// ties get their average rank.
Vector pooled_rank_transform(std::span<const double> values);

/// Appends the basis columns to labeled and unlabeled rows alike. Throws
/// DimensionOverflow when p + q > n - 2.
Dataset augment(const Dataset& ds, const BasisSpec& spec);

MeanEstimate estimate_ls_augmented(const Dataset& ds, const BasisSpec& spec, double alpha,
                                   bool truncate = false);
MeanEstimate estimate_ssls_augmented(const Dataset& ds, const BasisSpec& spec, double alpha,
                                     bool truncate = false);

}  // namespace ssmean
