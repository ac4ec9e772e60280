#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "ssmean/linalg.hpp"

namespace ssmean {

struct LabeledTable {
    Vector y;
    Matrix x;
    std::string response;
    /// Covariate names in the column order of x.
    std::vector<std::string> covariates;
};

/// Header row required; every column other than `response` is a covariate in
/// header order. Bad cells are collected and reported together as one
/// ParseError naming each (row, column), rows counted from 1 after the header.
LabeledTable parse_labeled_csv(std::istream& in, const std::string& response);
LabeledTable load_labeled_csv(const std::filesystem::path& path, const std::string& response);

/// The header must hold exactly `expected` (any order); columns are reordered
/// to match `expected`. Zero data rows give a 0 x p matrix.
Matrix parse_unlabeled_csv(std::istream& in, const std::vector<std::string>& expected);
Matrix load_unlabeled_csv(const std::filesystem::path& path, const std::vector<std::string>& expected);

/// Writes a labeled table with the response first, values at full precision.
void write_labeled_csv(std::ostream& out, const LabeledTable& table);
void write_unlabeled_csv(std::ostream& out, const Matrix& x, const std::vector<std::string>& names);

/// Parses "v1,v2,..." into a vector; throws ParseError.
Vector parse_number_list(const std::string& text);

}  // namespace ssmean
