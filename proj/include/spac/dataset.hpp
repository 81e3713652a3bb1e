#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "spac/errors.hpp"

namespace spac {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

// Regression data in the solver's working scale: every design column has
// mean zero and squared norm n, the response is centered, there is no
// intercept. col_means / col_scales / y_mean keep the affine map back to
// the raw scale.
struct Dataset {
  Matrix X;
  Vector y;
  Eigen::Index n = 0;
  Eigen::Index p = 0;
  Vector col_means;
  Vector col_scales;
  double y_mean = 0.0;
};

// Center and rescale columns to squared norm n, center y.
// Throws ZeroVarianceColumn, AllZeroResponse, NonFiniteInput, DimensionError.
Dataset standardize(const Matrix& raw_X, const Vector& raw_y);

// Wrap data already in the working scale (columns mean-zero, norm^2 = n,
// y centered); validates and fills identity provenance.
Dataset dataset_from_standardized(const Matrix& X, const Vector& y);

// Load a CSV file, pull out the response column, standardize the rest.
// response_column: 1-based index if it parses as an integer, else a header
// name (requires a header row). A header row is detected by its first line
// failing numeric parsing.
Dataset load_csv(const std::string& path, const std::string& response_column);

// Split one CSV line on commas, whitespace-trimmed. Exposed for tests.
std::vector<std::string> split_csv_line(const std::string& line);

}  // namespace spac
