#pragma once

#include "spac/dataset.hpp"

namespace spac {

enum class PrecisionMethod { Sample, OlsResidual, SqrtLasso };

inline const char* precision_method_name(PrecisionMethod m) {
  switch (m) {
    case PrecisionMethod::Sample: return "sample";
    case PrecisionMethod::OlsResidual: return "ols";
    case PrecisionMethod::SqrtLasso: return "sqrtlasso";
  }
  return "?";
}

// Diagonal of an estimated precision matrix for the design, in the working
// scale (unit-variance columns). Strictly positive and finite by contract.
struct PrecisionDiag {
  Vector d;
  PrecisionMethod method = PrecisionMethod::Sample;
  double lambda_d = 0.0;
};

// d_j = ((X^T X / n)^{-1})_jj. Needs n > p and a well conditioned Gram
// matrix (condition number <= 1e12).
PrecisionDiag sample_precision_diag(const Dataset& data);

// Degrees-of-freedom corrected residual form: d_j = (n - p + 1) / (e_j^T e_j)
// where e_j is the residual of X_j regressed on the other columns. Related
// to the sample form by an exact n/(n - p + 1) factor.
PrecisionDiag ols_residual_precision_diag(const Dataset& data);

// sqrt(2 log(p) / n), the usual universal level for the column regressions
double default_lambda_d(Eigen::Index n, Eigen::Index p);

// Solve min ||X B||_2 + lambda * ||B||_1 over B with B[j] = 1 fixed
// (square-root lasso on column j against the rest). Returns the full
// p-vector. lambda here is on the unnormalized ||.||_2 scale.
Vector sqrt_lasso_column(const Dataset& data, Eigen::Index j, double lambda);

// High-dimensional estimator: d_j = n / ||X Bhat_j||^2 with Bhat_j from
// sqrt_lasso_column. lambda_d is on the sqrt(2 log p / n) scale; the column
// program sees sqrt(n) * lambda_d because its loss is ||.||_2, not
// ||.||_2 / sqrt(n).
PrecisionDiag sqrt_lasso_precision_diag(const Dataset& data, double lambda_d);

// Regime dispatch used by the simulation harness: sample form when n > p,
// sqrt-lasso form otherwise.
PrecisionDiag precision_for_regime(const Dataset& data, double lambda_d);

}  // namespace spac
