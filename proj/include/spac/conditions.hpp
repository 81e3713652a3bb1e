#pragma once

#include <array>
#include <cstdint>

#include "spac/dataset.hpp"

namespace spac {

enum class CovKind { BlockExchangeable, BlockAr1, Explicit };

// Correlation matrix with construction metadata. realized is symmetric, unit
// diagonal, positive definite (smallest eigenvalue > 1e-10).
struct CovarianceModel {
  CovKind kind = CovKind::Explicit;
  Matrix realized;
  Eigen::Index p = 0;
  Eigen::Index q = 0;                       // block kinds only
  std::array<double, 3> alpha{0.0, 0.0, 0.0};  // block kinds only
};

// Audit of the sign-recovery conditions at a given support size and sign
// vector. original is |C_21 C_11^{-1} s|; transformed rescales both sides by
// the sqrt(1/d_jj) diagonals. Margins are 1 - max entry.
struct ConditionReport {
  Vector original_vector;
  Vector transformed_vector;
  bool original_weak = false;
  double original_strong_margin = 0.0;
  bool transformed_weak = false;
  double transformed_strong_margin = 0.0;
};

// Two-block exchangeable correlation: off-diagonals alpha1 within the first
// q, alpha3 within the rest, alpha2 across.
CovarianceModel block_exchangeable_cov(Eigen::Index q, Eigen::Index p,
                                       const std::array<double, 3>& alpha);

// Two-block AR(1): alpha1^|i-j| within the first q, alpha3^|i-j| within the
// rest, alpha2^|i-j| across (global 1-based index distance).
CovarianceModel block_ar1_cov(Eigen::Index q, Eigen::Index p,
                              const std::array<double, 3>& alpha);

// Wrap an explicit correlation matrix; validates symmetry, unit diagonal,
// positive definiteness.
CovarianceModel explicit_cov(const Matrix& C);

ConditionReport check_irrepresentable(const CovarianceModel& C, Eigen::Index q,
                                      const Vector& signs);

// Closed-form sufficient check for the exchangeable structure:
// |alpha2| <= (1-eta) * sqrt((1-alpha1)/(1-alpha3)) * alpha1 * L_lower.
bool exchangeable_sufficient_check(const std::array<double, 3>& alpha, double L_lower,
                                   double eta);

// Closed-form sufficient check for the AR(1) structure; DegenerateDenominator
// when alpha2 == alpha3.
bool ar1_sufficient_check(const std::array<double, 3>& alpha, double eta);

// Eigenvalue/angle sufficient check for a general nonnegative correlation
// matrix; see the implementation for the exact inequality audited.
bool general_sufficient_check(const CovarianceModel& C, Eigen::Index q, double eta);

// Random correlation matrix built to violate the original condition but
// satisfy the transformed one: A ~ U(0,1) entries, the last p-q rows shifted
// by U(low, high), G = A2 A2^T + I rescaled to a correlation.
CovarianceModel random_c1_covariance(Eigen::Index p, Eigen::Index q, double low, double high,
                                     std::uint64_t seed);

}  // namespace spac
