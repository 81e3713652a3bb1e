#include "spac/conditions.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <limits>

#include "spac/rng.hpp"

namespace spac {

namespace {

void validate_correlation(const Matrix& C) {
  const Eigen::Index p = C.rows();
  if (p < 2 || C.cols() != p)
    throw Error(ErrorCode::DimensionError, "correlation matrix must be square, p >= 2");
  for (Eigen::Index i = 0; i < p; ++i) {
    if (std::abs(C(i, i) - 1.0) > 1e-10)
      throw Error(ErrorCode::InvalidArgument, "diagonal entry " + std::to_string(i + 1) + " is not 1");
    for (Eigen::Index j = i + 1; j < p; ++j)
      if (std::abs(C(i, j) - C(j, i)) > 1e-10)
        throw Error(ErrorCode::InvalidArgument, "matrix is not symmetric");
  }
  Eigen::SelfAdjointEigenSolver<Matrix> eig(C, Eigen::EigenvaluesOnly);
  const double lo = eig.eigenvalues().minCoeff();
  if (!(lo > 1e-10))
    throw Error(ErrorCode::NotPositiveDefinite,
                "smallest eigenvalue " + std::to_string(lo) + " is not positive");
}

void check_block_args(Eigen::Index q, Eigen::Index p) {
  if (q < 1 || q >= p)
    throw Error(ErrorCode::DimensionError,
                "need 1 <= q < p, got q=" + std::to_string(q) + ", p=" + std::to_string(p));
}

}  // namespace

CovarianceModel block_exchangeable_cov(Eigen::Index q, Eigen::Index p,
                                       const std::array<double, 3>& alpha) {
  check_block_args(q, p);
  Matrix C(p, p);
  for (Eigen::Index i = 0; i < p; ++i) {
    for (Eigen::Index j = 0; j < p; ++j) {
      if (i == j)
        C(i, j) = 1.0;
      else if (i < q && j < q)
        C(i, j) = alpha[0];
      else if (i >= q && j >= q)
        C(i, j) = alpha[2];
      else
        C(i, j) = alpha[1];
    }
  }
  validate_correlation(C);
  CovarianceModel model;
  model.kind = CovKind::BlockExchangeable;
  model.realized = std::move(C);
  model.p = p;
  model.q = q;
  model.alpha = alpha;
  return model;
}

CovarianceModel block_ar1_cov(Eigen::Index q, Eigen::Index p,
                              const std::array<double, 3>& alpha) {
  check_block_args(q, p);
  for (double a : alpha)
    if (!(a > -1.0 && a < 1.0))
      throw Error(ErrorCode::InvalidArgument, "AR(1) parameters must lie in (-1, 1)");
  Matrix C(p, p);
  for (Eigen::Index i = 0; i < p; ++i) {
    for (Eigen::Index j = 0; j < p; ++j) {
      const double k = std::abs(static_cast<double>(i - j));
      if (i == j)
        C(i, j) = 1.0;
      else if (i < q && j < q)
        C(i, j) = std::pow(alpha[0], k);
      else if (i >= q && j >= q)
        C(i, j) = std::pow(alpha[2], k);
      else
        C(i, j) = std::pow(alpha[1], k);
    }
  }
  validate_correlation(C);
  CovarianceModel model;
  model.kind = CovKind::BlockAr1;
  model.realized = std::move(C);
  model.p = p;
  model.q = q;
  model.alpha = alpha;
  return model;
}

CovarianceModel explicit_cov(const Matrix& C) {
  validate_correlation(C);
  CovarianceModel model;
  model.kind = CovKind::Explicit;
  model.realized = C;
  model.p = C.rows();
  return model;
}

ConditionReport check_irrepresentable(const CovarianceModel& C, Eigen::Index q,
                                      const Vector& signs) {
  const Matrix& M = C.realized;
  const Eigen::Index p = M.rows();
  check_block_args(q, p);
  if (signs.size() != q)
    throw Error(ErrorCode::DimensionError, "signs must have length q");
  for (Eigen::Index j = 0; j < q; ++j)
    if (signs[j] != 1.0 && signs[j] != -1.0)
      throw Error(ErrorCode::InvalidArgument, "signs entries must be +1 or -1");

  Eigen::LLT<Matrix> llt(M);
  if (llt.info() != Eigen::Success)
    throw Error(ErrorCode::NotPositiveDefinite, "covariance is not positive definite");
  const Matrix inv = llt.solve(Matrix::Identity(p, p));
  const Vector d = inv.diagonal();

  const Matrix C11 = M.topLeftCorner(q, q);
  const Matrix C21 = M.bottomLeftCorner(p - q, q);
  Eigen::LLT<Matrix> llt11(C11);
  if (llt11.info() != Eigen::Success)
    throw Error(ErrorCode::NotPositiveDefinite, "C_11 is not positive definite");

  ConditionReport report;
  report.original_vector = (C21 * llt11.solve(signs)).cwiseAbs();

  // transformed: V(2) C_21 C_11^{-1} V(1)^{-1} s with V(k) = diag(sqrt(1/d_jj))
  Vector scaled_signs(q);
  for (Eigen::Index j = 0; j < q; ++j) scaled_signs[j] = signs[j] * std::sqrt(d[j]);
  Vector t = C21 * llt11.solve(scaled_signs);
  for (Eigen::Index i = 0; i < p - q; ++i) t[i] /= std::sqrt(d[q + i]);
  report.transformed_vector = t.cwiseAbs();

  report.original_strong_margin = 1.0 - report.original_vector.maxCoeff();
  report.transformed_strong_margin = 1.0 - report.transformed_vector.maxCoeff();
  report.original_weak = report.original_vector.maxCoeff() <= 1.0 + 1e-10;
  report.transformed_weak = report.transformed_vector.maxCoeff() <= 1.0 + 1e-10;
  return report;
}

bool exchangeable_sufficient_check(const std::array<double, 3>& alpha, double L_lower,
                                   double eta) {
  if (!(alpha[0] > -1.0 && alpha[0] < 1.0 && alpha[2] > -1.0 && alpha[2] < 1.0))
    throw Error(ErrorCode::InvalidArgument, "alpha1, alpha3 must lie in (-1, 1)");
  if (L_lower < 1.0) throw Error(ErrorCode::InvalidArgument, "L_lower must be >= 1");
  if (!(eta > 0.0 && eta < 1.0)) throw Error(ErrorCode::InvalidArgument, "eta must be in (0, 1)");
  const double bound =
      (1.0 - eta) * std::sqrt((1.0 - alpha[0]) / (1.0 - alpha[2])) * alpha[0] * L_lower;
  return std::abs(alpha[1]) <= bound;
}

bool ar1_sufficient_check(const std::array<double, 3>& alpha, double eta) {
  for (double a : alpha)
    if (!(a > 0.0 && a < 1.0))
      throw Error(ErrorCode::InvalidArgument, "alpha values must lie in (0, 1)");
  if (!(eta > 0.0 && eta < 1.0)) throw Error(ErrorCode::InvalidArgument, "eta must be in (0, 1)");
  if (alpha[1] == alpha[2])
    throw Error(ErrorCode::DegenerateDenominator, "alpha2 == alpha3 makes the bound unbounded");
  const double front = std::max(alpha[1] / std::abs(alpha[1] - alpha[2]), 1.0);
  const double lhs = front *
                     std::sqrt((1.0 - alpha[2] * alpha[2]) / (1.0 - alpha[0] * alpha[0])) *
                     alpha[1] * (1.0 - alpha[0] * alpha[1]) /
                     ((1.0 + alpha[0]) * (1.0 - alpha[1]));
  return lhs <= 1.0 - eta;
}

bool general_sufficient_check(const CovarianceModel& C, Eigen::Index q, double eta) {
  const Matrix& M = C.realized;
  const Eigen::Index p = M.rows();
  check_block_args(q, p);
  if (!(eta > 0.0 && eta < 1.0)) throw Error(ErrorCode::InvalidArgument, "eta must be in (0, 1)");
  for (Eigen::Index i = 0; i < p; ++i)
    for (Eigen::Index j = 0; j < p; ++j)
      if (M(i, j) < 0.0)
        throw Error(ErrorCode::NegativeEntry, "matrix entries must be nonnegative");
  {
    Eigen::SelfAdjointEigenSolver<Matrix> eig(M, Eigen::EigenvaluesOnly);
    if (!(eig.eigenvalues().minCoeff() > 1e-10))
      throw Error(ErrorCode::NotPositiveDefinite, "matrix is not positive definite");
  }

  // ||C_21 C_11^{-1}||_inf (max absolute row sum); zero means uncorrelated
  // blocks and the condition holds trivially
  const Matrix C11 = M.topLeftCorner(q, q);
  const Matrix C21 = M.bottomLeftCorner(p - q, q);
  const Matrix T = C21 * C11.llt().solve(Matrix::Identity(q, q));
  const double inf_norm = T.cwiseAbs().rowwise().sum().maxCoeff();
  if (inf_norm == 0.0) return true;
  const double g = (1.0 - eta) / inf_norm;

  // per-index pieces: submatrix extremes, off-diagonal column, largest angle
  Vector numerator(p), denominator(p);
  for (Eigen::Index i = 0; i < p; ++i) {
    Matrix Ci(p - 1, p - 1);
    Vector vi(p - 1);
    Eigen::Index r = 0;
    for (Eigen::Index a = 0; a < p; ++a) {
      if (a == i) continue;
      vi[r] = M(a, i);
      Eigen::Index c = 0;
      for (Eigen::Index b = 0; b < p; ++b) {
        if (b == i) continue;
        Ci(r, c++) = M(a, b);
      }
      ++r;
    }
    Eigen::SelfAdjointEigenSolver<Matrix> eig(Ci, Eigen::EigenvaluesOnly);
    const double lmin = eig.eigenvalues().minCoeff();
    const double lmax = eig.eigenvalues().maxCoeff();
    const double v2 = vi.squaredNorm();

    double sin2_phi = 0.0;
    const double vnorm = std::sqrt(v2);
    if (vnorm > 0.0) {
      double cos_min = 1.0;  // largest angle = smallest cosine
      for (Eigen::Index c = 0; c < p - 1; ++c) {
        const double cn = Ci.col(c).norm();
        if (cn == 0.0) continue;
        double ct = vi.dot(Ci.col(c)) / (vnorm * cn);
        ct = std::min(1.0, std::max(-1.0, ct));
        cos_min = std::min(cos_min, ct);
      }
      sin2_phi = 1.0 - cos_min * cos_min;
    }
    numerator[i] = 1.0 - v2 / lmax;
    denominator[i] = 1.0 - v2 / lmax - v2 * sin2_phi / lmin;
  }

  double max_num = -std::numeric_limits<double>::infinity();
  double min_den = std::numeric_limits<double>::infinity();
  for (Eigen::Index j = q; j < p; ++j) max_num = std::max(max_num, numerator[j]);
  for (Eigen::Index i = 0; i < q; ++i) min_den = std::min(min_den, denominator[i]);

  if (min_den <= 0.0) return false;
  if (max_num < 0.0) return false;
  return max_num / min_den < g * g;
}

CovarianceModel random_c1_covariance(Eigen::Index p, Eigen::Index q, double low, double high,
                                     std::uint64_t seed) {
  check_block_args(q, p);
  if (!(low < high)) throw Error(ErrorCode::InvalidArgument, "need low < high");
  Rng rng(seed);

  Matrix A(p, p);
  for (Eigen::Index i = 0; i < p; ++i)
    for (Eigen::Index j = 0; j < p; ++j) A(i, j) = rng.uniform();
  for (Eigen::Index i = q; i < p; ++i)
    for (Eigen::Index j = 0; j < p; ++j) A(i, j) += rng.uniform(low, high);

  Matrix G = A * A.transpose();
  G += Matrix::Identity(p, p);
  Vector s = G.diagonal().cwiseSqrt();
  for (Eigen::Index i = 0; i < p; ++i)
    for (Eigen::Index j = 0; j < p; ++j) G(i, j) /= s[i] * s[j];
  // exact symmetry and unit diagonal despite the elementwise division
  G = ((G + G.transpose()) / 2.0).eval();
  G.diagonal().setOnes();

  CovarianceModel model;
  model.kind = CovKind::Explicit;
  model.realized = std::move(G);
  model.p = p;
  model.q = q;
  return model;
}

}  // namespace spac
