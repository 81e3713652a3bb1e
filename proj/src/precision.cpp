#include "spac/precision.hpp"

#include <Eigen/Dense>
#include <cmath>

#include "spac/penalty.hpp"

namespace spac {

namespace {

void check_positive_finite(const Vector& d, const char* what) {
  for (Eigen::Index j = 0; j < d.size(); ++j)
    if (!std::isfinite(d[j]) || d[j] <= 0.0)
      throw Error(ErrorCode::DegenerateResidual,
                  std::string(what) + ": d[" + std::to_string(j + 1) + "] is not a positive finite value");
}

}  // namespace

PrecisionDiag sample_precision_diag(const Dataset& data) {
  if (data.n <= data.p)
    throw Error(ErrorCode::DimensionError,
                "sample precision needs n > p (n=" + std::to_string(data.n) +
                    ", p=" + std::to_string(data.p) + ")");
  const Matrix S = data.X.transpose() * data.X / static_cast<double>(data.n);
  Eigen::SelfAdjointEigenSolver<Matrix> eig(S);
  if (eig.info() != Eigen::Success)
    throw Error(ErrorCode::SingularDesign, "Gram eigendecomposition failed");
  const Vector& ev = eig.eigenvalues();
  const double lo = ev.minCoeff();
  const double hi = ev.maxCoeff();
  if (lo <= 0.0 || hi / lo > 1e12)
    throw Error(ErrorCode::SingularDesign, "Gram matrix is singular or near-singular");

  const Matrix& V = eig.eigenvectors();
  PrecisionDiag out;
  out.method = PrecisionMethod::Sample;
  out.d.resize(data.p);
  for (Eigen::Index j = 0; j < data.p; ++j) {
    double acc = 0.0;
    for (Eigen::Index k = 0; k < data.p; ++k) acc += V(j, k) * V(j, k) / ev[k];
    out.d[j] = acc;
  }
  check_positive_finite(out.d, "sample precision");
  return out;
}

PrecisionDiag ols_residual_precision_diag(const Dataset& data) {
  const Eigen::Index n = data.n;
  const Eigen::Index p = data.p;
  if (n <= p)
    throw Error(ErrorCode::DimensionError,
                "residual precision needs n > p (n=" + std::to_string(n) +
                    ", p=" + std::to_string(p) + ")");
  PrecisionDiag out;
  out.method = PrecisionMethod::OlsResidual;
  out.d.resize(p);

  Matrix rest(n, p - 1);
  for (Eigen::Index j = 0; j < p; ++j) {
    Eigen::Index k = 0;
    for (Eigen::Index c = 0; c < p; ++c)
      if (c != j) rest.col(k++) = data.X.col(c);

    Vector e;
    if (p == 1) {
      e = data.X.col(j);
    } else {
      Eigen::ColPivHouseholderQR<Matrix> qr(rest);
      if (qr.rank() < p - 1)
        throw Error(ErrorCode::SingularDesign,
                    "columns other than " + std::to_string(j + 1) + " are rank deficient");
      e = data.X.col(j) - rest * qr.solve(data.X.col(j));
    }
    const double ss = e.squaredNorm();
    if (ss <= 1e-12 * data.X.col(j).squaredNorm())
      throw Error(ErrorCode::DegenerateResidual,
                  "column " + std::to_string(j + 1) + " is explained exactly by the others");
    out.d[j] = static_cast<double>(n - p + 1) / ss;
  }
  check_positive_finite(out.d, "residual precision");
  return out;
}

double default_lambda_d(Eigen::Index n, Eigen::Index p) {
  if (n < 1 || p < 1) throw Error(ErrorCode::DimensionError, "need n >= 1 and p >= 1");
  return std::sqrt(2.0 * std::log(static_cast<double>(p)) / static_cast<double>(n));
}

Vector sqrt_lasso_column(const Dataset& data, Eigen::Index j, double lambda) {
  const Eigen::Index n = data.n;
  const Eigen::Index p = data.p;
  if (j < 0 || j >= p)
    throw Error(ErrorCode::DimensionError, "column index out of range");
  if (lambda < 0.0) throw Error(ErrorCode::NegativeEntry, "lambda must be >= 0");

  Vector B = Vector::Zero(p);
  B[j] = 1.0;
  if (p == 1) return B;

  std::vector<Eigen::Index> others;
  others.reserve(p - 1);
  for (Eigen::Index c = 0; c < p; ++c)
    if (c != j) others.push_back(c);

  // minimize over b: ||X_j - X_rest b||_2 + lambda ||b||_1, via the
  // standard scaled-lasso alternation (each inner problem is a lasso with
  // penalty lambda * ||r||, a majorizer of the sqrt loss).
  Vector b = Vector::Zero(p - 1);
  Vector r = data.X.col(j);
  const double nd = static_cast<double>(n);
  const double kkt_tol = 1e-6;
  const int max_outer = 500;
  const double deg_floor = 1e-14 * data.X.col(j).norm();

  bool converged = false;
  for (int outer = 0; outer < max_outer && !converged; ++outer) {
    const double rnorm = r.norm();
    if (rnorm <= deg_floor)
      throw Error(ErrorCode::DegenerateResidual,
                  "column " + std::to_string(j + 1) + ": residual collapsed to zero");
    const double thr = lambda * rnorm / nd;

    // inner lasso sweeps at this fixed majorizer
    for (int sweep = 0; sweep < 200; ++sweep) {
      double max_change = 0.0;
      for (Eigen::Index k = 0; k < p - 1; ++k) {
        const auto col = data.X.col(others[static_cast<size_t>(k)]);
        const double old = b[k];
        const double z = col.dot(r) / nd + old;
        const double next = soft_threshold(z, thr);
        if (next != old) {
          r -= col * (next - old);
          b[k] = next;
          max_change = std::max(max_change, std::abs(next - old));
        }
      }
      if (max_change < 1e-10) break;
    }
    if (!r.allFinite() || !b.allFinite())
      throw Error(ErrorCode::NonFiniteIterate, "sqrt-lasso iterate became non-finite");

    // subgradient check of the sqrt program itself
    const double rn = r.norm();
    if (rn <= deg_floor) continue;
    double viol = 0.0;
    for (Eigen::Index k = 0; k < p - 1; ++k) {
      const double g = data.X.col(others[static_cast<size_t>(k)]).dot(r) / rn;
      if (b[k] == 0.0)
        viol = std::max(viol, std::abs(g) - lambda);
      else
        viol = std::max(viol, std::abs(g - lambda * (b[k] > 0.0 ? 1.0 : -1.0)));
    }
    converged = viol <= kkt_tol;
  }
  if (!converged)
    throw Error(ErrorCode::NoConvergence,
                "sqrt-lasso on column " + std::to_string(j + 1) +
                    " did not meet the optimality tolerance");

  for (Eigen::Index k = 0; k < p - 1; ++k) B[others[static_cast<size_t>(k)]] = -b[k];
  return B;
}

PrecisionDiag sqrt_lasso_precision_diag(const Dataset& data, double lambda_d) {
  if (lambda_d < 0.0) throw Error(ErrorCode::NegativeEntry, "lambda_d must be >= 0");
  const double nd = static_cast<double>(data.n);
  // the column loss is unnormalized ||.||_2, so the universal level
  // sqrt(2 log p / n) enters multiplied by sqrt(n)
  const double lambda_col = std::sqrt(nd) * lambda_d;

  PrecisionDiag out;
  out.method = PrecisionMethod::SqrtLasso;
  out.lambda_d = lambda_d;
  out.d.resize(data.p);
  for (Eigen::Index j = 0; j < data.p; ++j) {
    const Vector B = sqrt_lasso_column(data, j, lambda_col);
    // columns are centered already, so the centering projector is a no-op
    const double ms = (data.X * B).squaredNorm() / nd;
    if (ms <= 1e-12)
      throw Error(ErrorCode::DegenerateResidual,
                  "column " + std::to_string(j + 1) + ": zero conditional variance estimate");
    out.d[j] = 1.0 / ms;
  }
  check_positive_finite(out.d, "sqrt-lasso precision");
  return out;
}

PrecisionDiag precision_for_regime(const Dataset& data, double lambda_d) {
  if (data.n > data.p) return sample_precision_diag(data);
  return sqrt_lasso_precision_diag(data, lambda_d);
}

}  // namespace spac
