#pragma once

#include <cmath>
#include <functional>
#include <optional>

#include "spac/dataset.hpp"
#include "spac/errors.hpp"
#include "spac/rng.hpp"

namespace testutil {

using spac::Matrix;
using spac::Vector;

// Multi-level grid refinement for a 1-D function: scan, then re-scan around
// the best point with a finer step. Final step is (hi-lo)/grid^levels.
inline double grid_minimize(const std::function<double(double)>& f, double lo, double hi,
                            int levels = 3, int grid = 400) {
  double best_x = lo, best_f = f(lo);
  for (int level = 0; level < levels; ++level) {
    const double step = (hi - lo) / grid;
    for (int k = 0; k <= grid; ++k) {
      const double x = lo + step * k;
      const double v = f(x);
      if (v < best_f) {
        best_f = v;
        best_x = x;
      }
    }
    lo = best_x - 2.0 * step;
    hi = best_x + 2.0 * step;
  }
  return best_x;
}

// Mean-zero orthogonal design with exact column norm sqrt(n): scaled Helmert
// contrasts. Requires p < n.
inline Matrix orthogonal_design(Eigen::Index n, Eigen::Index p) {
  Matrix H = Matrix::Zero(n, p);
  for (Eigen::Index j = 0; j < p; ++j) {
    // Helmert contrast j+1: ones on the first j+1 rows, -(j+1) on row j+1
    const double k = static_cast<double>(j + 1);
    for (Eigen::Index i = 0; i <= j; ++i) H(i, j) = 1.0;
    H(j + 1, j) = -k;
    H.col(j) *= std::sqrt(static_cast<double>(n) / (k * (k + 1.0)));
  }
  return H;
}

// Plain Gauss-Jordan inverse, no pivot tricks; an oracle independent of
// the library's eigendecomposition route.
inline Matrix gauss_jordan_inverse(Matrix A) {
  const Eigen::Index m = A.rows();
  Matrix I = Matrix::Identity(m, m);
  for (Eigen::Index c = 0; c < m; ++c) {
    Eigen::Index piv = c;
    for (Eigen::Index r = c + 1; r < m; ++r)
      if (std::abs(A(r, c)) > std::abs(A(piv, c))) piv = r;
    A.row(c).swap(A.row(piv));
    I.row(c).swap(I.row(piv));
    const double scale = A(c, c);
    A.row(c) /= scale;
    I.row(c) /= scale;
    for (Eigen::Index r = 0; r < m; ++r) {
      if (r == c) continue;
      const double factor = A(r, c);
      A.row(r) -= factor * A.row(c);
      I.row(r) -= factor * I.row(c);
    }
  }
  return I;
}

inline Matrix random_matrix(spac::Rng& rng, Eigen::Index n, Eigen::Index p) {
  Matrix X(n, p);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < p; ++j) X(i, j) = rng.normal();
  return X;
}

inline Vector random_vector(spac::Rng& rng, Eigen::Index n) {
  Vector v(n);
  for (Eigen::Index i = 0; i < n; ++i) v[i] = rng.normal();
  return v;
}

// Random standardized regression instance with mild column correlation.
inline spac::Dataset random_dataset(spac::Rng& rng, Eigen::Index n, Eigen::Index p,
                                    double mix = 0.3) {
  Matrix X = random_matrix(rng, n, p);
  for (Eigen::Index j = 1; j < p; ++j) X.col(j) += mix * X.col(j - 1);
  Vector y = random_vector(rng, n);
  for (Eigen::Index j = 0; j < std::min<Eigen::Index>(3, p); ++j) y += X.col(j);
  return spac::standardize(X, y);
}

template <typename F>
std::optional<spac::ErrorCode> error_code_of(F&& f) {
  try {
    f();
  } catch (const spac::Error& e) {
    return e.code();
  }
  return std::nullopt;
}

}  // namespace testutil
