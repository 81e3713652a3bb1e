#pragma once

#include <cmath>
#include <limits>

#include "spac/dataset.hpp"
#include "spac/errors.hpp"

namespace spac {

enum class PenaltyKind { Lasso, ALasso, Scad };

inline const char* penalty_kind_name(PenaltyKind k) {
  switch (k) {
    case PenaltyKind::Lasso: return "lasso";
    case PenaltyKind::ALasso: return "alasso";
    case PenaltyKind::Scad: return "scad";
  }
  return "?";
}

// Penalty family plus its tuning values. weights are the adaptive-lasso
// per-coordinate multipliers, entries in (0, +inf]; an infinite weight pins
// that coordinate to zero.
struct PenaltySpec {
  PenaltyKind kind = PenaltyKind::Lasso;
  double lambda = 0.0;
  Vector weights;      // ALasso only, size p
  double mu = 1.0;     // ALasso initializer exponent
  double a = 3.7;      // SCAD shape

  static PenaltySpec lasso(double lambda);
  static PenaltySpec adaptive(double lambda, Vector weights, double mu = 1.0);
  static PenaltySpec scad(double lambda, double a = 3.7);

  PenaltySpec with_lambda(double new_lambda) const {
    PenaltySpec s = *this;
    s.lambda = new_lambda;
    return s;
  }
};

// w_j = 1 / |g_j|^mu, with 1/0 = +inf (coordinate excluded from the model)
Vector weights_from_initializer(const Vector& gamma0, double mu);

// Three-branch SCAD value at the given lambda, a > 2
inline double scad_penalty_value(double t, double lambda, double a) {
  const double at = std::abs(t);
  if (at <= lambda) return lambda * at;
  if (at <= a * lambda)
    return (2.0 * a * lambda * at - at * at - lambda * lambda) / (2.0 * (a - 1.0));
  return lambda * lambda * (a * a - 1.0) / (2.0 * (a - 1.0));
}

// Penalty value at coordinate j (j only matters for ALasso weights).
double penalty_value(const PenaltySpec& spec, double t, Eigen::Index j = 0);

// soft_threshold(z, t) = sign(z) * max(|z| - t, 0)
inline double soft_threshold(double z, double t) {
  const double mag = std::abs(z) - t;
  if (mag <= 0.0) return 0.0;
  return z < 0.0 ? -mag : mag;
}

inline double adaptive_threshold(double z, double lambda, double w) {
  if (std::isinf(w)) return 0.0;
  return soft_threshold(z, lambda * w);
}

// Exact minimizer of 0.5*(z - g)^2 + scad(g; lambda, a), a > 2.
inline double scad_threshold(double z, double lambda, double a) {
  const double az = std::abs(z);
  if (az <= 2.0 * lambda) return soft_threshold(z, lambda);
  if (az <= a * lambda) {
    const double s = z < 0.0 ? -1.0 : 1.0;
    return ((a - 1.0) * z - s * a * lambda) / (a - 2.0);
  }
  return z;
}

}  // namespace spac
