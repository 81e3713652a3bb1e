#include "spac/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace spac {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

void check_dims(const Dataset& data, const PrecisionDiag& d, const PenaltySpec& penalty) {
  if (d.d.size() != data.p)
    throw Error(ErrorCode::DimensionError,
                "d has " + std::to_string(d.d.size()) + " entries for p = " + std::to_string(data.p));
  if (penalty.kind == PenaltyKind::ALasso && penalty.weights.size() != data.p)
    throw Error(ErrorCode::DimensionError, "adaptive weights do not match p");
  for (Eigen::Index j = 0; j < d.d.size(); ++j)
    if (!(d.d[j] > 0.0) || !std::isfinite(d.d[j]))
      throw Error(ErrorCode::InvalidArgument, "d must be positive and finite");
}

// penalty term of the solver's objective at one coordinate (see objective())
double solver_penalty_term(const PenaltySpec& penalty, double t, Eigen::Index j, double n) {
  switch (penalty.kind) {
    case PenaltyKind::Lasso:
      return penalty.lambda * std::abs(t);
    case PenaltyKind::ALasso:
      if (t == 0.0) return 0.0;
      return penalty.lambda * penalty.weights[j] * std::abs(t);
    case PenaltyKind::Scad:
      return n * scad_penalty_value(t, penalty.lambda / n, penalty.a);
  }
  throw Error(ErrorCode::InvalidArgument, "unknown penalty kind");
}

// Subgradient residual of the convex objective at gamma, given the current
// full residual r. Zero means exact stationarity.
double kkt_violation(const Dataset& data, const Vector& sqrt_d, const Vector& d,
                     const PenaltySpec& penalty, const Vector& gamma, const Vector& r) {
  const Vector g = data.X.transpose() * r;  // X^T r
  double viol = 0.0;
  for (Eigen::Index j = 0; j < data.p; ++j) {
    double w = 1.0;
    if (penalty.kind == PenaltyKind::ALasso) {
      w = penalty.weights[j];
      if (std::isinf(w)) continue;  // coordinate pinned at zero, no condition
    }
    const double grad = g[j] * sqrt_d[j];
    const double bound = penalty.lambda * w * d[j];
    if (gamma[j] == 0.0)
      viol = std::max(viol, std::abs(grad) - bound);
    else
      viol = std::max(viol, std::abs(grad - (gamma[j] > 0.0 ? bound : -bound)));
  }
  return viol;
}

struct CdResult {
  Vector gamma;
  int iterations = 0;
  bool converged = false;
};

CdResult cd_core(const Dataset& data, const PrecisionDiag& dd, const PenaltySpec& penalty,
                 const Vector& init, const SolverControls& controls) {
  const Eigen::Index p = data.p;
  const double n = static_cast<double>(data.n);
  const Vector& d = dd.d;
  const Vector sqrt_d = d.array().sqrt();

  Vector gamma = init.size() == 0 ? Vector::Zero(p) : init;
  if (gamma.size() != p) throw Error(ErrorCode::DimensionError, "init does not match p");
  if (!gamma.allFinite()) throw Error(ErrorCode::NonFiniteInput, "init has non-finite entries");

  Vector r = data.y - data.X * sqrt_d.cwiseProduct(gamma);

  // internal scaling: the univariate problem at coordinate j is
  // 0.5*(z - g)^2 + pen(g; lambda/n), the d_j factors cancel
  const double thr_lasso = penalty.lambda / n;
  const double thr_scad = penalty.lambda / n;
  const bool convex = penalty.kind != PenaltyKind::Scad;
  // accepted stationarity slack, kept below the 1e-4*lambda certificate
  const double kkt_slack =
      0.5e-4 * penalty.lambda + 1e-9 * n * (p > 0 ? d.maxCoeff() : 1.0);

  CdResult out;
  for (int sweep = 1; sweep <= controls.max_iter; ++sweep) {
    double max_rel = 0.0;
    for (Eigen::Index j = 0; j < p; ++j) {
      const double old = gamma[j];
      const double z = data.X.col(j).dot(r) / (n * sqrt_d[j]) + old;
      double next;
      switch (penalty.kind) {
        case PenaltyKind::Lasso:
          next = soft_threshold(z, thr_lasso);
          break;
        case PenaltyKind::ALasso:
          next = adaptive_threshold(z, thr_lasso, penalty.weights[j]);
          break;
        default:
          next = scad_threshold(z, thr_scad, penalty.a);
          break;
      }
      if (next != old) {
        r.noalias() -= data.X.col(j) * (sqrt_d[j] * (next - old));
        gamma[j] = next;
      }
      max_rel = std::max(max_rel, std::abs(next - old) / std::max(std::abs(old), 1.0));
    }
    out.iterations = sweep;
    if (!std::isfinite(max_rel))
      throw Error(ErrorCode::NonFiniteIterate, "coordinate update diverged");
    if (max_rel < controls.tol) {
      if (!convex || kkt_violation(data, sqrt_d, d, penalty, gamma, r) <= kkt_slack) {
        out.converged = true;
        break;
      }
    }
  }
  if (!gamma.allFinite())
    throw Error(ErrorCode::NonFiniteIterate, "iterate has non-finite entries");
  out.gamma = std::move(gamma);
  return out;
}

SpacFit make_fit(const Dataset& data, const PrecisionDiag& d, const PenaltySpec& penalty,
                 CdResult&& res, FitSpace space) {
  SpacFit fit;
  fit.gamma = std::move(res.gamma);
  fit.beta = beta_from_gamma(fit.gamma, d);
  fit.lambda = penalty.lambda;
  fit.penalty = penalty;
  fit.iterations = res.iterations;
  fit.converged = res.converged;
  fit.objective = objective(data, d, penalty, fit.gamma);
  fit.space = space;
  return fit;
}

SpacFit cd_fit_flagged(const Dataset& data, const PrecisionDiag& d, const PenaltySpec& penalty,
                       const Vector& init, const SolverControls& controls, FitSpace space) {
  check_dims(data, d, penalty);
  CdResult res = cd_core(data, d, penalty, init, controls);
  return make_fit(data, d, penalty, std::move(res), space);
}

}  // namespace

double objective(const Dataset& data, const PrecisionDiag& d, const PenaltySpec& penalty,
                 const Vector& gamma) {
  check_dims(data, d, penalty);
  if (gamma.size() != data.p)
    throw Error(ErrorCode::DimensionError, "gamma does not match p");
  const double n = static_cast<double>(data.n);
  const Vector sqrt_d = d.d.array().sqrt();
  const Vector r = data.y - data.X * sqrt_d.cwiseProduct(gamma);
  double value = 0.5 * r.squaredNorm();
  for (Eigen::Index j = 0; j < data.p; ++j)
    value += solver_penalty_term(penalty, gamma[j], j, n) * d.d[j];
  return value;
}

double partial_residual_z(const Dataset& data, const Vector& r, double gamma_prev_j,
                          Eigen::Index j, const PrecisionDiag& d) {
  if (r.size() != data.n) throw Error(ErrorCode::DimensionError, "residual does not match n");
  if (j < 0 || j >= data.p) throw Error(ErrorCode::DimensionError, "coordinate out of range");
  return data.X.col(j).dot(r) / (static_cast<double>(data.n) * std::sqrt(d.d[j])) + gamma_prev_j;
}

Vector beta_from_gamma(const Vector& gamma, const PrecisionDiag& d) {
  if (gamma.size() != d.d.size())
    throw Error(ErrorCode::DimensionError, "gamma and d sizes differ");
  return gamma.array() * d.d.array().sqrt();
}

SpacFit coordinate_descent_fit(const Dataset& data, const PrecisionDiag& d,
                               const PenaltySpec& penalty, const Vector& init,
                               const SolverControls& controls) {
  SpacFit fit = cd_fit_flagged(data, d, penalty, init, controls, FitSpace::Spac);
  if (!fit.converged)
    throw NoConvergenceError(fit, "no convergence in " + std::to_string(fit.iterations) +
                                      " sweeps at lambda = " + std::to_string(penalty.lambda));
  return fit;
}

double lambda_max(const Dataset& data, const PrecisionDiag& d, const PenaltySpec& penalty) {
  check_dims(data, d, penalty);
  if (data.y.norm() == 0.0) throw Error(ErrorCode::AllZeroResponse, "response is identically zero");
  const Vector g = data.X.transpose() * data.y;
  double best = 0.0;
  bool any = false;
  for (Eigen::Index j = 0; j < data.p; ++j) {
    double w = 1.0;
    if (penalty.kind == PenaltyKind::ALasso) {
      w = penalty.weights[j];
      if (std::isinf(w)) continue;
    }
    best = std::max(best, std::abs(g[j]) / (std::sqrt(d.d[j]) * w));
    any = true;
  }
  if (!any) {
    // every weight infinite: the fit is zero at any lambda; anchor the path
    // on the unweighted value so the grid is still well formed
    for (Eigen::Index j = 0; j < data.p; ++j)
      best = std::max(best, std::abs(g[j]) / std::sqrt(d.d[j]));
  }
  if (best <= 0.0)
    throw Error(ErrorCode::AllZeroResponse, "response is orthogonal to every column");
  return best;
}

PathFit lambda_path(const Dataset& data, const PrecisionDiag& d, const PenaltySpec& penalty,
                    const PathGrid& grid, const SolverControls& controls) {
  if (grid.count < 2) throw Error(ErrorCode::InvalidArgument, "grid.count must be >= 2");
  if (!(grid.decades > 0.0)) throw Error(ErrorCode::InvalidArgument, "grid.decades must be > 0");
  // tiny nudge up so the head fit is exactly zero despite rounding
  const double head = lambda_max(data, d, penalty) * (1.0 + 1e-10);

  PathFit path;
  path.lambdas.resize(grid.count);
  path.bic.resize(grid.count);
  path.fits.reserve(grid.count);

  Vector warm = Vector::Zero(data.p);
  for (int k = 0; k < grid.count; ++k) {
    const double lam = head * std::pow(10.0, -grid.decades * k / (grid.count - 1));
    path.lambdas[k] = lam;
    SpacFit fit = cd_fit_flagged(data, d, penalty.with_lambda(lam), warm, controls,
                                 FitSpace::Spac);
    warm = fit.gamma;
    path.bic[k] = fit.converged ? bic_value(data, fit) : kNaN;
    path.fits.push_back(std::move(fit));
  }
  return path;
}

double bic_value(const Dataset& data, const SpacFit& fit) {
  const double n = static_cast<double>(data.n);
  const double rss = (data.y - data.X * fit.beta).squaredNorm();
  Eigen::Index df = 0;
  for (Eigen::Index j = 0; j < fit.gamma.size(); ++j)
    if (fit.gamma[j] != 0.0) ++df;
  return n * std::log(std::max(rss, 1e-300) / n) +
         static_cast<double>(df) * std::log(n);
}

SpacFit bic_select(const PathFit& path, const Dataset& data) {
  if (path.fits.empty()) throw Error(ErrorCode::NoConvergedFit, "empty path");
  const Eigen::Index df_cap = data.n / 2;
  int best = -1;
  double best_bic = std::numeric_limits<double>::infinity();
  for (size_t k = 0; k < path.fits.size(); ++k) {
    const SpacFit& fit = path.fits[k];
    if (!fit.converged) continue;
    Eigen::Index df = 0;
    for (Eigen::Index j = 0; j < fit.gamma.size(); ++j)
      if (fit.gamma[j] != 0.0) ++df;
    if (df > df_cap) continue;
    const double b = std::isnan(path.bic[static_cast<Eigen::Index>(k)])
                         ? bic_value(data, fit)
                         : path.bic[static_cast<Eigen::Index>(k)];
    if (b < best_bic) {  // strict: ties keep the earlier (larger) lambda
      best_bic = b;
      best = static_cast<int>(k);
    }
  }
  if (best < 0)
    throw Error(ErrorCode::NoConvergedFit, "no converged path entry with support <= n/2");
  return path.fits[static_cast<size_t>(best)];
}

PrecisionDiag unit_precision(Eigen::Index p) {
  PrecisionDiag d;
  d.d = Vector::Ones(p);
  d.method = PrecisionMethod::Sample;
  return d;
}

SpacFit baseline_fit(const Dataset& data, const PenaltySpec& penalty, double lambda,
                     const SolverControls& controls) {
  SpacFit fit = cd_fit_flagged(data, unit_precision(data.p), penalty.with_lambda(lambda),
                               Vector(), controls, FitSpace::Beta);
  if (!fit.converged)
    throw NoConvergenceError(fit, "baseline fit did not converge at lambda = " +
                                      std::to_string(lambda));
  return fit;
}

PathFit baseline_path(const Dataset& data, const PenaltySpec& penalty, const PathGrid& grid,
                      const SolverControls& controls) {
  PathFit path = lambda_path(data, unit_precision(data.p), penalty, grid, controls);
  for (auto& fit : path.fits) fit.space = FitSpace::Beta;
  return path;
}

Vector ols_fit(const Dataset& data) {
  if (data.n <= data.p)
    throw Error(ErrorCode::DimensionError, "least squares needs n > p");
  Eigen::ColPivHouseholderQR<Matrix> qr(data.X);
  if (qr.rank() < data.p)
    throw Error(ErrorCode::SingularDesign, "design is rank deficient");
  return qr.solve(data.y);
}

Vector alasso_initializer(const Dataset& data, const PrecisionDiag& d, InitMode mode,
                          const PathGrid& grid, const SolverControls& controls) {
  check_dims(data, d, PenaltySpec::lasso(0.0));
  const Vector sqrt_d = d.d.array().sqrt();
  if (mode == InitMode::LowDim) {
    return (ols_fit(data).array() / sqrt_d.array()).matrix();
  }
  // HighDim: reweighted lasso support, then a least-squares refit on it
  PathFit path = lambda_path(data, d, PenaltySpec::lasso(0.0), grid, controls);
  SpacFit sel = bic_select(path, data);
  std::vector<Eigen::Index> support;
  for (Eigen::Index j = 0; j < data.p; ++j)
    if (sel.gamma[j] != 0.0) support.push_back(j);

  Vector beta0 = Vector::Zero(data.p);
  if (!support.empty()) {
    Matrix Xs(data.n, static_cast<Eigen::Index>(support.size()));
    for (size_t k = 0; k < support.size(); ++k) Xs.col(static_cast<Eigen::Index>(k)) = data.X.col(support[k]);
    Eigen::ColPivHouseholderQR<Matrix> qr(Xs);
    if (qr.rank() < static_cast<Eigen::Index>(support.size()))
      throw Error(ErrorCode::SingularDesign, "selected support is rank deficient");
    const Vector coef = qr.solve(data.y);
    for (size_t k = 0; k < support.size(); ++k) beta0[support[k]] = coef[static_cast<Eigen::Index>(k)];
  }
  return (beta0.array() / sqrt_d.array()).matrix();
}

Vector baseline_alasso_initializer(const Dataset& data, const PathGrid& grid,
                                   const SolverControls& controls) {
  PathFit path = lambda_path(data, unit_precision(data.p), PenaltySpec::lasso(0.0), grid, controls);
  return bic_select(path, data).beta;
}

}  // namespace spac
