#pragma once

#include <vector>

#include "spac/dataset.hpp"
#include "spac/penalty.hpp"
#include "spac/precision.hpp"

namespace spac {

struct SolverControls {
  double tol = 1e-3;   // max relative coordinate change per sweep
  int max_iter = 1000; // sweep cap
};

struct PathGrid {
  int count = 100;
  double decades = 3.0;
};

enum class FitSpace { Spac, Beta };

// One penalized fit. gamma is the penalized parameterization; beta is the
// recovered coefficient vector beta_j = gamma_j * sqrt(d_j) (they coincide
// for Beta-space baseline fits, where d = 1).
struct SpacFit {
  Vector gamma;
  Vector beta;
  double lambda = 0.0;
  PenaltySpec penalty;
  int iterations = 0;
  bool converged = false;
  double objective = 0.0;
  FitSpace space = FitSpace::Spac;
};

// Thrown by coordinate_descent_fit when the iteration cap is hit; carries
// the partial fit so callers (paths) can keep it flagged instead of dying.
class NoConvergenceError : public Error {
 public:
  NoConvergenceError(SpacFit partial_fit, const std::string& message)
      : Error(ErrorCode::NoConvergence, message), partial(std::move(partial_fit)) {}
  SpacFit partial;
};

struct PathFit {
  Vector lambdas;             // strictly decreasing
  std::vector<SpacFit> fits;  // fits[k].lambda == lambdas[k]
  Vector bic;                 // NaN where the fit did not converge
};

// Loss 0.5*||y - sum_j X_j sqrt(d_j) gamma_j||^2 + sum_j pen(gamma_j)*d_j.
// pen is lambda*|t| (lasso), lambda*w_j*|t| (adaptive); for SCAD the penalty
// enters on the per-observation scale, n * scad(t; lambda/n, a), which is
// the objective the coordinate updates actually minimize (the lambda/n fold
// is a no-op for the l1 families but moves SCAD's branch points).
double objective(const Dataset& data, const PrecisionDiag& d, const PenaltySpec& penalty,
                 const Vector& gamma);

// z_j = X_j^T r / (n sqrt(d_j)) + gamma_prev_j, r being the full residual.
double partial_residual_z(const Dataset& data, const Vector& r, double gamma_prev_j,
                          Eigen::Index j, const PrecisionDiag& d);

// beta_j = gamma_j * sqrt(d_j)
Vector beta_from_gamma(const Vector& gamma, const PrecisionDiag& d);

// Cyclic coordinate descent on the reweighted objective. Converged means the
// sweep-to-sweep change criterion was met AND (convex penalties) the
// subgradient conditions hold at the returned point. Throws
// NoConvergenceError (with the partial fit) at the iteration cap,
// NonFiniteIterate if the iterate degenerates.
SpacFit coordinate_descent_fit(const Dataset& data, const PrecisionDiag& d,
                               const PenaltySpec& penalty, const Vector& init,
                               const SolverControls& controls = {});

// Smallest lambda whose fit is exactly zero: max_j |X_j^T y| / sqrt(d_j),
// adaptive weights divide (infinite weights are skipped, falling back to the
// unweighted value if every weight is infinite).
double lambda_max(const Dataset& data, const PrecisionDiag& d, const PenaltySpec& penalty);

// Log-spaced path from lambda_max over `decades`, warm-started; entries that
// hit the cap are flagged converged=false, not dropped. bic is filled per
// converged entry.
PathFit lambda_path(const Dataset& data, const PrecisionDiag& d, const PenaltySpec& penalty,
                    const PathGrid& grid = {}, const SolverControls& controls = {});

// n log(RSS/n) + df log(n), RSS from the recovered beta, df = support size
double bic_value(const Dataset& data, const SpacFit& fit);

// Converged entry minimizing BIC, ties toward larger lambda. Entries with
// df > n/2 are not eligible: past that size the BIC comparison in the p >= n
// regime degenerates (RSS -> 0 swamps the df penalty near saturation).
SpacFit bic_select(const PathFit& path, const Dataset& data);

// Same machinery with d fixed to all-ones (plain beta-space fit).
SpacFit baseline_fit(const Dataset& data, const PenaltySpec& penalty, double lambda,
                     const SolverControls& controls = {});

// Baseline path: lambda_path with d = 1, fits tagged as beta-space.
PathFit baseline_path(const Dataset& data, const PenaltySpec& penalty,
                      const PathGrid& grid = {}, const SolverControls& controls = {});

// Identity precision helper for baseline paths.
PrecisionDiag unit_precision(Eigen::Index p);

// Least squares coefficients (QR); SingularDesign on rank deficiency.
Vector ols_fit(const Dataset& data);

enum class InitMode { LowDim, HighDim };

// Adaptive-lasso initializer gamma_0 for the reweighted fit. LowDim (n > p):
// OLS beta divided by sqrt(d). HighDim: BIC-tuned reweighted lasso, OLS refit
// on its support (zeros elsewhere), divided by sqrt(d).
Vector alasso_initializer(const Dataset& data, const PrecisionDiag& d, InitMode mode,
                          const PathGrid& grid = {}, const SolverControls& controls = {});

// Baseline adaptive-lasso initializer beta_0: BIC-tuned plain lasso fit.
Vector baseline_alasso_initializer(const Dataset& data, const PathGrid& grid = {},
                                   const SolverControls& controls = {});

}  // namespace spac
