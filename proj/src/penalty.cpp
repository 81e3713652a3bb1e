#include "spac/penalty.hpp"

namespace spac {

namespace {

void check_lambda(double lambda) {
  if (std::isnan(lambda)) throw Error(ErrorCode::NonFiniteInput, "lambda is NaN");
  if (lambda < 0.0) throw Error(ErrorCode::NegativeEntry, "lambda must be >= 0");
}

}  // namespace

PenaltySpec PenaltySpec::lasso(double lambda) {
  check_lambda(lambda);
  PenaltySpec s;
  s.kind = PenaltyKind::Lasso;
  s.lambda = lambda;
  return s;
}

PenaltySpec PenaltySpec::adaptive(double lambda, Vector weights, double mu) {
  check_lambda(lambda);
  for (Eigen::Index j = 0; j < weights.size(); ++j) {
    if (std::isnan(weights[j]))
      throw Error(ErrorCode::NonFiniteInput, "weight " + std::to_string(j + 1) + " is NaN");
    if (weights[j] <= 0.0)
      throw Error(ErrorCode::NegativeEntry,
                  "weight " + std::to_string(j + 1) + " must be positive (+inf allowed)");
  }
  if (mu < 0.0) throw Error(ErrorCode::NegativeEntry, "mu must be >= 0");
  PenaltySpec s;
  s.kind = PenaltyKind::ALasso;
  s.lambda = lambda;
  s.weights = std::move(weights);
  s.mu = mu;
  return s;
}

PenaltySpec PenaltySpec::scad(double lambda, double a) {
  check_lambda(lambda);
  if (!(a > 2.0))
    throw Error(ErrorCode::InvalidArgument, "SCAD needs a > 2, got " + std::to_string(a));
  PenaltySpec s;
  s.kind = PenaltyKind::Scad;
  s.lambda = lambda;
  s.a = a;
  return s;
}

Vector weights_from_initializer(const Vector& gamma0, double mu) {
  if (mu < 0.0) throw Error(ErrorCode::NegativeEntry, "mu must be >= 0");
  Vector w(gamma0.size());
  for (Eigen::Index j = 0; j < gamma0.size(); ++j) {
    if (std::isnan(gamma0[j])) throw Error(ErrorCode::NonFiniteInput, "initializer has NaN");
    const double mag = std::abs(gamma0[j]);
    w[j] = mag == 0.0 ? std::numeric_limits<double>::infinity()
                      : std::pow(mag, -mu);
  }
  return w;
}

double penalty_value(const PenaltySpec& spec, double t, Eigen::Index j) {
  const double at = std::abs(t);
  switch (spec.kind) {
    case PenaltyKind::Lasso:
      return spec.lambda * at;
    case PenaltyKind::ALasso: {
      if (j < 0 || j >= spec.weights.size())
        throw Error(ErrorCode::DimensionError, "coordinate index out of range for weights");
      if (at == 0.0) return 0.0;  // 0 * inf
      return spec.lambda * spec.weights[j] * at;
    }
    case PenaltyKind::Scad:
      return scad_penalty_value(t, spec.lambda, spec.a);
  }
  throw Error(ErrorCode::InvalidArgument, "unknown penalty kind");
}

}  // namespace spac
