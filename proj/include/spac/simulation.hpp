#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "spac/conditions.hpp"
#include "spac/dataset.hpp"
#include "spac/rng.hpp"

namespace spac {

enum class Method { Lasso, SpacLasso, ALasso, SpacALasso, Scad, SpacScad };

const char* method_name(Method m);
Method method_from_name(const std::string& name);

// Ground truth of one simulated cell. beta has its q nonzero entries first.
struct SimTruth {
  Vector beta;
  Eigen::Index q = 0;
  double sigma2 = 1.0;
  CovarianceModel C;
  std::vector<Eigen::Index> binary_columns;  // 1-based column numbers
};

enum class SettingId { S1, S2, S3, S4, Custom };

// One simulation study. beta_values holds the signal cells: one scalar per
// cell (beta = beta_s on the first q coordinates), except S3 where the whole
// vector is the (beta1, beta2, beta3) triple of a single cell (beta repeats
// each value three times).
struct SettingConfig {
  SettingId setting_id = SettingId::Custom;
  Eigen::Index n = 0, p = 0, q = 0;
  double sigma2 = 1.0;
  std::vector<double> beta_values;
  std::array<double, 3> alpha{0.0, 0.0, 0.0};
  int replications = 100;
  std::uint64_t seed = 0;
  std::vector<Method> methods;
  std::vector<Eigen::Index> binary_columns;  // 1-based
  CovKind cov = CovKind::BlockExchangeable;
};

struct MetricsRow {
  Method method;
  std::string beta_label;
  double fnr_mean = 0.0, fpr_mean = 0.0;
  std::optional<double> fnr_sd, fpr_sd;  // absent with fewer than 2 replications
  int failed = 0;
};

struct RatioRow {
  std::string pair;  // e.g. "Lasso/SPAC-Lasso"
  std::string beta_label;
  std::optional<double> ratio;  // absent when the denominator is zero
};

struct MetricsTable {
  std::vector<MetricsRow> rows;
  std::vector<RatioRow> ratios;
};

// Rows iid from the latent normal with covariance C (Cholesky transform);
// listed binary columns are dichotomized at 0 into {0,1}; the result is
// standardized column-wise to the working scale.
Matrix generate_design(const CovarianceModel& C, Eigen::Index n,
                       const std::vector<Eigen::Index>& binary_columns, Rng& rng);

// y = X beta + eps, eps ~ N(0, sigma2 I), centered.
Vector generate_response(const Matrix& X, const SimTruth& truth, Rng& rng);

// Zero-detection threshold 1e-10. Throws DegenerateTruth when beta_true has
// no zero or no nonzero entry.
std::pair<double, double> fnr_fpr(const Vector& beta_hat, const Vector& beta_true);

// Paper settings. beta_spec: the list of beta_s cells, or the single triple
// for S3.
SettingConfig builtin_setting(SettingId id, const std::array<double, 3>& alpha,
                              const std::vector<double>& beta_spec);

// One signal cell of a study: its table label and the expanded coefficient
// vector (length p).
struct SettingCell {
  std::string label;
  Vector beta;
};

// Cells of a config: one per beta_values entry with beta_s on the first q
// coordinates, or the single grouped cell for S3 (each triple value repeated
// three times).
std::vector<SettingCell> setting_cells(const SettingConfig& config);

// Full Monte-Carlo run: per replication generate data, estimate d (sample
// form when n > p, sqrt-lasso otherwise), fit each method BIC-tuned, score.
// Deterministic for a given seed no matter how many workers are used.
MetricsTable run_setting(const SettingConfig& config, int workers = 1);

// Per-replication scores, exposed for --per-rep-out.
struct RepScore {
  int replication = 0;
  Method method;
  std::string beta_label;
  double fnr = 0.0, fpr = 0.0;
};

MetricsTable run_setting(const SettingConfig& config, int workers,
                         std::vector<RepScore>* per_rep);

}  // namespace spac
