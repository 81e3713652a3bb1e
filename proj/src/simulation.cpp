#include "spac/simulation.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <cmath>
#include <sstream>
#include <thread>

#include "spac/penalty.hpp"
#include "spac/precision.hpp"
#include "spac/solver.hpp"

namespace spac {

const char* method_name(Method m) {
  switch (m) {
    case Method::Lasso: return "Lasso";
    case Method::SpacLasso: return "SPAC-Lasso";
    case Method::ALasso: return "ALasso";
    case Method::SpacALasso: return "SPAC-ALasso";
    case Method::Scad: return "SCAD";
    case Method::SpacScad: return "SPAC-SCAD";
  }
  return "?";
}

Method method_from_name(const std::string& name) {
  std::string k;
  for (char c : name)
    if (c != '-' && c != '_') k += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  if (k == "lasso") return Method::Lasso;
  if (k == "spaclasso") return Method::SpacLasso;
  if (k == "alasso") return Method::ALasso;
  if (k == "spacalasso") return Method::SpacALasso;
  if (k == "scad") return Method::Scad;
  if (k == "spacscad") return Method::SpacScad;
  throw Error(ErrorCode::InvalidArgument, "unknown method '" + name + "'");
}

Matrix generate_design(const CovarianceModel& C, Eigen::Index n,
                       const std::vector<Eigen::Index>& binary_columns, Rng& rng) {
  const Eigen::Index p = C.realized.rows();
  if (n < 2) throw Error(ErrorCode::DimensionError, "need n >= 2");
  for (Eigen::Index c : binary_columns)
    if (c < 1 || c > p)
      throw Error(ErrorCode::DimensionError, "binary column " + std::to_string(c) + " out of range");

  Eigen::LLT<Matrix> llt(C.realized);
  if (llt.info() != Eigen::Success)
    throw Error(ErrorCode::NotPositiveDefinite, "covariance has no Cholesky factor");
  const Matrix L = llt.matrixL();

  Matrix Z(n, p);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < p; ++j) Z(i, j) = rng.normal();
  Matrix X = Z * L.transpose();  // rows ~ N(0, C)

  for (Eigen::Index c : binary_columns)
    for (Eigen::Index i = 0; i < n; ++i) X(i, c - 1) = X(i, c - 1) > 0.0 ? 1.0 : 0.0;

  // standardize to the working scale (mean zero, squared norm n)
  const double sqrt_n = std::sqrt(static_cast<double>(n));
  for (Eigen::Index j = 0; j < p; ++j) {
    const double mean = X.col(j).mean();
    X.col(j).array() -= mean;
    const double scale = X.col(j).norm() / sqrt_n;
    if (scale <= 0.0)
      throw Error(ErrorCode::ZeroVarianceColumn, "generated column " + std::to_string(j + 1) + " is constant");
    X.col(j) /= scale;
  }
  return X;
}

Vector generate_response(const Matrix& X, const SimTruth& truth, Rng& rng) {
  if (X.cols() != truth.beta.size())
    throw Error(ErrorCode::DimensionError, "beta does not match the design");
  Vector y = X * truth.beta;
  const double sd = std::sqrt(truth.sigma2);
  for (Eigen::Index i = 0; i < y.size(); ++i) y[i] += sd * rng.normal();
  y.array() -= y.mean();
  return y;
}

std::pair<double, double> fnr_fpr(const Vector& beta_hat, const Vector& beta_true) {
  if (beta_hat.size() != beta_true.size())
    throw Error(ErrorCode::DimensionError, "coefficient vectors differ in length");
  const double zero_tol = 1e-10;
  int true_nonzero = 0, true_zero = 0, missed = 0, spurious = 0;
  for (Eigen::Index j = 0; j < beta_true.size(); ++j) {
    const bool hat_zero = std::abs(beta_hat[j]) < zero_tol;
    if (beta_true[j] != 0.0) {
      ++true_nonzero;
      if (hat_zero) ++missed;
    } else {
      ++true_zero;
      if (!hat_zero) ++spurious;
    }
  }
  if (true_nonzero == 0 || true_zero == 0)
    throw Error(ErrorCode::DegenerateTruth, "truth must have both zero and nonzero coefficients");
  return {static_cast<double>(missed) / true_nonzero,
          static_cast<double>(spurious) / true_zero};
}

SettingConfig builtin_setting(SettingId id, const std::array<double, 3>& alpha,
                              const std::vector<double>& beta_spec) {
  SettingConfig cfg;
  cfg.setting_id = id;
  cfg.alpha = alpha;
  cfg.sigma2 = 1.0;
  cfg.cov = CovKind::BlockExchangeable;
  cfg.methods = {Method::Lasso,  Method::SpacLasso, Method::ALasso,
                 Method::SpacALasso, Method::Scad,  Method::SpacScad};
  switch (id) {
    case SettingId::S1:
      cfg.p = 150; cfg.q = 10; cfg.n = 80;
      break;
    case SettingId::S2:
      cfg.p = 200; cfg.q = 10; cfg.n = 100;
      break;
    case SettingId::S3:
      cfg.p = 200; cfg.q = 9; cfg.n = 100;
      break;
    case SettingId::S4:
      cfg.p = 150; cfg.q = 10; cfg.n = 100;
      cfg.binary_columns = {1, 2, 3};
      for (Eigen::Index c = 11; c <= 60; ++c) cfg.binary_columns.push_back(c);
      break;
    default:
      throw Error(ErrorCode::UnknownSetting, "builtin settings are S1..S4");
  }
  if (beta_spec.empty())
    throw Error(ErrorCode::InvalidArgument, "at least one beta value is required");
  if (id == SettingId::S3 && beta_spec.size() != 3)
    throw Error(ErrorCode::InvalidArgument, "S3 takes exactly the (beta1, beta2, beta3) triple");
  cfg.beta_values = beta_spec;
  return cfg;
}

std::vector<SettingCell> setting_cells(const SettingConfig& cfg) {
  std::vector<SettingCell> cells;
  if (cfg.setting_id == SettingId::S3) {
    if (cfg.beta_values.size() != 3 || cfg.q != 9)
      throw Error(ErrorCode::InvalidArgument, "S3 needs q = 9 and a beta triple");
    Vector beta = Vector::Zero(cfg.p);
    for (int g = 0; g < 3; ++g)
      for (int r = 0; r < 3; ++r) beta[3 * g + r] = cfg.beta_values[static_cast<size_t>(g)];
    std::ostringstream label;
    label << "(" << cfg.beta_values[0] << "," << cfg.beta_values[1] << ","
          << cfg.beta_values[2] << ")";
    cells.push_back({label.str(), std::move(beta)});
    return cells;
  }
  for (double bs : cfg.beta_values) {
    if (bs == 0.0) throw Error(ErrorCode::DegenerateTruth, "beta_s must be nonzero");
    Vector beta = Vector::Zero(cfg.p);
    beta.head(cfg.q).setConstant(bs);
    std::ostringstream label;
    label << bs;
    cells.push_back({label.str(), std::move(beta)});
  }
  return cells;
}

namespace {

struct RepOutcome {
  bool failed = false;
  std::string error;
  // fnr/fpr per method index, aligned with cfg.methods
  std::vector<std::pair<double, double>> scores;
};

bool wants(const SettingConfig& cfg, Method m) {
  return std::find(cfg.methods.begin(), cfg.methods.end(), m) != cfg.methods.end();
}

RepOutcome run_one_replication(const SettingConfig& cfg, const CovarianceModel& C,
                               const SettingCell& cell, std::uint64_t rep_seed) {
  RepOutcome out;
  out.scores.resize(cfg.methods.size());
  try {
    Rng rng(rep_seed);
    const Matrix X = generate_design(C, cfg.n, cfg.binary_columns, rng);

    SimTruth truth;
    truth.beta = cell.beta;
    truth.q = cfg.q;
    truth.sigma2 = cfg.sigma2;
    const Vector y = generate_response(X, truth, rng);
    const Dataset data = dataset_from_standardized(X, y);

    const bool any_spac = wants(cfg, Method::SpacLasso) || wants(cfg, Method::SpacALasso) ||
                          wants(cfg, Method::SpacScad);
    PrecisionDiag d;
    if (any_spac) d = precision_for_regime(data, default_lambda_d(data.n, data.p));
    const PrecisionDiag unit = unit_precision(data.p);

    // shared intermediates
    std::optional<SpacFit> baseline_lasso, spac_lasso;
    if (wants(cfg, Method::Lasso) || wants(cfg, Method::ALasso)) {
      PathFit path = baseline_path(data, PenaltySpec::lasso(0.0));
      baseline_lasso = bic_select(path, data);
    }
    if (wants(cfg, Method::SpacLasso) ||
        (wants(cfg, Method::SpacALasso) && data.n <= data.p)) {
      PathFit path = lambda_path(data, d, PenaltySpec::lasso(0.0));
      spac_lasso = bic_select(path, data);
    }

    for (size_t mi = 0; mi < cfg.methods.size(); ++mi) {
      Vector beta_hat;
      switch (cfg.methods[mi]) {
        case Method::Lasso:
          beta_hat = baseline_lasso->beta;
          break;
        case Method::SpacLasso:
          beta_hat = spac_lasso->beta;
          break;
        case Method::ALasso: {
          // initialized from the BIC-tuned plain lasso
          Vector w = weights_from_initializer(baseline_lasso->beta, 1.0);
          PathFit path = baseline_path(data, PenaltySpec::adaptive(0.0, std::move(w)));
          beta_hat = bic_select(path, data).beta;
          break;
        }
        case Method::SpacALasso: {
          Vector gamma0;
          if (data.n > data.p) {
            gamma0 = alasso_initializer(data, d, InitMode::LowDim);
          } else {
            // same construction as alasso_initializer HighDim, reusing the
            // already selected reweighted-lasso fit
            Vector beta0 = Vector::Zero(data.p);
            std::vector<Eigen::Index> support;
            for (Eigen::Index j = 0; j < data.p; ++j)
              if (spac_lasso->gamma[j] != 0.0) support.push_back(j);
            if (!support.empty()) {
              Matrix Xs(data.n, static_cast<Eigen::Index>(support.size()));
              for (size_t k = 0; k < support.size(); ++k)
                Xs.col(static_cast<Eigen::Index>(k)) = data.X.col(support[k]);
              Eigen::ColPivHouseholderQR<Matrix> qr(Xs);
              if (qr.rank() < static_cast<Eigen::Index>(support.size()))
                throw Error(ErrorCode::SingularDesign, "selected support is rank deficient");
              const Vector coef = qr.solve(data.y);
              for (size_t k = 0; k < support.size(); ++k)
                beta0[support[k]] = coef[static_cast<Eigen::Index>(k)];
            }
            gamma0 = (beta0.array() / d.d.array().sqrt()).matrix();
          }
          Vector w = weights_from_initializer(gamma0, 1.0);
          PathFit path = lambda_path(data, d, PenaltySpec::adaptive(0.0, std::move(w)));
          beta_hat = bic_select(path, data).beta;
          break;
        }
        case Method::Scad: {
          PathFit path = baseline_path(data, PenaltySpec::scad(0.0));
          beta_hat = bic_select(path, data).beta;
          break;
        }
        case Method::SpacScad: {
          PathFit path = lambda_path(data, d, PenaltySpec::scad(0.0));
          beta_hat = bic_select(path, data).beta;
          break;
        }
      }
      out.scores[mi] = fnr_fpr(beta_hat, truth.beta);
    }
  } catch (const Error& e) {
    out.failed = true;
    out.error = e.what();
  }
  return out;
}

}  // namespace

MetricsTable run_setting(const SettingConfig& config, int workers) {
  return run_setting(config, workers, nullptr);
}

MetricsTable run_setting(const SettingConfig& config, int workers,
                         std::vector<RepScore>* per_rep) {
  if (config.replications < 1)
    throw Error(ErrorCode::InvalidArgument, "replications must be >= 1");
  if (config.methods.empty())
    throw Error(ErrorCode::InvalidArgument, "at least one method is required");
  if (config.n < 2 || config.p < 2 || config.q < 1 || config.q >= config.p)
    throw Error(ErrorCode::DimensionError, "invalid (n, p, q)");

  const CovarianceModel C =
      config.cov == CovKind::BlockAr1
          ? block_ar1_cov(config.q, config.p, config.alpha)
          : block_exchangeable_cov(config.q, config.p, config.alpha);

  const std::vector<SettingCell> cells = setting_cells(config);
  const int reps = config.replications;
  const int tasks = static_cast<int>(cells.size()) * reps;
  std::vector<RepOutcome> outcomes(static_cast<size_t>(tasks));

  // one task per (cell, replication); sub-seed depends only on the task,
  // never on scheduling, so each worker count gives the same table
  auto task_seed = [&](int t) {
    const int cell = t / reps;
    const int r = t % reps;
    const std::uint64_t cell_seed = Rng::sub_seed(config.seed, 0x5eed0000ULL + static_cast<std::uint64_t>(cell));
    return Rng::sub_seed(cell_seed, static_cast<std::uint64_t>(r));
  };
  auto run_task = [&](int t) {
    const SettingCell& cell = cells[static_cast<size_t>(t / reps)];
    outcomes[static_cast<size_t>(t)] = run_one_replication(config, C, cell, task_seed(t));
  };

  const int pool = std::max(1, std::min(workers, tasks));
  if (pool == 1) {
    for (int t = 0; t < tasks; ++t) run_task(t);
  } else {
    std::atomic<int> next{0};
    std::vector<std::thread> threads;
    threads.reserve(static_cast<size_t>(pool));
    for (int w = 0; w < pool; ++w)
      threads.emplace_back([&]() {
        for (int t = next.fetch_add(1); t < tasks; t = next.fetch_add(1)) run_task(t);
      });
    for (auto& th : threads) th.join();
  }

  // deterministic fold in task order
  MetricsTable table;
  int total_failed = 0;
  for (size_t ci = 0; ci < cells.size(); ++ci) {
    for (size_t mi = 0; mi < config.methods.size(); ++mi) {
      std::vector<double> fnrs, fprs;
      int failed = 0;
      for (int r = 0; r < reps; ++r) {
        const RepOutcome& o = outcomes[ci * static_cast<size_t>(reps) + static_cast<size_t>(r)];
        if (o.failed) {
          ++failed;
          continue;
        }
        fnrs.push_back(o.scores[mi].first);
        fprs.push_back(o.scores[mi].second);
        if (per_rep)
          per_rep->push_back({r, config.methods[mi], cells[ci].label,
                              o.scores[mi].first, o.scores[mi].second});
      }
      if (mi == 0) total_failed += failed;
      if (fnrs.empty())
        throw Error(ErrorCode::NoConvergedFit,
                    "every replication failed for " + std::string(method_name(config.methods[mi])));
      auto mean = [](const std::vector<double>& v) {
        double s = 0.0;
        for (double x : v) s += x;
        return s / static_cast<double>(v.size());
      };
      auto sdev = [&](const std::vector<double>& v, double m) -> std::optional<double> {
        if (v.size() < 2) return std::nullopt;
        double s = 0.0;
        for (double x : v) s += (x - m) * (x - m);
        return std::sqrt(s / static_cast<double>(v.size() - 1));
      };
      MetricsRow row;
      row.method = config.methods[mi];
      row.beta_label = cells[ci].label;
      row.fnr_mean = mean(fnrs);
      row.fpr_mean = mean(fprs);
      row.fnr_sd = sdev(fnrs, row.fnr_mean);
      row.fpr_sd = sdev(fprs, row.fpr_mean);
      row.failed = failed;
      table.rows.push_back(std::move(row));
    }
  }

  const double failure_rate =
      static_cast<double>(total_failed) / static_cast<double>(tasks);
  if (failure_rate > 0.10)
    throw Error(ErrorCode::NoConvergence,
                std::to_string(total_failed) + " of " + std::to_string(tasks) +
                    " replications failed (over 10%)");

  // ratios per baseline/SPAC pair and cell, from the aggregated means
  const std::pair<Method, Method> pairs[] = {{Method::Lasso, Method::SpacLasso},
                                             {Method::ALasso, Method::SpacALasso},
                                             {Method::Scad, Method::SpacScad}};
  for (const auto& [base, counterpart] : pairs) {
    if (!wants(config, base) || !wants(config, counterpart)) continue;
    for (const auto& cell : cells) {
      const MetricsRow *brow = nullptr, *srow = nullptr;
      for (const auto& row : table.rows) {
        if (row.beta_label != cell.label) continue;
        if (row.method == base) brow = &row;
        if (row.method == counterpart) srow = &row;
      }
      if (!brow || !srow) continue;
      RatioRow ratio;
      ratio.pair = std::string(method_name(base)) + "/" + method_name(counterpart);
      ratio.beta_label = cell.label;
      const double denom = srow->fnr_mean + srow->fpr_mean;
      if (denom > 0.0) ratio.ratio = (brow->fnr_mean + brow->fpr_mean) / denom;
      table.ratios.push_back(std::move(ratio));
    }
  }
  return table;
}

}  // namespace spac
