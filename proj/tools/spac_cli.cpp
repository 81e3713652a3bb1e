// Command-line front end. One binary, five subcommands:
//   fit        penalized fit of a CSV dataset, fixed lambda or BIC path
//   simulate   Monte-Carlo selection study (built-in or custom settings)
//   check      irrepresentable-condition audit and sufficient checks
//   gencov     emit a correlation matrix (generated or structured)
//   precision  precision-diagonal estimate for a CSV design
//
// JSON goes to standard output; --out-csv adds a CSV rendering with a
// sibling <path>.manifest.json. Exit codes: 0 ok, 1 usage, 2 computation.

#include <cstdint>
#include <ctime>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "spac/conditions.hpp"
#include "spac/simulation.hpp"
#include "spac/solver.hpp"

using spac::Error;
using spac::ErrorCode;
using spac::Matrix;
using spac::Vector;
using json = nlohmann::ordered_json;

#ifndef SPAC_CLI_VERSION
#define SPAC_CLI_VERSION "0.0.0"
#endif

namespace {

// ---- shared plumbing -------------------------------------------------------

struct GlobalOpts {
  std::uint64_t seed = 0;
  int workers = 0;  // 0 = all available
  std::string out_csv;
  bool quiet = false;
};

std::string join_argv(int argc, char** argv) {
  std::string s;
  for (int i = 0; i < argc; ++i) {
    if (i) s += ' ';
    s += argv[i];
  }
  return s;
}

// FNV-1a over the file bytes; an integrity hint for the manifest, not crypto.
std::string file_digest(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::ParseError, "cannot open " + path);
  std::uint64_t h = 1469598103934665603ull;
  char c;
  while (in.get(c)) {
    h ^= static_cast<unsigned char>(c);
    h *= 1099511628211ull;
  }
  char buf[20];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return std::string("fnv1a64:") + buf;
}

std::string utc_now() {
  std::time_t t = std::time(nullptr);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&t));
  return buf;
}

json make_manifest(const std::string& command, std::uint64_t seed,
                   const std::vector<std::string>& inputs) {
  json digests = json::object();
  for (const std::string& path : inputs) digests[path] = file_digest(path);
  return json{{"command", command},
              {"seed", seed},
              {"versions", std::string("spac ") + SPAC_CLI_VERSION + "; eigen " +
                               std::to_string(EIGEN_WORLD_VERSION) + "." +
                               std::to_string(EIGEN_MAJOR_VERSION) + "." +
                               std::to_string(EIGEN_MINOR_VERSION)},
              {"timestamp", utc_now()},
              {"input_digests", digests}};
}

void emit(const json& result, const std::string& csv_text, const json& manifest,
          const GlobalOpts& g) {
  if (!g.out_csv.empty()) {
    std::ofstream out(g.out_csv);
    if (!out) throw Error(ErrorCode::ParseError, "cannot write " + g.out_csv);
    out << csv_text;
    std::ofstream mout(g.out_csv + ".manifest.json");
    if (!mout) throw Error(ErrorCode::ParseError, "cannot write manifest for " + g.out_csv);
    mout << manifest.dump(2) << "\n";
  }
  if (!g.quiet) {
    json full = result;
    full["manifest"] = manifest;
    std::cout << full.dump(2) << "\n";
  }
}

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::vector<double> parse_double_list(const std::string& text, const char* what) {
  std::vector<double> values;
  std::string cleaned;
  for (char c : text)
    if (c != '[' && c != ']' && c != '"' && c != '\'') cleaned += c;
  std::stringstream ss(cleaned);
  std::string field;
  while (std::getline(ss, field, ',')) {
    try {
      values.push_back(std::stod(field));
    } catch (const std::exception&) {
      throw Error(ErrorCode::InvalidArgument,
                  std::string(what) + ": cannot parse '" + field + "' as a number");
    }
  }
  if (values.empty())
    throw Error(ErrorCode::InvalidArgument, std::string(what) + ": empty list");
  return values;
}

std::array<double, 3> parse_alpha(const std::string& text) {
  auto v = parse_double_list(text, "--alpha");
  if (v.size() != 3)
    throw Error(ErrorCode::InvalidArgument, "--alpha needs exactly three values a1,a2,a3");
  return {v[0], v[1], v[2]};
}

Vector parse_signs(const std::string& text, Eigen::Index q) {
  if (text == "all-plus") return Vector::Ones(q);
  auto v = parse_double_list(text, "--signs");
  if (static_cast<Eigen::Index>(v.size()) != q)
    throw Error(ErrorCode::InvalidArgument,
                "--signs needs q=" + std::to_string(q) + " entries, got " +
                    std::to_string(v.size()));
  Vector s(q);
  for (Eigen::Index i = 0; i < q; ++i) s[i] = v[static_cast<size_t>(i)];
  return s;
}

std::vector<spac::Method> parse_methods(const std::string& text) {
  std::vector<spac::Method> methods;
  std::string cleaned;
  for (char c : text)
    if (c != '[' && c != ']' && c != '"' && c != '\'' && c != ' ' && c != '\t') cleaned += c;
  std::stringstream ss(cleaned);
  std::string field;
  while (std::getline(ss, field, ','))
    if (!field.empty()) methods.push_back(spac::method_from_name(field));
  if (methods.empty()) throw Error(ErrorCode::InvalidArgument, "--methods: empty list");
  return methods;
}

// Plain numeric matrix, no header, rectangular.
Matrix read_matrix_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::ParseError, "cannot open " + path);
  std::vector<std::vector<double>> rows;
  std::string line;
  size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    std::vector<double> row;
    for (const std::string& f : spac::split_csv_line(line)) {
      try {
        row.push_back(std::stod(f));
      } catch (const std::exception&) {
        throw Error(ErrorCode::ParseError,
                    path + ": line " + std::to_string(line_no) + ": bad number '" + f + "'");
      }
    }
    if (!rows.empty() && row.size() != rows.front().size())
      throw Error(ErrorCode::ParseError,
                  path + ": line " + std::to_string(line_no) + " has " +
                      std::to_string(row.size()) + " fields, expected " +
                      std::to_string(rows.front().size()));
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw Error(ErrorCode::ParseError, path + ": no data rows");
  Matrix M(static_cast<Eigen::Index>(rows.size()),
           static_cast<Eigen::Index>(rows.front().size()));
  for (size_t i = 0; i < rows.size(); ++i)
    for (size_t j = 0; j < rows.front().size(); ++j)
      M(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
  return M;
}

std::string matrix_csv(const Matrix& M) {
  std::string out;
  for (Eigen::Index i = 0; i < M.rows(); ++i) {
    for (Eigen::Index j = 0; j < M.cols(); ++j) {
      if (j) out += ',';
      out += num(M(i, j));
    }
    out += '\n';
  }
  return out;
}

json vector_json(const Vector& v) {
  json arr = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) arr.push_back(v[i]);
  return arr;
}

// ---- fit -------------------------------------------------------------------

struct FitOpts {
  std::string data_path;
  std::string response = "y";
  std::string penalty = "lasso";
  bool spac = true;
  double lambda = 0.0;
  bool lambda_given = false;
  bool bic_path = false;
  double a = 3.7;
  double mu = 1.0;
  std::string precision = "auto";
  double tol = 1e-3;
  int max_iter = 1000;
};

void run_fit(const FitOpts& opt, const GlobalOpts& g, const std::string& command) {
  spac::Dataset data = spac::load_csv(opt.data_path, opt.response);
  spac::SolverControls controls;
  controls.tol = opt.tol;
  controls.max_iter = opt.max_iter;

  std::optional<spac::PrecisionDiag> d;
  if (opt.spac) {
    const double lam_d = spac::default_lambda_d(data.n, data.p);
    if (opt.precision == "sample")
      d = spac::sample_precision_diag(data);
    else if (opt.precision == "sqrtlasso")
      d = spac::sqrt_lasso_precision_diag(data, lam_d);
    else
      d = spac::precision_for_regime(data, lam_d);
  }

  spac::PenaltySpec pen = spac::PenaltySpec::lasso(0.0);
  if (opt.penalty == "scad") {
    pen = spac::PenaltySpec::scad(0.0, opt.a);
  } else if (opt.penalty == "alasso") {
    Vector init;
    if (opt.spac)
      init = spac::alasso_initializer(data, *d,
                                      data.n > data.p ? spac::InitMode::LowDim
                                                      : spac::InitMode::HighDim,
                                      {}, controls);
    else
      init = spac::baseline_alasso_initializer(data, {}, controls);
    pen = spac::PenaltySpec::adaptive(0.0, spac::weights_from_initializer(init, opt.mu),
                                      opt.mu);
  }

  spac::SpacFit fit;
  std::string csv;
  if (opt.bic_path) {
    spac::PathFit path = opt.spac ? spac::lambda_path(data, *d, pen, {}, controls)
                                  : spac::baseline_path(data, pen, {}, controls);
    fit = spac::bic_select(path, data);
    csv = "index,lambda,df,converged,iterations,bic\n";
    for (size_t i = 0; i < path.fits.size(); ++i) {
      const spac::SpacFit& f = path.fits[i];
      int df = 0;
      for (Eigen::Index j = 0; j < data.p; ++j)
        if (f.gamma[j] != 0.0) ++df;
      csv += std::to_string(i) + "," + num(path.lambdas[i]) + "," + std::to_string(df) +
             "," + (f.converged ? "true" : "false") + "," + std::to_string(f.iterations) +
             "," + num(path.bic[i]) + "\n";
    }
  } else {
    fit = opt.spac
              ? spac::coordinate_descent_fit(data, *d, pen.with_lambda(opt.lambda),
                                             Vector(), controls)
              : spac::baseline_fit(data, pen, opt.lambda, controls);
    csv = "index,gamma,beta\n";
    for (Eigen::Index j = 0; j < data.p; ++j)
      csv += std::to_string(j + 1) + "," + num(fit.gamma[j]) + "," + num(fit.beta[j]) + "\n";
  }

  json result{{"penalty", opt.penalty},
              {"spac", opt.spac},
              {"gamma", vector_json(fit.gamma)},
              {"beta", vector_json(fit.beta)},
              {"lambda", fit.lambda},
              {"bic", spac::bic_value(data, fit)},
              {"converged", fit.converged},
              {"iterations", fit.iterations}};
  if (d)
    result["precision"] = json{{"method", spac::precision_method_name(d->method)},
                               {"lambda_d", d->lambda_d},
                               {"d", vector_json(d->d)}};
  emit(result, csv, make_manifest(command, g.seed, {opt.data_path}), g);
}

// ---- check -----------------------------------------------------------------

struct CheckOpts {
  std::string cov = "exchangeable";
  std::string alpha_text;
  Eigen::Index q = 0;
  Eigen::Index p = 0;
  std::string signs = "all-plus";
  int corollary = 0;  // 0 = full audit
  double eta = 0.05;
  double l_bound = 1.0;
};

void run_check(const CheckOpts& opt, const GlobalOpts& g, const std::string& command) {
  std::vector<std::string> inputs;
  const bool structured = opt.cov == "exchangeable" || opt.cov == "ar1";
  std::optional<std::array<double, 3>> alpha;
  if (!opt.alpha_text.empty()) alpha = parse_alpha(opt.alpha_text);
  if (structured && !alpha)
    throw Error(ErrorCode::InvalidArgument, "--cov " + opt.cov + " needs --alpha");

  auto build_cov = [&]() -> spac::CovarianceModel {
    if (opt.cov == "exchangeable") return spac::block_exchangeable_cov(opt.q, opt.p, *alpha);
    if (opt.cov == "ar1") return spac::block_ar1_cov(opt.q, opt.p, *alpha);
    inputs.push_back(opt.cov);
    return spac::explicit_cov(read_matrix_csv(opt.cov));
  };

  json result;
  std::string csv;
  if (opt.corollary == 0) {
    spac::CovarianceModel cov = build_cov();
    spac::ConditionReport rep =
        spac::check_irrepresentable(cov, opt.q, parse_signs(opt.signs, opt.q));
    result = json{{"cov", opt.cov},
                  {"p", cov.p},
                  {"q", opt.q},
                  {"original_vector", vector_json(rep.original_vector)},
                  {"transformed_vector", vector_json(rep.transformed_vector)},
                  {"original_weak", rep.original_weak},
                  {"original_strong_margin", rep.original_strong_margin},
                  {"transformed_weak", rep.transformed_weak},
                  {"transformed_strong_margin", rep.transformed_strong_margin}};
    if (alpha) result["alpha"] = json{(*alpha)[0], (*alpha)[1], (*alpha)[2]};
    csv = "index,original,transformed\n";
    for (Eigen::Index i = 0; i < rep.original_vector.size(); ++i)
      csv += std::to_string(i + 1) + "," + num(rep.original_vector[i]) + "," +
             num(rep.transformed_vector[i]) + "\n";
  } else {
    bool holds = false;
    if (opt.corollary == 1) {
      if (!alpha) throw Error(ErrorCode::InvalidArgument, "--corollary 1 needs --alpha");
      holds = spac::exchangeable_sufficient_check(*alpha, opt.l_bound, opt.eta);
    } else if (opt.corollary == 2) {
      if (!alpha) throw Error(ErrorCode::InvalidArgument, "--corollary 2 needs --alpha");
      holds = spac::ar1_sufficient_check(*alpha, opt.eta);
    } else {
      holds = spac::general_sufficient_check(build_cov(), opt.q, opt.eta);
    }
    result = json{{"corollary", opt.corollary}, {"holds", holds}, {"eta", opt.eta}};
    if (opt.corollary == 1) result["l_bound"] = opt.l_bound;
    if (alpha) result["alpha"] = json{(*alpha)[0], (*alpha)[1], (*alpha)[2]};
    csv = "corollary,holds\n" + std::to_string(opt.corollary) + "," +
          (holds ? "true" : "false") + "\n";
  }
  emit(result, csv, make_manifest(command, g.seed, inputs), g);
}

// ---- gencov ----------------------------------------------------------------

struct GencovOpts {
  std::string kind = "random";
  Eigen::Index p = 0;
  Eigen::Index q = 0;
  std::string alpha_text;
  double shift_low = 1.0;
  double shift_high = 2.0;
};

void run_gencov(const GencovOpts& opt, const GlobalOpts& g, const std::string& command) {
  spac::CovarianceModel cov;
  json result{{"kind", opt.kind}, {"p", opt.p}, {"q", opt.q}};
  if (opt.kind == "random") {
    cov = spac::random_c1_covariance(opt.p, opt.q, opt.shift_low, opt.shift_high, g.seed);
    result["shift"] = json{opt.shift_low, opt.shift_high};
    result["seed"] = g.seed;
  } else {
    if (opt.alpha_text.empty())
      throw Error(ErrorCode::InvalidArgument, "--kind " + opt.kind + " needs --alpha");
    const auto alpha = parse_alpha(opt.alpha_text);
    cov = opt.kind == "exchangeable" ? spac::block_exchangeable_cov(opt.q, opt.p, alpha)
                                     : spac::block_ar1_cov(opt.q, opt.p, alpha);
    result["alpha"] = json{alpha[0], alpha[1], alpha[2]};
  }
  json rows = json::array();
  for (Eigen::Index i = 0; i < cov.realized.rows(); ++i)
    rows.push_back(vector_json(cov.realized.row(i)));
  result["matrix"] = rows;
  emit(result, matrix_csv(cov.realized), make_manifest(command, g.seed, {}), g);
}

// ---- precision -------------------------------------------------------------

struct PrecisionOpts {
  std::string data_path;
  std::string response;  // empty = whole file is the design
  std::string method = "auto";
  double lambda_d = -1.0;  // <0 = default_lambda_d(n, p)
};

void run_precision(const PrecisionOpts& opt, const GlobalOpts& g,
                   const std::string& command) {
  spac::Dataset data;
  if (!opt.response.empty()) {
    data = spac::load_csv(opt.data_path, opt.response);
  } else {
    Matrix raw = read_matrix_csv(opt.data_path);
    if (raw.rows() < 2) throw Error(ErrorCode::DimensionError, "need at least 2 rows");
    const double sqrt_n = std::sqrt(static_cast<double>(raw.rows()));
    for (Eigen::Index j = 0; j < raw.cols(); ++j) {
      raw.col(j).array() -= raw.col(j).mean();
      const double scale = raw.col(j).norm() / sqrt_n;
      if (scale <= 0.0)
        throw Error(ErrorCode::ZeroVarianceColumn,
                    "column " + std::to_string(j + 1) + " is constant");
      raw.col(j) /= scale;
    }
    data = spac::dataset_from_standardized(raw, Vector::Zero(raw.rows()));
  }

  const double lam_d =
      opt.lambda_d >= 0.0 ? opt.lambda_d : spac::default_lambda_d(data.n, data.p);
  spac::PrecisionDiag d;
  if (opt.method == "sample")
    d = spac::sample_precision_diag(data);
  else if (opt.method == "ols")
    d = spac::ols_residual_precision_diag(data);
  else if (opt.method == "sqrtlasso")
    d = spac::sqrt_lasso_precision_diag(data, lam_d);
  else
    d = spac::precision_for_regime(data, lam_d);

  json result{{"method", spac::precision_method_name(d.method)},
              {"lambda_d", d.lambda_d},
              {"n", data.n},
              {"p", data.p},
              {"d", vector_json(d.d)}};
  std::string csv;
  for (Eigen::Index j = 0; j < d.d.size(); ++j) csv += num(d.d[j]) + "\n";
  emit(result, csv, make_manifest(command, g.seed, {opt.data_path}), g);
}

// ---- simulate ---------------------------------------------------------------

struct SimulateOpts {
  std::string setting = "1";
  std::string alpha_text;
  std::string beta_s_text;
  std::string beta_triple_text;
  int reps = -1;  // <0 = keep config default
  std::string methods_text;
  std::string per_rep_out;
};

// Declarative key = value file mirroring the study configuration. Lists are
// comma separated; '[' ']' and quotes are tolerated. '#' starts a comment.
spac::SettingConfig parse_custom_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::ParseError, "cannot open " + path);
  spac::SettingConfig cfg;
  cfg.setting_id = spac::SettingId::Custom;
  bool have_n = false, have_p = false, have_q = false, have_beta = false,
       have_alpha = false;

  std::string line;
  size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const size_t hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    const size_t eq = line.find('=');
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    if (eq == std::string::npos)
      throw Error(ErrorCode::ParseError,
                  path + ": line " + std::to_string(line_no) + ": expected key = value");
    auto trim = [](std::string s) {
      const size_t b = s.find_first_not_of(" \t\r");
      const size_t e = s.find_last_not_of(" \t\r");
      return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
    };
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    auto numbers = [&]() { return parse_double_list(value, key.c_str()); };

    if (key == "n") {
      cfg.n = static_cast<Eigen::Index>(numbers().at(0));
      have_n = true;
    } else if (key == "p") {
      cfg.p = static_cast<Eigen::Index>(numbers().at(0));
      have_p = true;
    } else if (key == "q") {
      cfg.q = static_cast<Eigen::Index>(numbers().at(0));
      have_q = true;
    } else if (key == "sigma2") {
      cfg.sigma2 = numbers().at(0);
    } else if (key == "alpha") {
      const auto v = numbers();
      if (v.size() != 3)
        throw Error(ErrorCode::ParseError, path + ": alpha needs three values");
      cfg.alpha = {v[0], v[1], v[2]};
      have_alpha = true;
    } else if (key == "beta_s" || key == "beta_values") {
      cfg.beta_values = numbers();
      have_beta = true;
    } else if (key == "replications") {
      cfg.replications = static_cast<int>(numbers().at(0));
    } else if (key == "seed") {
      cfg.seed = static_cast<std::uint64_t>(numbers().at(0));
    } else if (key == "methods") {
      cfg.methods = parse_methods(value);
    } else if (key == "binary_columns") {
      for (double v : numbers()) cfg.binary_columns.push_back(static_cast<Eigen::Index>(v));
    } else if (key == "cov") {
      std::string cleaned;
      for (char c : value)
        if (c != '"' && c != '\'') cleaned += c;
      if (cleaned == "exchangeable")
        cfg.cov = spac::CovKind::BlockExchangeable;
      else if (cleaned == "ar1")
        cfg.cov = spac::CovKind::BlockAr1;
      else
        throw Error(ErrorCode::ParseError, path + ": cov must be exchangeable or ar1");
    } else {
      throw Error(ErrorCode::ParseError,
                  path + ": line " + std::to_string(line_no) + ": unknown key '" + key + "'");
    }
  }
  if (!have_n || !have_p || !have_q || !have_beta || !have_alpha)
    throw Error(ErrorCode::ParseError, path + ": n, p, q, alpha and beta_s are required");
  return cfg;
}

void run_simulate(const SimulateOpts& opt, const GlobalOpts& g, bool seed_given,
                  const std::string& command) {
  std::vector<std::string> inputs;
  spac::SettingConfig cfg;
  const bool builtin = opt.setting == "1" || opt.setting == "2" || opt.setting == "3" ||
                       opt.setting == "4";
  if (builtin) {
    const spac::SettingId id = opt.setting == "1"   ? spac::SettingId::S1
                               : opt.setting == "2" ? spac::SettingId::S2
                               : opt.setting == "3" ? spac::SettingId::S3
                                                    : spac::SettingId::S4;
    if (opt.alpha_text.empty())
      throw Error(ErrorCode::InvalidArgument, "built-in settings need --alpha");
    std::vector<double> beta_spec;
    if (id == spac::SettingId::S3) {
      if (opt.beta_triple_text.empty())
        throw Error(ErrorCode::InvalidArgument, "setting 3 needs --beta-triple b1,b2,b3");
      beta_spec = parse_double_list(opt.beta_triple_text, "--beta-triple");
    } else {
      if (opt.beta_s_text.empty())
        throw Error(ErrorCode::InvalidArgument,
                    "settings 1, 2 and 4 need --beta-s (comma list of cells)");
      beta_spec = parse_double_list(opt.beta_s_text, "--beta-s");
    }
    cfg = spac::builtin_setting(id, parse_alpha(opt.alpha_text), beta_spec);
  } else {
    cfg = parse_custom_config(opt.setting);
    inputs.push_back(opt.setting);
    if (!opt.alpha_text.empty()) cfg.alpha = parse_alpha(opt.alpha_text);
    if (!opt.beta_s_text.empty())
      cfg.beta_values = parse_double_list(opt.beta_s_text, "--beta-s");
  }
  if (opt.reps >= 0) cfg.replications = opt.reps;
  if (seed_given || cfg.seed == 0) cfg.seed = g.seed;
  if (!opt.methods_text.empty())
    cfg.methods = parse_methods(opt.methods_text);
  else if (cfg.methods.empty())
    cfg.methods = {spac::Method::Lasso,  spac::Method::SpacLasso, spac::Method::ALasso,
                   spac::Method::SpacALasso, spac::Method::Scad,  spac::Method::SpacScad};

  int workers = g.workers;
  if (workers <= 0) workers = std::max(1u, std::thread::hardware_concurrency());

  std::vector<spac::RepScore> per_rep;
  spac::MetricsTable table =
      spac::run_setting(cfg, workers, opt.per_rep_out.empty() ? nullptr : &per_rep);

  json method_names = json::array();
  for (spac::Method m : cfg.methods) method_names.push_back(spac::method_name(m));
  json rows = json::array();
  for (const spac::MetricsRow& row : table.rows) {
    json r{{"method", spac::method_name(row.method)},
           {"beta", row.beta_label},
           {"fnr_mean", row.fnr_mean},
           {"fpr_mean", row.fpr_mean}};
    r["fnr_sd"] = row.fnr_sd ? json(*row.fnr_sd) : json();
    r["fpr_sd"] = row.fpr_sd ? json(*row.fpr_sd) : json();
    r["failed"] = row.failed;
    rows.push_back(r);
  }
  json ratios = json::array();
  for (const spac::RatioRow& row : table.ratios)
    ratios.push_back(json{{"pair", row.pair},
                          {"beta", row.beta_label},
                          {"ratio", row.ratio ? json(*row.ratio) : json()}});
  json result{{"setting", opt.setting},
              {"n", cfg.n},
              {"p", cfg.p},
              {"q", cfg.q},
              {"sigma2", cfg.sigma2},
              {"alpha", json{cfg.alpha[0], cfg.alpha[1], cfg.alpha[2]}},
              {"replications", cfg.replications},
              {"seed", cfg.seed},
              {"workers", workers},
              {"methods", method_names},
              {"rows", rows},
              {"ratios", ratios}};

  std::string csv = "kind,method,beta,fnr_mean,fnr_sd,fpr_mean,fpr_sd,failed,ratio\n";
  for (const spac::MetricsRow& row : table.rows)
    csv += std::string("metrics,") + spac::method_name(row.method) + "," + row.beta_label +
           "," + num(row.fnr_mean) + "," + (row.fnr_sd ? num(*row.fnr_sd) : "") + "," +
           num(row.fpr_mean) + "," + (row.fpr_sd ? num(*row.fpr_sd) : "") + "," +
           std::to_string(row.failed) + ",\n";
  for (const spac::RatioRow& row : table.ratios)
    csv += "ratio," + row.pair + "," + row.beta_label + ",,,,,," +
           (row.ratio ? num(*row.ratio) : "") + "\n";

  if (!opt.per_rep_out.empty()) {
    std::ofstream out(opt.per_rep_out);
    if (!out) throw Error(ErrorCode::ParseError, "cannot write " + opt.per_rep_out);
    out << "replication,method,beta,fnr,fpr\n";
    for (const spac::RepScore& s : per_rep)
      out << s.replication << "," << spac::method_name(s.method) << "," << s.beta_label
          << "," << num(s.fnr) << "," << num(s.fpr) << "\n";
  }
  emit(result, csv, make_manifest(command, cfg.seed, inputs), g);
}

}  // namespace

int main(int argc, char** argv) {
  const std::string command = join_argv(argc, argv);
  GlobalOpts g;
  g.workers = 0;

  CLI::App app{"Semi-standard partial covariance selection toolkit"};
  app.require_subcommand(1);
  app.fallthrough();
  auto* seed_opt =
      app.add_option("--seed", g.seed, "Master seed; all randomness flows from it")
          ->capture_default_str();
  app.add_option("--workers", g.workers,
                 "Worker threads for simulate (0 = all available)")
      ->envname("SPAC_WORKERS")
      ->capture_default_str();
  app.add_option("--out-csv", g.out_csv,
                 "Also write a CSV rendering here, with <path>.manifest.json beside it");
  app.add_flag("--quiet", g.quiet, "Suppress the JSON on standard output");

  FitOpts fit;
  auto* fit_cmd = app.add_subcommand("fit", "Penalized fit of a CSV dataset");
  fit_cmd->add_option("data", fit.data_path, "Input CSV (rows = observations)")
      ->required();
  fit_cmd->add_option("--response", fit.response, "Response column: name or 1-based index")
      ->capture_default_str();
  fit_cmd->add_option("--penalty", fit.penalty, "Penalty family")
      ->check(CLI::IsMember({"lasso", "alasso", "scad"}))
      ->capture_default_str();
  fit_cmd->add_flag("--spac,!--no-spac", fit.spac,
                    "Precision-rescaled fit (default) or plain baseline");
  auto* lambda_opt =
      fit_cmd->add_option("--lambda", fit.lambda, "Fit at this single lambda");
  auto* bic_opt = fit_cmd->add_flag("--bic-path", fit.bic_path,
                                    "Fit a lambda path and pick the BIC minimizer");
  lambda_opt->excludes(bic_opt);
  bic_opt->excludes(lambda_opt);
  fit_cmd->add_option("--a", fit.a, "Concave-penalty shape parameter")
      ->capture_default_str();
  fit_cmd->add_option("--mu", fit.mu, "Adaptive weight exponent")->capture_default_str();
  fit_cmd->add_option("--precision", fit.precision, "Precision-diagonal estimator")
      ->check(CLI::IsMember({"auto", "sample", "sqrtlasso"}))
      ->capture_default_str();
  fit_cmd->add_option("--tol", fit.tol, "Convergence tolerance")->capture_default_str();
  fit_cmd->add_option("--max-iter", fit.max_iter, "Sweep cap")->capture_default_str();

  CheckOpts check;
  auto* check_cmd =
      app.add_subcommand("check", "Irrepresentable-condition audit and sufficient checks");
  check_cmd->add_option("--cov", check.cov, "exchangeable, ar1, or a correlation CSV path")
      ->capture_default_str();
  check_cmd->add_option("--alpha", check.alpha_text, "a1,a2,a3 for structured covariances");
  check_cmd->add_option("--q", check.q, "Leading block size (signal count)")->required();
  check_cmd->add_option("--p", check.p, "Total dimension (structured covariances)");
  check_cmd->add_option("--signs", check.signs, "all-plus or a comma list of +-1")
      ->capture_default_str();
  check_cmd->add_option("--corollary", check.corollary,
                        "Sufficient check: 1 exchangeable, 2 ar1, 3 general")
      ->check(CLI::IsMember({1, 2, 3}));
  check_cmd->add_option("--eta", check.eta, "Margin for the sufficient checks")
      ->capture_default_str();
  check_cmd->add_option("--l-bound", check.l_bound,
                        "Signal magnitude ratio bound for corollary 1")
      ->capture_default_str();

  GencovOpts gencov;
  auto* gencov_cmd = app.add_subcommand("gencov", "Emit a correlation matrix");
  gencov_cmd->add_option("--kind", gencov.kind, "random, exchangeable, or ar1")
      ->check(CLI::IsMember({"random", "exchangeable", "ar1"}))
      ->capture_default_str();
  gencov_cmd->add_option("--p", gencov.p, "Total dimension")->required();
  gencov_cmd->add_option("--q", gencov.q, "Leading block size")->required();
  gencov_cmd->add_option("--alpha", gencov.alpha_text, "a1,a2,a3 for structured kinds");
  gencov_cmd->add_option("--shift-low", gencov.shift_low, "Row shift lower bound (random)")
      ->capture_default_str();
  gencov_cmd->add_option("--shift-high", gencov.shift_high,
                         "Row shift upper bound (random)")
      ->capture_default_str();

  PrecisionOpts precision;
  auto* precision_cmd =
      app.add_subcommand("precision", "Precision-diagonal estimate for a CSV design");
  precision_cmd->add_option("data", precision.data_path, "Input CSV")->required();
  precision_cmd->add_option("--response", precision.response,
                            "Response column to exclude (name or 1-based index)");
  precision_cmd->add_option("--method", precision.method, "Estimator")
      ->check(CLI::IsMember({"auto", "sample", "ols", "sqrtlasso"}))
      ->capture_default_str();
  precision_cmd->add_option("--lambda-d", precision.lambda_d,
                            "Column-regression level (default sqrt(2 log p / n))")
      ->check(CLI::NonNegativeNumber);

  SimulateOpts simulate;
  auto* simulate_cmd = app.add_subcommand("simulate", "Monte-Carlo selection study");
  simulate_cmd
      ->add_option("--setting", simulate.setting, "1|2|3|4 or a custom config file path")
      ->capture_default_str();
  simulate_cmd->add_option("--alpha", simulate.alpha_text, "a1,a2,a3 correlation levels");
  simulate_cmd->add_option("--beta-s", simulate.beta_s_text,
                           "Signal cells, comma list (settings 1, 2, 4)");
  simulate_cmd->add_option("--beta-triple", simulate.beta_triple_text,
                           "Grouped signal triple b1,b2,b3 (setting 3)");
  simulate_cmd->add_option("--reps", simulate.reps, "Replications (default 100)");
  simulate_cmd->add_option("--methods", simulate.methods_text,
                           "Comma list, default all six");
  simulate_cmd->add_option("--per-rep-out", simulate.per_rep_out,
                           "Write per-replication scores to this CSV");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help and friends
    std::cerr << e.what() << "\n\n" << app.help() << "\n";
    return 1;
  }

  try {
    if (fit_cmd->parsed())
      run_fit(fit, g, command);
    else if (check_cmd->parsed())
      run_check(check, g, command);
    else if (gencov_cmd->parsed())
      run_gencov(gencov, g, command);
    else if (precision_cmd->parsed())
      run_precision(precision, g, command);
    else
      run_simulate(simulate, g, seed_opt->count() > 0, command);
  } catch (const Error& e) {
    std::cerr << json{{"error", e.code_name()}, {"message", e.what()}}.dump() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << json{{"error", "Internal"}, {"message", e.what()}}.dump() << "\n";
    return 2;
  }
  return 0;
}
