// pybind11 surface over the core library. Matrices and vectors cross as
// numpy arrays; optionals as None; errors as spac.Error.

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "spac/conditions.hpp"
#include "spac/simulation.hpp"
#include "spac/solver.hpp"

namespace py = pybind11;
using namespace spac;

PYBIND11_MODULE(_spac, m) {
  m.doc() = "Semi-standard partial covariance selection toolkit";

  py::register_exception<Error>(m, "Error");

  // ---- data ----------------------------------------------------------------
  py::class_<Dataset>(m, "Dataset")
      .def(py::init([](const Matrix& X, const Vector& y) { return standardize(X, y); }),
           py::arg("X"), py::arg("y"),
           "Standardize raw data: columns centered to squared norm n, y centered")
      .def_readonly("X", &Dataset::X)
      .def_readonly("y", &Dataset::y)
      .def_readonly("n", &Dataset::n)
      .def_readonly("p", &Dataset::p)
      .def_readonly("col_means", &Dataset::col_means)
      .def_readonly("col_scales", &Dataset::col_scales)
      .def_readonly("y_mean", &Dataset::y_mean);
  m.def("dataset_from_standardized", &dataset_from_standardized, py::arg("X"), py::arg("y"),
        "Wrap data already in the working scale");
  m.def("load_csv", &load_csv, py::arg("path"), py::arg("response_column"));

  // ---- precision -------------------------------------------------------------
  py::enum_<PrecisionMethod>(m, "PrecisionMethod")
      .value("Sample", PrecisionMethod::Sample)
      .value("OlsResidual", PrecisionMethod::OlsResidual)
      .value("SqrtLasso", PrecisionMethod::SqrtLasso);
  py::class_<PrecisionDiag>(m, "PrecisionDiag")
      .def_readonly("d", &PrecisionDiag::d)
      .def_readonly("method", &PrecisionDiag::method)
      .def_readonly("lambda_d", &PrecisionDiag::lambda_d);
  m.def("sample_precision_diag", &sample_precision_diag, py::arg("data"));
  m.def("ols_residual_precision_diag", &ols_residual_precision_diag, py::arg("data"));
  m.def("sqrt_lasso_precision_diag", &sqrt_lasso_precision_diag, py::arg("data"),
        py::arg("lambda_d"));
  m.def("precision_for_regime", &precision_for_regime, py::arg("data"), py::arg("lambda_d"),
        "Sample form when n > p, sqrt-lasso form otherwise");
  m.def("default_lambda_d", &default_lambda_d, py::arg("n"), py::arg("p"));
  m.def("unit_precision", &unit_precision, py::arg("p"));

  // ---- penalties -------------------------------------------------------------
  py::enum_<PenaltyKind>(m, "PenaltyKind")
      .value("Lasso", PenaltyKind::Lasso)
      .value("ALasso", PenaltyKind::ALasso)
      .value("Scad", PenaltyKind::Scad);
  py::class_<PenaltySpec>(m, "PenaltySpec")
      .def_static("lasso", &PenaltySpec::lasso, py::arg("lambda_"))
      .def_static("adaptive", &PenaltySpec::adaptive, py::arg("lambda_"), py::arg("weights"),
                  py::arg("mu") = 1.0)
      .def_static("scad", &PenaltySpec::scad, py::arg("lambda_"), py::arg("a") = 3.7)
      .def("with_lambda", &PenaltySpec::with_lambda, py::arg("lambda_"))
      .def_readonly("kind", &PenaltySpec::kind)
      .def_property_readonly("lambda_", [](const PenaltySpec& s) { return s.lambda; })
      .def_readonly("weights", &PenaltySpec::weights)
      .def_readonly("mu", &PenaltySpec::mu)
      .def_readonly("a", &PenaltySpec::a);
  m.def("weights_from_initializer", &weights_from_initializer, py::arg("gamma0"),
        py::arg("mu") = 1.0);
  m.def("soft_threshold", &soft_threshold, py::arg("z"), py::arg("threshold"));
  m.def("adaptive_threshold", &adaptive_threshold, py::arg("z"), py::arg("threshold"),
        py::arg("weight"));
  m.def("scad_threshold", &scad_threshold, py::arg("z"), py::arg("threshold"), py::arg("a"));
  m.def("penalty_value", &penalty_value, py::arg("spec"), py::arg("t"), py::arg("j") = 0);

  // ---- solver ----------------------------------------------------------------
  py::class_<SolverControls>(m, "SolverControls")
      .def(py::init<>())
      .def_readwrite("tol", &SolverControls::tol)
      .def_readwrite("max_iter", &SolverControls::max_iter);
  py::class_<PathGrid>(m, "PathGrid")
      .def(py::init<>())
      .def_readwrite("count", &PathGrid::count)
      .def_readwrite("decades", &PathGrid::decades);
  py::enum_<FitSpace>(m, "FitSpace")
      .value("Spac", FitSpace::Spac)
      .value("Beta", FitSpace::Beta);
  py::class_<SpacFit>(m, "SpacFit")
      .def_readonly("gamma", &SpacFit::gamma)
      .def_readonly("beta", &SpacFit::beta)
      .def_property_readonly("lambda_", [](const SpacFit& f) { return f.lambda; })
      .def_readonly("penalty", &SpacFit::penalty)
      .def_readonly("iterations", &SpacFit::iterations)
      .def_readonly("converged", &SpacFit::converged)
      .def_readonly("objective", &SpacFit::objective)
      .def_readonly("space", &SpacFit::space);
  py::class_<PathFit>(m, "PathFit")
      .def_readonly("lambdas", &PathFit::lambdas)
      .def_readonly("fits", &PathFit::fits)
      .def_readonly("bic", &PathFit::bic);

  m.def(
      "coordinate_descent_fit",
      [](const Dataset& data, const PrecisionDiag& d, const PenaltySpec& penalty,
         std::optional<Vector> init, const SolverControls& controls) {
        return coordinate_descent_fit(data, d, penalty, init ? *init : Vector(), controls);
      },
      py::arg("data"), py::arg("d"), py::arg("penalty"), py::arg("init") = std::nullopt,
      py::arg("controls") = SolverControls());
  m.def("objective", &objective, py::arg("data"), py::arg("d"), py::arg("penalty"),
        py::arg("gamma"));
  m.def("lambda_max", &lambda_max, py::arg("data"), py::arg("d"), py::arg("penalty"));
  m.def("lambda_path", &lambda_path, py::arg("data"), py::arg("d"), py::arg("penalty"),
        py::arg("grid") = PathGrid(), py::arg("controls") = SolverControls());
  m.def("bic_value", &bic_value, py::arg("data"), py::arg("fit"));
  m.def("bic_select", &bic_select, py::arg("path"), py::arg("data"));
  m.def("baseline_fit", &baseline_fit, py::arg("data"), py::arg("penalty"),
        py::arg("lambda_"), py::arg("controls") = SolverControls());
  m.def("baseline_path", &baseline_path, py::arg("data"), py::arg("penalty"),
        py::arg("grid") = PathGrid(), py::arg("controls") = SolverControls());
  m.def("ols_fit", &ols_fit, py::arg("data"));
  m.def("beta_from_gamma", &beta_from_gamma, py::arg("gamma"), py::arg("d"));
  py::enum_<InitMode>(m, "InitMode")
      .value("LowDim", InitMode::LowDim)
      .value("HighDim", InitMode::HighDim);
  m.def("alasso_initializer", &alasso_initializer, py::arg("data"), py::arg("d"),
        py::arg("mode"), py::arg("grid") = PathGrid(),
        py::arg("controls") = SolverControls());
  m.def("baseline_alasso_initializer", &baseline_alasso_initializer, py::arg("data"),
        py::arg("grid") = PathGrid(), py::arg("controls") = SolverControls());

  // ---- conditions -------------------------------------------------------------
  py::enum_<CovKind>(m, "CovKind")
      .value("BlockExchangeable", CovKind::BlockExchangeable)
      .value("BlockAr1", CovKind::BlockAr1)
      .value("Explicit", CovKind::Explicit);
  py::class_<CovarianceModel>(m, "CovarianceModel")
      .def_readonly("kind", &CovarianceModel::kind)
      .def_readonly("realized", &CovarianceModel::realized)
      .def_readonly("p", &CovarianceModel::p)
      .def_readonly("q", &CovarianceModel::q)
      .def_readonly("alpha", &CovarianceModel::alpha);
  py::class_<ConditionReport>(m, "ConditionReport")
      .def_readonly("original_vector", &ConditionReport::original_vector)
      .def_readonly("transformed_vector", &ConditionReport::transformed_vector)
      .def_readonly("original_weak", &ConditionReport::original_weak)
      .def_readonly("original_strong_margin", &ConditionReport::original_strong_margin)
      .def_readonly("transformed_weak", &ConditionReport::transformed_weak)
      .def_readonly("transformed_strong_margin", &ConditionReport::transformed_strong_margin);
  m.def("block_exchangeable_cov", &block_exchangeable_cov, py::arg("q"), py::arg("p"),
        py::arg("alpha"));
  m.def("block_ar1_cov", &block_ar1_cov, py::arg("q"), py::arg("p"), py::arg("alpha"));
  m.def("explicit_cov", &explicit_cov, py::arg("C"));
  m.def("check_irrepresentable", &check_irrepresentable, py::arg("C"), py::arg("q"),
        py::arg("signs"));
  m.def("exchangeable_sufficient_check", &exchangeable_sufficient_check, py::arg("alpha"),
        py::arg("l_bound"), py::arg("eta"));
  m.def("ar1_sufficient_check", &ar1_sufficient_check, py::arg("alpha"), py::arg("eta"));
  m.def("general_sufficient_check", &general_sufficient_check, py::arg("C"), py::arg("q"),
        py::arg("eta"));
  m.def("random_c1_covariance", &random_c1_covariance, py::arg("p"), py::arg("q"),
        py::arg("shift_low"), py::arg("shift_high"), py::arg("seed"));

  // ---- simulation ---------------------------------------------------------------
  py::enum_<Method>(m, "Method")
      .value("Lasso", Method::Lasso)
      .value("SpacLasso", Method::SpacLasso)
      .value("ALasso", Method::ALasso)
      .value("SpacALasso", Method::SpacALasso)
      .value("Scad", Method::Scad)
      .value("SpacScad", Method::SpacScad);
  m.def("method_name", &method_name, py::arg("m"));
  m.def("method_from_name", &method_from_name, py::arg("name"));
  py::enum_<SettingId>(m, "SettingId")
      .value("S1", SettingId::S1)
      .value("S2", SettingId::S2)
      .value("S3", SettingId::S3)
      .value("S4", SettingId::S4)
      .value("Custom", SettingId::Custom);
  py::class_<SettingConfig>(m, "SettingConfig")
      .def(py::init<>())
      .def_readwrite("setting_id", &SettingConfig::setting_id)
      .def_readwrite("n", &SettingConfig::n)
      .def_readwrite("p", &SettingConfig::p)
      .def_readwrite("q", &SettingConfig::q)
      .def_readwrite("sigma2", &SettingConfig::sigma2)
      .def_readwrite("beta_values", &SettingConfig::beta_values)
      .def_readwrite("alpha", &SettingConfig::alpha)
      .def_readwrite("replications", &SettingConfig::replications)
      .def_readwrite("seed", &SettingConfig::seed)
      .def_readwrite("methods", &SettingConfig::methods)
      .def_readwrite("binary_columns", &SettingConfig::binary_columns)
      .def_readwrite("cov", &SettingConfig::cov);
  py::class_<MetricsRow>(m, "MetricsRow")
      .def_readonly("method", &MetricsRow::method)
      .def_readonly("beta_label", &MetricsRow::beta_label)
      .def_readonly("fnr_mean", &MetricsRow::fnr_mean)
      .def_readonly("fpr_mean", &MetricsRow::fpr_mean)
      .def_readonly("fnr_sd", &MetricsRow::fnr_sd)
      .def_readonly("fpr_sd", &MetricsRow::fpr_sd)
      .def_readonly("failed", &MetricsRow::failed);
  py::class_<RatioRow>(m, "RatioRow")
      .def_readonly("pair", &RatioRow::pair)
      .def_readonly("beta_label", &RatioRow::beta_label)
      .def_readonly("ratio", &RatioRow::ratio);
  py::class_<MetricsTable>(m, "MetricsTable")
      .def_readonly("rows", &MetricsTable::rows)
      .def_readonly("ratios", &MetricsTable::ratios);
  py::class_<RepScore>(m, "RepScore")
      .def_readonly("replication", &RepScore::replication)
      .def_readonly("method", &RepScore::method)
      .def_readonly("beta_label", &RepScore::beta_label)
      .def_readonly("fnr", &RepScore::fnr)
      .def_readonly("fpr", &RepScore::fpr);
  py::class_<SettingCell>(m, "SettingCell")
      .def_readonly("label", &SettingCell::label)
      .def_readonly("beta", &SettingCell::beta);
  m.def("setting_cells", &setting_cells, py::arg("config"));
  m.def("builtin_setting", &builtin_setting, py::arg("id"), py::arg("alpha"),
        py::arg("beta_spec"));
  m.def(
      "generate_design",
      [](const CovarianceModel& C, Eigen::Index n,
         const std::vector<Eigen::Index>& binary_columns, std::uint64_t seed) {
        Rng rng(seed);
        return generate_design(C, n, binary_columns, rng);
      },
      py::arg("C"), py::arg("n"), py::arg("binary_columns"), py::arg("seed"));
  m.def(
      "run_setting",
      [](const SettingConfig& config, int workers) { return run_setting(config, workers); },
      py::arg("config"), py::arg("workers") = 1,
      py::call_guard<py::gil_scoped_release>());
  m.def(
      "run_setting_with_scores",
      [](const SettingConfig& config, int workers) {
        std::vector<RepScore> per_rep;
        MetricsTable table = run_setting(config, workers, &per_rep);
        return std::make_pair(table, per_rep);
      },
      py::arg("config"), py::arg("workers") = 1,
      py::call_guard<py::gil_scoped_release>());

  m.def("fnr_fpr", &fnr_fpr, py::arg("beta_hat"), py::arg("beta_true"),
        "(false negative rate, false positive rate) against a ground truth");
}
