#include <cmath>
#include <set>

#include "doctest.h"
#include "helpers.hpp"
#include "spac/simulation.hpp"

using namespace spac;
using testutil::error_code_of;

namespace {

SettingConfig small_config() {
  SettingConfig cfg;
  cfg.setting_id = SettingId::Custom;
  cfg.n = 40;
  cfg.p = 10;
  cfg.q = 3;
  cfg.sigma2 = 1.0;
  cfg.beta_values = {0.5, 1.5};
  cfg.alpha = {0.3, 0.2, 0.4};
  cfg.replications = 5;
  cfg.seed = 77;
  cfg.methods = {Method::Lasso,  Method::SpacLasso, Method::ALasso,
                 Method::SpacALasso, Method::Scad,  Method::SpacScad};
  return cfg;
}

bool tables_equal(const MetricsTable& a, const MetricsTable& b) {
  if (a.rows.size() != b.rows.size() || a.ratios.size() != b.ratios.size()) return false;
  for (size_t i = 0; i < a.rows.size(); ++i) {
    const MetricsRow &x = a.rows[i], &y = b.rows[i];
    if (x.method != y.method || x.beta_label != y.beta_label) return false;
    if (x.fnr_mean != y.fnr_mean || x.fpr_mean != y.fpr_mean) return false;
    if (x.fnr_sd.has_value() != y.fnr_sd.has_value()) return false;
    if (x.fnr_sd && *x.fnr_sd != *y.fnr_sd) return false;
    if (x.fpr_sd && *x.fpr_sd != *y.fpr_sd) return false;
    if (x.failed != y.failed) return false;
  }
  for (size_t i = 0; i < a.ratios.size(); ++i) {
    const RatioRow &x = a.ratios[i], &y = b.ratios[i];
    if (x.pair != y.pair || x.beta_label != y.beta_label) return false;
    if (x.ratio.has_value() != y.ratio.has_value()) return false;
    if (x.ratio && *x.ratio != *y.ratio) return false;
  }
  return true;
}

}  // namespace

TEST_SUITE("simulation") {

TEST_CASE("method names round-trip, tolerant parsing") {
  for (Method m : {Method::Lasso, Method::SpacLasso, Method::ALasso, Method::SpacALasso,
                   Method::Scad, Method::SpacScad})
    CHECK(method_from_name(method_name(m)) == m);
  CHECK(method_from_name("spac-lasso") == Method::SpacLasso);
  CHECK(method_from_name("SPAC_LASSO") == Method::SpacLasso);
  CHECK(method_from_name("scad") == Method::Scad);
  CHECK(error_code_of([] { method_from_name("ridge"); }) == ErrorCode::InvalidArgument);
}

TEST_CASE("builtin settings: dimensions and binary columns") {
  SettingConfig s1 = builtin_setting(SettingId::S1, {0.5, 0.7, 0.9}, {0.5});
  CHECK(s1.p == 150);
  CHECK(s1.q == 10);
  CHECK(s1.n == 80);
  CHECK(s1.sigma2 == 1.0);
  CHECK(s1.replications == 100);
  CHECK(s1.methods.size() == 6);
  CHECK(s1.binary_columns.empty());

  SettingConfig s2 = builtin_setting(SettingId::S2, {0.2, 0.4, 0.8}, {1.0});
  CHECK(s2.p == 200);
  CHECK(s2.q == 10);
  CHECK(s2.n == 100);

  SettingConfig s3 = builtin_setting(SettingId::S3, {0.2, 0.4, 0.8}, {0.8, 1.0, 2.0});
  CHECK(s3.p == 200);
  CHECK(s3.q == 9);
  CHECK(s3.n == 100);

  SettingConfig s4 = builtin_setting(SettingId::S4, {0.3, 0.5, 0.8}, {0.5});
  CHECK(s4.p == 150);
  CHECK(s4.q == 10);
  CHECK(s4.n == 100);
  CHECK(s4.binary_columns.size() == 53);
  std::set<Eigen::Index> bins(s4.binary_columns.begin(), s4.binary_columns.end());
  CHECK(bins.count(1) == 1);
  CHECK(bins.count(3) == 1);
  CHECK(bins.count(11) == 1);
  CHECK(bins.count(60) == 1);
  CHECK(bins.count(4) == 0);
  CHECK(bins.count(61) == 0);

  CHECK(error_code_of([] { builtin_setting(SettingId::S3, {0.2, 0.4, 0.8}, {1.0}); }) ==
        ErrorCode::InvalidArgument);
  CHECK(error_code_of([] { builtin_setting(SettingId::S1, {0.2, 0.4, 0.8}, {}); }) ==
        ErrorCode::InvalidArgument);
  CHECK(error_code_of([] { builtin_setting(SettingId::Custom, {0.2, 0.4, 0.8}, {1.0}); }) ==
        ErrorCode::UnknownSetting);
}

TEST_CASE("setting cells: scalar heads and the grouped triple") {
  SettingConfig s1 = builtin_setting(SettingId::S1, {0.5, 0.7, 0.9}, {0.5, 2.0});
  auto cells = setting_cells(s1);
  REQUIRE(cells.size() == 2);
  CHECK(cells[0].label == "0.5");
  CHECK(cells[1].label == "2");
  CHECK(cells[0].beta.size() == 150);
  for (Eigen::Index j = 0; j < 10; ++j) CHECK(cells[0].beta[j] == 0.5);
  for (Eigen::Index j = 10; j < 150; ++j) CHECK(cells[0].beta[j] == 0.0);

  SettingConfig s3 = builtin_setting(SettingId::S3, {0.2, 0.4, 0.8}, {0.8, 1.0, 2.0});
  auto g = setting_cells(s3);
  REQUIRE(g.size() == 1);
  CHECK(g[0].label == "(0.8,1,2)");
  const Vector& beta = g[0].beta;
  CHECK(beta.size() == 200);
  for (Eigen::Index j = 0; j < 3; ++j) CHECK(beta[j] == 0.8);
  for (Eigen::Index j = 3; j < 6; ++j) CHECK(beta[j] == 1.0);
  for (Eigen::Index j = 6; j < 9; ++j) CHECK(beta[j] == 2.0);
  for (Eigen::Index j = 9; j < 200; ++j) CHECK(beta[j] == 0.0);

  SettingConfig zero = small_config();
  zero.beta_values = {0.0};
  CHECK(error_code_of([&] { setting_cells(zero); }) == ErrorCode::DegenerateTruth);
}

TEST_CASE("generate_design: determinism and the working scale") {
  CovarianceModel C = block_exchangeable_cov(3, 8, {0.3, 0.2, 0.4});
  Rng r1(5), r2(5);
  Matrix X1 = generate_design(C, 50, {}, r1);
  Matrix X2 = generate_design(C, 50, {}, r2);
  CHECK(X1 == X2);

  for (Eigen::Index j = 0; j < 8; ++j) {
    CHECK(std::abs(X1.col(j).mean()) < 1e-12);
    CHECK(X1.col(j).squaredNorm() == doctest::Approx(50.0).epsilon(1e-12));
  }

  Rng r3(6);
  CHECK(error_code_of([&] { generate_design(C, 1, {}, r3); }) == ErrorCode::DimensionError);
  CHECK(error_code_of([&] { generate_design(C, 50, {9}, r3); }) == ErrorCode::DimensionError);
  CHECK(error_code_of([&] { generate_design(C, 50, {0}, r3); }) == ErrorCode::DimensionError);
}

TEST_CASE("generate_design: empirical correlation tracks the target") {
  const Eigen::Index n = 2000;
  Rng rng(11);
  CovarianceModel I = explicit_cov(Matrix::Identity(6, 6));
  Matrix X = generate_design(I, n, {}, rng);
  Matrix corr = X.transpose() * X / static_cast<double>(n);
  for (Eigen::Index i = 0; i < 6; ++i)
    for (Eigen::Index j = 0; j < 6; ++j)
      if (i != j) CHECK(std::abs(corr(i, j)) < 0.1);

  CovarianceModel E = block_exchangeable_cov(3, 6, {0.5, 0.2, 0.6});
  Rng rng2(12);
  Matrix Y = generate_design(E, n, {}, rng2);
  Matrix corr2 = Y.transpose() * Y / static_cast<double>(n);
  CHECK(std::abs(corr2(0, 1) - 0.5) < 0.1);
  CHECK(std::abs(corr2(0, 4) - 0.2) < 0.1);
  CHECK(std::abs(corr2(4, 5) - 0.6) < 0.1);
}

TEST_CASE("generate_design: dichotomized columns keep the half/half marginal") {
  const Eigen::Index n = 2000;
  CovarianceModel C = block_exchangeable_cov(2, 6, {0.3, 0.2, 0.4});
  Rng rng(13);
  Matrix X = generate_design(C, n, {1, 4}, rng);
  for (Eigen::Index c : {0, 3}) {
    // standardization is affine, so a binary column has exactly two values
    // and the positive one marks the latent successes
    std::set<double> values(X.col(c).data(), X.col(c).data() + n);
    CHECK(values.size() == 2);
    int ones = 0;
    for (Eigen::Index i = 0; i < n; ++i)
      if (X(i, c) > 0.0) ++ones;
    CHECK(std::abs(static_cast<double>(ones) / n - 0.5) < 0.05);
  }
  // non-binary columns stay continuous
  std::set<double> cont(X.col(1).data(), X.col(1).data() + n);
  CHECK(cont.size() > 100);
}

TEST_CASE("generate_response: noiseless case, noise variance, determinism") {
  CovarianceModel C = explicit_cov(Matrix::Identity(5, 5));
  Rng rng(21);
  Matrix X = generate_design(C, 400, {}, rng);

  SimTruth truth;
  truth.beta = Vector::Zero(5);
  truth.beta[0] = 2.0;
  truth.beta[2] = -1.0;
  truth.q = 2;
  truth.sigma2 = 0.0;
  Rng noise1(31);
  Vector y = generate_response(X, truth, noise1);
  Vector expect = X * truth.beta;
  expect.array() -= expect.mean();
  for (Eigen::Index i = 0; i < 400; ++i)
    CHECK(y[i] == doctest::Approx(expect[i]).epsilon(1e-12));

  SimTruth pure;
  pure.beta = Vector::Zero(5);
  pure.sigma2 = 2.0;
  Rng noise2(32);
  Matrix X2 = generate_design(C, 2000, {}, noise2);
  Vector y2 = generate_response(X2, pure, noise2);
  const double var = y2.squaredNorm() / 2000.0;
  CHECK(var == doctest::Approx(2.0).epsilon(0.15));

  Rng a(33), b(33);
  Vector ya = generate_response(X, truth, a);
  Vector yb = generate_response(X, truth, b);
  CHECK(ya == yb);

  SimTruth wrong;
  wrong.beta = Vector::Zero(3);
  CHECK(error_code_of([&] { generate_response(X, wrong, a); }) == ErrorCode::DimensionError);
}

TEST_CASE("fnr_fpr: frozen examples and the zero threshold") {
  Vector truth(4);
  truth << 1.0, 1.0, 0.0, 0.0;

  Vector perfect = truth;
  auto [fnr0, fpr0] = fnr_fpr(perfect, truth);
  CHECK(fnr0 == 0.0);
  CHECK(fpr0 == 0.0);

  Vector empty = Vector::Zero(4);
  auto [fnr1, fpr1] = fnr_fpr(empty, truth);
  CHECK(fnr1 == 1.0);
  CHECK(fpr1 == 0.0);

  Vector crossed(4);
  crossed << 1.0, 0.0, 1.0, 0.0;
  auto [fnr2, fpr2] = fnr_fpr(crossed, truth);
  CHECK(fnr2 == 0.5);
  CHECK(fpr2 == 0.5);

  Vector tiny(4);
  tiny << 1.0, 1e-11, 1e-9, 0.0;  // 1e-11 counts as zero, 1e-9 does not
  auto [fnr3, fpr3] = fnr_fpr(tiny, truth);
  CHECK(fnr3 == 0.5);
  CHECK(fpr3 == 0.5);

  CHECK(error_code_of([&] { fnr_fpr(Vector::Zero(3), truth); }) == ErrorCode::DimensionError);
  CHECK(error_code_of([&] { fnr_fpr(empty, Vector::Zero(4)); }) == ErrorCode::DegenerateTruth);
  CHECK(error_code_of([&] { fnr_fpr(empty, Vector::Ones(4)); }) == ErrorCode::DegenerateTruth);
}

TEST_CASE("run_setting: layout, bounds, ratio definition") {
  SettingConfig cfg = small_config();
  MetricsTable table = run_setting(cfg, 1);

  CHECK(table.rows.size() == 12);  // 2 cells x 6 methods
  CHECK(table.ratios.size() == 6); // 3 pairs x 2 cells
  for (const MetricsRow& row : table.rows) {
    CHECK(row.fnr_mean >= 0.0);
    CHECK(row.fnr_mean <= 1.0);
    CHECK(row.fpr_mean >= 0.0);
    CHECK(row.fpr_mean <= 1.0);
    CHECK(row.fnr_sd.has_value());
    CHECK(row.fpr_sd.has_value());
    CHECK(row.failed == 0);
  }
  for (const RatioRow& ratio : table.ratios) {
    const size_t slash = ratio.pair.find('/');
    REQUIRE(slash != std::string::npos);
    const Method base = method_from_name(ratio.pair.substr(0, slash));
    const Method counter = method_from_name(ratio.pair.substr(slash + 1));
    const MetricsRow *brow = nullptr, *srow = nullptr;
    for (const MetricsRow& row : table.rows) {
      if (row.beta_label != ratio.beta_label) continue;
      if (row.method == base) brow = &row;
      if (row.method == counter) srow = &row;
    }
    REQUIRE(brow != nullptr);
    REQUIRE(srow != nullptr);
    const double denom = srow->fnr_mean + srow->fpr_mean;
    if (denom > 0.0) {
      REQUIRE(ratio.ratio.has_value());
      CHECK(*ratio.ratio ==
            doctest::Approx((brow->fnr_mean + brow->fpr_mean) / denom).epsilon(1e-12));
    } else {
      CHECK_FALSE(ratio.ratio.has_value());
    }
  }
}

TEST_CASE("run_setting: deterministic across runs and worker counts") {
  SettingConfig cfg = small_config();
  cfg.replications = 4;
  std::vector<RepScore> rep1, rep4;
  MetricsTable serial = run_setting(cfg, 1, &rep1);
  MetricsTable again = run_setting(cfg, 1);
  MetricsTable pooled = run_setting(cfg, 4, &rep4);
  CHECK(tables_equal(serial, again));
  CHECK(tables_equal(serial, pooled));

  REQUIRE(rep1.size() == rep4.size());
  for (size_t i = 0; i < rep1.size(); ++i) {
    CHECK(rep1[i].replication == rep4[i].replication);
    CHECK(rep1[i].method == rep4[i].method);
    CHECK(rep1[i].beta_label == rep4[i].beta_label);
    CHECK(rep1[i].fnr == rep4[i].fnr);
    CHECK(rep1[i].fpr == rep4[i].fpr);
  }

  SettingConfig other = cfg;
  other.seed = 78;
  CHECK_FALSE(tables_equal(serial, run_setting(other, 1)));
}

TEST_CASE("run_setting: single replication reports no spread") {
  SettingConfig cfg = small_config();
  cfg.replications = 1;
  cfg.beta_values = {1.0};
  cfg.methods = {Method::Lasso, Method::SpacLasso};
  MetricsTable table = run_setting(cfg, 1);
  REQUIRE(table.rows.size() == 2);
  for (const MetricsRow& row : table.rows) {
    CHECK_FALSE(row.fnr_sd.has_value());
    CHECK_FALSE(row.fpr_sd.has_value());
  }
  CHECK(table.ratios.size() == 1);
}

TEST_CASE("run_setting: wide regime pipeline") {
  SettingConfig cfg;
  cfg.n = 15;
  cfg.p = 20;
  cfg.q = 3;
  cfg.beta_values = {2.0};
  cfg.alpha = {0.3, 0.2, 0.4};
  cfg.replications = 2;
  cfg.seed = 5;
  cfg.methods = {Method::SpacLasso, Method::SpacALasso};
  MetricsTable table = run_setting(cfg, 1);
  CHECK(table.rows.size() == 2);
  for (const MetricsRow& row : table.rows) {
    CHECK(row.fnr_mean >= 0.0);
    CHECK(row.fnr_mean <= 1.0);
    CHECK(row.fpr_mean >= 0.0);
    CHECK(row.fpr_mean <= 1.0);
  }
}

TEST_CASE("run_setting: configuration guards") {
  SettingConfig cfg = small_config();
  cfg.replications = 0;
  CHECK(error_code_of([&] { run_setting(cfg, 1); }) == ErrorCode::InvalidArgument);

  cfg = small_config();
  cfg.methods.clear();
  CHECK(error_code_of([&] { run_setting(cfg, 1); }) == ErrorCode::InvalidArgument);

  cfg = small_config();
  cfg.q = cfg.p;
  CHECK(error_code_of([&] { run_setting(cfg, 1); }) == ErrorCode::DimensionError);
}

}  // TEST_SUITE
