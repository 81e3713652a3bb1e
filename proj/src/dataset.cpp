#include "spac/dataset.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace spac {

namespace {

bool parse_double(const std::string& field, double& out) {
  const char* begin = field.data();
  const char* end = begin + field.size();
  auto result = std::from_chars(begin, end, out);
  return result.ec == std::errc() && result.ptr == end && !field.empty();
}

void check_finite(const Matrix& X, const Vector& y) {
  if (!X.allFinite() || !y.allFinite())
    throw Error(ErrorCode::NonFiniteInput, "design or response contains NaN/Inf");
}

}  // namespace

Dataset standardize(const Matrix& raw_X, const Vector& raw_y) {
  const Eigen::Index n = raw_X.rows();
  const Eigen::Index p = raw_X.cols();
  if (n != raw_y.size())
    throw Error(ErrorCode::DimensionError,
                "X has " + std::to_string(n) + " rows but y has " +
                    std::to_string(raw_y.size()));
  if (n < 2)
    throw Error(ErrorCode::DimensionError, "need at least 2 rows, got " + std::to_string(n));
  if (p < 1) throw Error(ErrorCode::DimensionError, "design has no columns");
  check_finite(raw_X, raw_y);

  Dataset data;
  data.n = n;
  data.p = p;
  data.X.resize(n, p);
  data.col_means.resize(p);
  data.col_scales.resize(p);

  const double sqrt_n = std::sqrt(static_cast<double>(n));
  for (Eigen::Index j = 0; j < p; ++j) {
    const double mean = raw_X.col(j).mean();
    Vector centered = raw_X.col(j).array() - mean;
    const double scale = centered.norm() / sqrt_n;
    if (scale <= 0.0)
      throw Error(ErrorCode::ZeroVarianceColumn, "column " + std::to_string(j + 1) + " is constant");
    data.col_means[j] = mean;
    data.col_scales[j] = scale;
    data.X.col(j) = centered / scale;
  }

  data.y_mean = raw_y.mean();
  data.y = raw_y.array() - data.y_mean;
  if (data.y.norm() == 0.0)
    throw Error(ErrorCode::AllZeroResponse, "response has zero variance");
  return data;
}

Dataset dataset_from_standardized(const Matrix& X, const Vector& y) {
  const Eigen::Index n = X.rows();
  const Eigen::Index p = X.cols();
  if (n != y.size()) throw Error(ErrorCode::DimensionError, "row count mismatch");
  check_finite(X, y);
  for (Eigen::Index j = 0; j < p; ++j) {
    if (std::abs(X.col(j).sum()) > 1e-8 * n ||
        std::abs(X.col(j).squaredNorm() - static_cast<double>(n)) > 1e-6 * n)
      throw Error(ErrorCode::InvalidArgument,
                  "column " + std::to_string(j + 1) + " is not in the working scale");
  }
  Dataset data;
  data.X = X;
  data.y = y;
  data.n = n;
  data.p = p;
  data.col_means = Vector::Zero(p);
  data.col_scales = Vector::Ones(p);
  data.y_mean = 0.0;
  return data;
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string current;
  auto push = [&]() {
    // trim surrounding whitespace
    size_t b = current.find_first_not_of(" \t\r");
    size_t e = current.find_last_not_of(" \t\r");
    fields.push_back(b == std::string::npos ? "" : current.substr(b, e - b + 1));
    current.clear();
  };
  for (char c : line) {
    if (c == ',')
      push();
    else
      current += c;
  }
  push();
  return fields;
}

Dataset load_csv(const std::string& path, const std::string& response_column) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::ParseError, "cannot open " + path);

  std::string line;
  std::vector<std::vector<double>> rows;
  std::vector<std::string> header;
  bool have_header = false;
  size_t n_fields = 0;
  size_t line_no = 0;

  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    auto fields = split_csv_line(line);
    if (rows.empty() && !have_header) {
      // header row iff some cell is non-numeric
      bool numeric = true;
      double v;
      for (const auto& f : fields)
        if (!parse_double(f, v)) { numeric = false; break; }
      if (!numeric) {
        header = fields;
        have_header = true;
        n_fields = fields.size();
        continue;
      }
      n_fields = fields.size();
    }
    if (fields.size() != n_fields)
      throw Error(ErrorCode::ParseError,
                  "line " + std::to_string(line_no) + ": expected " +
                      std::to_string(n_fields) + " fields, got " +
                      std::to_string(fields.size()));
    std::vector<double> row(n_fields);
    for (size_t j = 0; j < n_fields; ++j) {
      if (!parse_double(fields[j], row[j]))
        throw Error(ErrorCode::ParseError,
                    "line " + std::to_string(line_no) + ": cannot parse '" + fields[j] + "'");
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw Error(ErrorCode::ParseError, path + " has no data rows");

  // resolve the response column: integer means 1-based position
  long resp_idx = -1;
  {
    long idx;
    auto begin = response_column.data();
    auto end = begin + response_column.size();
    auto r = std::from_chars(begin, end, idx);
    if (r.ec == std::errc() && r.ptr == end) {
      if (idx < 1 || static_cast<size_t>(idx) > n_fields)
        throw Error(ErrorCode::MissingColumn,
                    "column index " + response_column + " out of range 1.." +
                        std::to_string(n_fields));
      resp_idx = idx - 1;
    } else {
      if (!have_header)
        throw Error(ErrorCode::MissingColumn,
                    "file has no header row, select the response by index");
      for (size_t j = 0; j < header.size(); ++j)
        if (header[j] == response_column) { resp_idx = static_cast<long>(j); break; }
      if (resp_idx < 0)
        throw Error(ErrorCode::MissingColumn, "no column named '" + response_column + "'");
    }
  }

  const Eigen::Index n = static_cast<Eigen::Index>(rows.size());
  const Eigen::Index p = static_cast<Eigen::Index>(n_fields) - 1;
  if (p < 1) throw Error(ErrorCode::DimensionError, "no predictor columns left");
  Matrix X(n, p);
  Vector y(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    Eigen::Index k = 0;
    for (size_t j = 0; j < n_fields; ++j) {
      if (static_cast<long>(j) == resp_idx)
        y[i] = rows[i][j];
      else
        X(i, k++) = rows[i][j];
    }
  }
  return standardize(X, y);
}

}  // namespace spac
