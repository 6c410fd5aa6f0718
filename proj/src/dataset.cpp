#include "datajoin/dataset.hpp"

#include <algorithm>
#include <cctype>
#include <cerrno>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <numeric>

#include "datajoin/rng.hpp"

namespace datajoin {

void LabeledDataset::validate() const {
  if (x.empty()) throw data_error("labeled dataset is empty");
  if (x.size() != y.size()) throw data_error("labeled dataset: x/y row count mismatch");
  const std::size_t m = x.front().size();
  for (const auto& row : x)
    if (row.size() != m) throw data_error("labeled dataset: ragged feature rows");
  for (const int label : y)
    if (label != -1 && label != 1) throw data_error("labeled dataset: label outside {-1,+1}");
}

void AuxDataset::validate() const {
  if (x.empty()) throw data_error("auxiliary dataset is empty");
  if (!a.empty() && a.size() != x.size())
    throw data_error("auxiliary dataset: x/a row count mismatch");
  const std::size_t m1 = x.front().size();
  for (const auto& row : x)
    if (row.size() != m1) throw data_error("auxiliary dataset: ragged feature rows");
  if (!a.empty()) {
    const std::size_t m2 = a.front().size();
    for (const auto& row : a)
      if (row.size() != m2) throw data_error("auxiliary dataset: ragged auxiliary rows");
  }
}

void FullDataset::validate() const {
  if (x.empty()) throw data_error("dataset is empty");
  if (x.size() != y.size()) throw data_error("dataset: x/y row count mismatch");
  if (!a.empty() && a.size() != x.size()) throw data_error("dataset: x/a row count mismatch");
}

Matrix StandardizationStats::apply(const Matrix& m) const {
  Matrix out(m.size());
  for (std::size_t r = 0; r < m.size(); ++r) {
    if (m[r].size() != mean.size()) throw data_error("standardization: column count mismatch");
    out[r].resize(m[r].size());
    for (std::size_t c = 0; c < m[r].size(); ++c) out[r][c] = (m[r][c] - mean[c]) / scale[c];
  }
  return out;
}

void StandardizationStats::apply_in_place(Vec& row) const {
  if (row.size() != mean.size()) throw data_error("standardization: column count mismatch");
  for (std::size_t c = 0; c < row.size(); ++c) row[c] = (row[c] - mean[c]) / scale[c];
}

StandardizationStats fit_standardization(const Matrix& m) {
  if (m.empty()) throw data_error("standardize: empty matrix");
  const std::size_t cols = m.front().size();
  StandardizationStats s;
  s.mean.assign(cols, 0.0);
  s.scale.assign(cols, 1.0);
  s.constant.assign(cols, 0);
  const double n = static_cast<double>(m.size());
  for (const auto& row : m) {
    if (row.size() != cols) throw data_error("standardize: ragged matrix");
    for (std::size_t c = 0; c < cols; ++c) s.mean[c] += row[c];
  }
  for (std::size_t c = 0; c < cols; ++c) s.mean[c] /= n;
  Vec var(cols, 0.0);
  for (const auto& row : m)
    for (std::size_t c = 0; c < cols; ++c) var[c] += sqr(row[c] - s.mean[c]);
  for (std::size_t c = 0; c < cols; ++c) {
    var[c] /= n;  // population variance
    if (var[c] > 0.0) {
      s.scale[c] = std::sqrt(var[c]);
    } else {
      s.scale[c] = 1.0;
      s.constant[c] = 1;
    }
  }
  return s;
}

std::pair<Matrix, StandardizationStats> standardize(const Matrix& m) {
  StandardizationStats s = fit_standardization(m);
  return {s.apply(m), s};
}

void SplitSpec::validate() const {
  if (!(test_fraction > 0.0 && test_fraction < 1.0))
    throw data_error("split: test_fraction must be in (0,1)");
}

OverlapSplit split_overlap(const FullDataset& full, const SplitSpec& spec) {
  full.validate();
  spec.validate();
  const std::size_t n = full.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  Rng rng = Rng(spec.seed).stream("split");
  rng.shuffle(order);

  const std::size_t n_test = static_cast<std::size_t>(std::llround(spec.test_fraction * static_cast<double>(n)));
  if (n_test >= n) throw data_error("split: test fraction leaves no training rows");
  const std::size_t n_train = n - n_test;
  if (spec.n_p + spec.overlap > n_train)
    throw data_error("split: n_p + overlap exceeds training size");

  OverlapSplit out;
  out.train_rows.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n_train));
  out.test_rows.assign(order.begin() + static_cast<std::ptrdiff_t>(n_train), order.end());

  const std::size_t labeled_count = spec.n_p + spec.overlap;
  for (std::size_t t = 0; t < labeled_count; ++t) {
    const std::size_t r = out.train_rows[t];
    out.labeled.x.push_back(full.x[r]);
    out.labeled.y.push_back(full.y[r]);
  }
  for (std::size_t t = spec.n_p; t < n_train; ++t) {
    const std::size_t r = out.train_rows[t];
    out.aux.x.push_back(full.x[r]);
    out.aux.a.push_back(full.a.empty() ? Vec{} : full.a[r]);
  }
  for (const std::size_t r : out.test_rows) {
    out.test.x.push_back(full.x[r]);
    out.test.a.push_back(full.a.empty() ? Vec{} : full.a[r]);
    out.test.y.push_back(full.y[r]);
  }
  return out;
}

namespace {

std::string trim(const std::string& s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cur;
  for (const char ch : line) {
    if (ch == ',') {
      cells.push_back(trim(cur));
      cur.clear();
    } else {
      cur.push_back(ch);
    }
  }
  cells.push_back(trim(cur));
  return cells;
}

double parse_cell(const std::string& cell, std::size_t row, const std::string& col) {
  errno = 0;
  char* end = nullptr;
  const double v = std::strtod(cell.c_str(), &end);
  if (cell.empty() || end != cell.c_str() + cell.size() || errno == ERANGE || !std::isfinite(v))
    throw data_error("csv: non-numeric cell '" + cell + "' at row " + std::to_string(row) +
                     ", column '" + col + "'");
  return v;
}

int parse_label(double v, std::size_t row) {
  if (v == -1.0 || v == 1.0) return static_cast<int>(v);
  if (v == 0.0) return -1;  // {0,1} labels accepted, 0 maps to -1
  throw data_error("csv: label value " + std::to_string(v) + " at row " + std::to_string(row) +
                   " is not in {-1,0,1}");
}

}  // namespace

std::size_t CsvTable::column(const std::string& name) const {
  for (std::size_t i = 0; i < header.size(); ++i)
    if (header[i] == name) return i;
  throw data_error("csv: column '" + name + "' not found");
}

CsvTable load_csv_table(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw data_error("csv: cannot open '" + path + "'");
  CsvTable table;
  std::string line;
  std::size_t row = 0;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty()) continue;
    const std::vector<std::string> cells = split_line(line);
    if (table.header.empty()) {
      table.header = cells;
      continue;
    }
    ++row;
    if (cells.size() != table.header.size())
      throw data_error("csv: row " + std::to_string(row) + " has " + std::to_string(cells.size()) +
                       " cells, expected " + std::to_string(table.header.size()));
    Vec parsed(cells.size());
    for (std::size_t c = 0; c < cells.size(); ++c)
      parsed[c] = parse_cell(cells[c], row, table.header[c]);
    table.rows.push_back(std::move(parsed));
  }
  if (table.header.empty() || table.rows.empty()) throw data_error("csv: '" + path + "' has no data rows");
  return table;
}

namespace {

Matrix project_columns(const CsvTable& t, const std::vector<std::string>& names) {
  std::vector<std::size_t> idx;
  idx.reserve(names.size());
  for (const auto& n : names) idx.push_back(t.column(n));
  Matrix out(t.rows.size());
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    out[r].reserve(idx.size());
    for (const std::size_t c : idx) out[r].push_back(t.rows[r][c]);
  }
  return out;
}

std::vector<int> project_labels(const CsvTable& t, const std::string& name) {
  const std::size_t c = t.column(name);
  std::vector<int> out(t.rows.size());
  for (std::size_t r = 0; r < t.rows.size(); ++r) out[r] = parse_label(t.rows[r][c], r + 1);
  return out;
}

}  // namespace

namespace {

void append_intercept(Matrix& x) {
  for (auto& row : x) row.push_back(1.0);
}

}  // namespace

LabeledDataset load_labeled_csv(const std::string& path, const CsvSchema& schema) {
  if (!schema.label) throw data_error("csv schema: labeled dataset needs a label column");
  const CsvTable t = load_csv_table(path);
  LabeledDataset d;
  d.x = project_columns(t, schema.features);
  if (schema.add_intercept) append_intercept(d.x);
  d.y = project_labels(t, *schema.label);
  d.validate();
  return d;
}

AuxDataset load_aux_csv(const std::string& path, const CsvSchema& schema) {
  const CsvTable t = load_csv_table(path);
  AuxDataset d;
  d.x = project_columns(t, schema.features);
  if (schema.add_intercept) append_intercept(d.x);
  if (!schema.aux.empty()) d.a = project_columns(t, schema.aux);
  d.validate();
  return d;
}

FullDataset load_full_csv(const std::string& path, const CsvSchema& schema) {
  if (!schema.label) throw data_error("csv schema: full dataset needs a label column");
  const CsvTable t = load_csv_table(path);
  FullDataset d;
  d.x = project_columns(t, schema.features);
  if (schema.add_intercept) append_intercept(d.x);
  if (!schema.aux.empty()) d.a = project_columns(t, schema.aux);
  d.y = project_labels(t, *schema.label);
  d.validate();
  return d;
}

// ---------------------------------------------------------------------------
// Synthetic shift benchmark.

namespace {

constexpr std::size_t kSynthDim = 10;
constexpr double kSynthStddev = 0.2;

// Class-conditional mean direction of each group. Group 1 separates along the
// first coordinate only; group 2 along the all-ones direction, with the
// label-to-sign relation inverted. The inversion is what makes the majority
// flip between source and test an actual shift: a model fit on the
// group-1-dominated labeled data transfers wrongly to the group-2-dominated
// test data unless the auxiliary coordinates are brought in.
Vec group_mean(int group, int label) {
  Vec m(kSynthDim, 0.0);
  if (group == 1) {
    m[0] = static_cast<double>(label);
  } else {
    for (auto& v : m) v = -static_cast<double>(label);
  }
  return m;
}

}  // namespace

Matrix draw_synthetic_group(Rng& rng, std::size_t count, int group, int label) {
  const Vec mean = group_mean(group, label);
  Matrix rows(count);
  for (auto& row : rows) {
    row.resize(kSynthDim);
    for (std::size_t d = 0; d < kSynthDim; ++d) row[d] = rng.normal(mean[d], kSynthStddev);
  }
  return rows;
}

SyntheticData gen_synthetic(std::uint64_t seed) {
  Rng synth = Rng(seed).stream("synth");

  // Source 1: 400 group-1 rows and 20 group-2 rows, class-balanced.
  Matrix x1;
  std::vector<int> y1;
  for (const auto& [group, count] : {std::pair<int, std::size_t>{1, 200}, {2, 10}}) {
    for (const int label : {+1, -1}) {
      Matrix rows = draw_synthetic_group(synth, count, group, label);
      for (auto& r : rows) {
        x1.push_back(std::move(r));
        y1.push_back(label);
      }
    }
  }

  // Source 2: 200 group-1 rows and 2000 group-2 rows, class-balanced.
  Matrix x2;
  std::vector<int> y2;
  for (const auto& [group, count] : {std::pair<int, std::size_t>{1, 100}, {2, 1000}}) {
    for (const int label : {+1, -1}) {
      Matrix rows = draw_synthetic_group(synth, count, group, label);
      for (auto& r : rows) {
        x2.push_back(std::move(r));
        y2.push_back(label);
      }
    }
  }

  SyntheticData out;
  for (std::size_t r = 0; r < x1.size(); ++r) {
    out.labeled.x.push_back({x1[r][0], x1[r][1]});
    out.labeled.y.push_back(y1[r]);
  }

  std::vector<std::size_t> order(x2.size());
  std::iota(order.begin(), order.end(), 0);
  Rng split = Rng(seed).stream("split");
  split.shuffle(order);
  const std::size_t n_aux = static_cast<std::size_t>(0.7 * static_cast<double>(x2.size()));
  for (std::size_t t = 0; t < order.size(); ++t) {
    const std::size_t r = order[t];
    Vec x(x2[r].begin(), x2[r].begin() + 2);
    Vec a(x2[r].begin() + 2, x2[r].end());
    if (t < n_aux) {
      out.aux.x.push_back(std::move(x));
      out.aux.a.push_back(std::move(a));
    } else {
      out.test.x.push_back(std::move(x));
      out.test.a.push_back(std::move(a));
      out.test.y.push_back(y2[r]);
    }
  }
  return out;
}

}  // namespace datajoin
