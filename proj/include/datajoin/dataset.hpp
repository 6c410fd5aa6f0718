#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "datajoin/common.hpp"

namespace datajoin {

// Labeled anchor dataset: rows (x, y) with y in {-1, +1}.
struct LabeledDataset {
  Matrix x;
  std::vector<int> y;

  std::size_t size() const { return x.size(); }
  std::size_t dim() const { return x.empty() ? 0 : x.front().size(); }
  void validate() const;
};

// Auxiliary anchor dataset: rows (x, a). The a-block may be empty (m2 = 0).
struct AuxDataset {
  Matrix x;
  Matrix a;

  std::size_t size() const { return x.size(); }
  std::size_t dim_x() const { return x.empty() ? 0 : x.front().size(); }
  std::size_t dim_a() const { return a.empty() ? 0 : a.front().size(); }
  void validate() const;
};

// Rows carrying all three of (x, a, y); the source for splits and test sets.
struct FullDataset {
  Matrix x;
  Matrix a;
  std::vector<int> y;

  std::size_t size() const { return x.size(); }
  std::size_t dim_x() const { return x.empty() ? 0 : x.front().size(); }
  std::size_t dim_a() const { return a.empty() || a.front().empty() ? 0 : a.front().size(); }
  void validate() const;
};

// Per-column location/scale fitted on training data and reused verbatim on
// test data. Scale is the population standard deviation; constant columns are
// recorded and mapped to scale 1 so they standardize to zeros.
struct StandardizationStats {
  Vec mean;
  Vec scale;
  std::vector<std::uint8_t> constant;

  std::size_t cols() const { return mean.size(); }
  Matrix apply(const Matrix& m) const;
  void apply_in_place(Vec& row) const;
};

StandardizationStats fit_standardization(const Matrix& m);

// Returns the standardized matrix together with the fitted stats.
std::pair<Matrix, StandardizationStats> standardize(const Matrix& m);

struct SplitSpec {
  std::size_t n_p = 0;           // labeled-only rows
  std::size_t overlap = 0;       // rows present in both datasets
  double test_fraction = 0.3;    // in (0, 1)
  std::uint64_t seed = 0;
  void validate() const;
};

struct OverlapSplit {
  LabeledDataset labeled;   // first n_p + overlap training rows, projected to (x, y)
  AuxDataset aux;           // training rows n_p.. , projected to (x, a)
  FullDataset test;
  std::vector<std::size_t> train_rows;  // row ids of `full` in training order
  std::vector<std::size_t> test_rows;
};

// Seeded shuffle into train/test, then the overlapping projection of the
// training block onto the two anchor datasets.
OverlapSplit split_overlap(const FullDataset& full, const SplitSpec& spec);

// CSV ingestion. The header row is mandatory; cells are parsed as doubles
// with '.' decimal separator. Label columns accept {-1, +1} or {0, 1}
// (0 maps to -1).
struct CsvTable {
  std::vector<std::string> header;
  Matrix rows;

  std::size_t column(const std::string& name) const;  // throws data_error if absent
};

CsvTable load_csv_table(const std::string& path);

struct CsvSchema {
  std::vector<std::string> features;
  std::optional<std::string> label;
  std::vector<std::string> aux;
  bool add_intercept = false;  // append a constant-1 feature column
};

LabeledDataset load_labeled_csv(const std::string& path, const CsvSchema& schema);
AuxDataset load_aux_csv(const std::string& path, const CsvSchema& schema);
FullDataset load_full_csv(const std::string& path, const CsvSchema& schema);

// Synthetic two-group distribution-shift benchmark. Ten-dimensional points,
// two groups with opposite majority composition between the labeled source
// (400 vs 20 rows) and the unlabeled/test source (200 vs 2000 rows). The
// labeled dataset keeps only the first two coordinates; the remaining eight
// become auxiliary features of the unlabeled dataset.
struct SyntheticData {
  LabeledDataset labeled;  // m1 = 2
  AuxDataset aux;          // 70% of the second source, a-block of size 8
  FullDataset test;        // remaining 30%, with labels
};

SyntheticData gen_synthetic(std::uint64_t seed);

class Rng;

// Raw sampler behind gen_synthetic, exposed so tests can probe the
// group-conditional distributions directly.
Matrix draw_synthetic_group(Rng& rng, std::size_t count, int group, int label);

}  // namespace datajoin
