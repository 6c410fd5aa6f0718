#include <cstdio>
#include <fstream>

#include "doctest.h"

#include "datajoin/dataset.hpp"
#include "datajoin/geometry.hpp"
#include "datajoin/rng.hpp"

using namespace datajoin;

namespace {

std::string write_temp(const std::string& name, const std::string& content) {
  const std::string path = "./" + name;
  std::ofstream out(path);
  out << content;
  return path;
}

}  // namespace

TEST_CASE("standardize: two-point column") {
  auto [z, stats] = standardize({{1.0}, {3.0}});
  CHECK(z[0][0] == doctest::Approx(-1.0));
  CHECK(z[1][0] == doctest::Approx(1.0));
  CHECK(stats.mean[0] == doctest::Approx(2.0));
  CHECK(stats.scale[0] == doctest::Approx(1.0));
}

TEST_CASE("standardize: constant column maps to zeros with scale 1") {
  auto [z, stats] = standardize({{5.0}, {5.0}, {5.0}});
  for (const auto& row : z) CHECK(row[0] == 0.0);
  CHECK(stats.scale[0] == 1.0);
  CHECK(stats.constant[0] == 1);
}

TEST_CASE("standardize: hand-computed population scale") {
  // mean 1.5, population sd 1.5
  auto [z, stats] = standardize({{0.0}, {0.0}, {3.0}, {3.0}});
  CHECK(stats.mean[0] == doctest::Approx(1.5));
  CHECK(stats.scale[0] == doctest::Approx(1.5));
  CHECK(z[0][0] == doctest::Approx(-1.0));
  CHECK(z[2][0] == doctest::Approx(1.0));
}

TEST_CASE("standardize: output columns have mean 0 and unit population variance") {
  Rng rng(7);
  Matrix m(40, Vec(3));
  for (auto& row : m)
    for (auto& v : row) v = rng.normal(2.0, 3.0);
  auto [z, stats] = standardize(m);
  for (std::size_t c = 0; c < 3; ++c) {
    double mean = 0.0, var = 0.0;
    for (const auto& row : z) mean += row[c];
    mean /= static_cast<double>(z.size());
    for (const auto& row : z) var += sqr(row[c] - mean);
    var /= static_cast<double>(z.size());
    CHECK(std::fabs(mean) <= 1e-10);
    CHECK(var == doctest::Approx(1.0).epsilon(1e-9));
  }
  // applying the returned stats reproduces the output bit for bit
  const Matrix again = stats.apply(m);
  for (std::size_t r = 0; r < m.size(); ++r)
    for (std::size_t c = 0; c < 3; ++c) CHECK(again[r][c] == z[r][c]);
}

TEST_CASE("csv: basic parse and column projection") {
  const auto path = write_temp("t_basic.csv", "x1,x2,y\n0,1,1\n1,0,-1\n");
  CsvSchema schema;
  schema.features = {"x1", "x2"};
  schema.label = "y";
  const LabeledDataset d = load_labeled_csv(path, schema);
  CHECK(d.size() == 2);
  CHECK(d.dim() == 2);
  CHECK(d.y[0] == 1);
  CHECK(d.y[1] == -1);

  CsvSchema narrow;
  narrow.features = {"x1"};
  narrow.label = "y";
  const LabeledDataset d1 = load_labeled_csv(path, narrow);
  CHECK(d1.dim() == 1);
  CHECK(d1.x[1][0] == 1.0);
}

TEST_CASE("csv: {0,1} labels map to {-1,+1}") {
  const auto path = write_temp("t_01.csv", "x,y\n2,1\n3,0\n");
  CsvSchema schema;
  schema.features = {"x"};
  schema.label = "y";
  const LabeledDataset d = load_labeled_csv(path, schema);
  CHECK(d.y[0] == 1);
  CHECK(d.y[1] == -1);
}

TEST_CASE("csv: bad label names the row") {
  const auto path = write_temp("t_bad.csv", "x,y\n0,2\n1,-1\n");
  CsvSchema schema;
  schema.features = {"x"};
  schema.label = "y";
  CHECK_THROWS_WITH_AS(load_labeled_csv(path, schema), doctest::Contains("row 1"), data_error);
}

TEST_CASE("csv: schema and parse errors") {
  const auto path = write_temp("t_err.csv", "x,y\n0,1\n");
  CsvSchema schema;
  schema.features = {"nope"};
  schema.label = "y";
  CHECK_THROWS_AS(load_labeled_csv(path, schema), data_error);

  const auto bad = write_temp("t_nonnum.csv", "x,y\nfoo,1\n");
  schema.features = {"x"};
  CHECK_THROWS_WITH_AS(load_labeled_csv(bad, schema), doctest::Contains("column 'x'"), data_error);

  const auto empty = write_temp("t_empty.csv", "");
  CHECK_THROWS_AS(load_labeled_csv(empty, schema), data_error);
  const auto header_only = write_temp("t_header.csv", "x,y\n");
  CHECK_THROWS_AS(load_labeled_csv(header_only, schema), data_error);
}

namespace {

FullDataset toy_full(std::size_t n) {
  FullDataset f;
  for (std::size_t i = 0; i < n; ++i) {
    f.x.push_back({static_cast<double>(i)});
    f.a.push_back({static_cast<double>(10 * i)});
    f.y.push_back(i % 2 == 0 ? 1 : -1);
  }
  return f;
}

}  // namespace

TEST_CASE("split_overlap: sizes and overlap rows") {
  const FullDataset full = toy_full(20);
  SplitSpec spec;
  spec.n_p = 3;
  spec.overlap = 2;
  spec.test_fraction = 0.5;
  spec.seed = 42;
  const OverlapSplit s = split_overlap(full, spec);
  CHECK(s.labeled.size() == 5);
  CHECK(s.aux.size() == 7);
  CHECK(s.test.size() == 10);
  // overlap rows: training positions 3 and 4 appear in both projections
  for (std::size_t t = 0; t < 2; ++t) {
    const Vec& from_labeled = s.labeled.x[spec.n_p + t];
    const Vec& from_aux = s.aux.x[t];
    CHECK(from_labeled == from_aux);
  }
}

TEST_CASE("split_overlap: index sets partition the training block") {
  const FullDataset full = toy_full(30);
  SplitSpec spec;
  spec.n_p = 6;
  spec.overlap = 4;
  spec.test_fraction = 0.3;
  spec.seed = 9;
  const OverlapSplit s = split_overlap(full, spec);
  const std::size_t n_train = s.train_rows.size();
  CHECK(n_train == 21);
  CHECK(s.labeled.size() + s.aux.size() == n_train + spec.overlap);
  // every training row is used by at least one side
  CHECK(s.labeled.size() == spec.n_p + spec.overlap);
  CHECK(s.aux.size() == n_train - spec.n_p);
}

TEST_CASE("split_overlap: deterministic for a fixed seed, disjoint when v=0") {
  const FullDataset full = toy_full(16);
  SplitSpec spec;
  spec.n_p = 4;
  spec.overlap = 0;
  spec.test_fraction = 0.25;
  spec.seed = 77;
  const OverlapSplit a = split_overlap(full, spec);
  const OverlapSplit b = split_overlap(full, spec);
  CHECK(a.train_rows == b.train_rows);
  CHECK(a.test_rows == b.test_rows);
  CHECK(a.labeled.x == b.labeled.x);
  // v = 0: the two projections use disjoint training rows
  for (const auto& xl : a.labeled.x)
    for (const auto& xa : a.aux.x) CHECK(xl != xa);
}

TEST_CASE("split_overlap: size error") {
  const FullDataset full = toy_full(10);
  SplitSpec spec;
  spec.n_p = 7;
  spec.overlap = 2;
  spec.test_fraction = 0.3;
  CHECK_THROWS_AS(split_overlap(full, spec), data_error);
}

TEST_CASE("gen_synthetic: shapes") {
  const SyntheticData d = gen_synthetic(3);
  CHECK(d.labeled.size() == 420);
  CHECK(d.labeled.dim() == 2);
  CHECK(d.aux.size() == 1540);
  CHECK(d.aux.dim_x() == 2);
  CHECK(d.aux.dim_a() == 8);
  CHECK(d.test.size() == 660);
  std::size_t pos = 0;
  for (const int y : d.labeled.y) pos += y == 1;
  CHECK(pos == 210);
}

TEST_CASE("gen_synthetic: deterministic in the seed") {
  const SyntheticData a = gen_synthetic(11);
  const SyntheticData b = gen_synthetic(11);
  CHECK(a.labeled.x == b.labeled.x);
  CHECK(a.aux.a == b.aux.a);
  CHECK(a.test.y == b.test.y);
  const SyntheticData c = gen_synthetic(12);
  CHECK(a.labeled.x != c.labeled.x);
}

TEST_CASE("gen_synthetic: group-1 positive sample mean approaches its center") {
  // 4000 draws split over a few seeds; the center is the first basis vector.
  Vec mean(10, 0.0);
  std::size_t count = 0;
  for (const std::uint64_t seed : {1u, 2u, 3u, 4u}) {
    Rng rng = Rng(seed).stream("synth");
    const Matrix rows = draw_synthetic_group(rng, 1000, 1, +1);
    for (const auto& r : rows) {
      for (std::size_t d = 0; d < 10; ++d) mean[d] += r[d];
      ++count;
    }
  }
  for (auto& v : mean) v /= static_cast<double>(count);
  mean[0] -= 1.0;  // subtract the expected center
  CHECK(p_norm(mean, 2.0) <= 0.05);
}
