#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace datajoin {

using Vec = std::vector<double>;
using Matrix = std::vector<std::vector<double>>;

// Raised for malformed inputs: missing files, bad schemas, unparseable cells,
// dimension mismatches. The CLI maps it to exit code 2.
struct data_error : std::runtime_error {
  explicit data_error(const std::string& msg) : std::runtime_error(msg) {}
};

// Raised when an algorithm fails numerically (NaN objective, solver did not
// terminate). The CLI maps it to exit code 3.
struct numeric_error : std::runtime_error {
  explicit numeric_error(const std::string& msg) : std::runtime_error(msg) {}
};

inline double dot(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw data_error("dot: dimension mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

inline void axpy(double c, std::span<const double> x, Vec& y) {
  if (x.size() != y.size()) throw data_error("axpy: dimension mismatch");
  for (std::size_t i = 0; i < x.size(); ++i) y[i] += c * x[i];
}

inline Vec sub(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw data_error("sub: dimension mismatch");
  Vec r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] - b[i];
  return r;
}

inline double sqr(double x) { return x * x; }

}  // namespace datajoin
