#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace smoothsgd {

/// A point in R^d. Dimension is checked by every oracle that consumes one.
using Point = std::vector<double>;
using PointView = std::span<const double>;

/// Precondition or contract violation by the caller (bad parameters, dimension mismatch).
class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A computation produced a non-finite value or left the representable range.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline void require(bool condition, const std::string& message) {
  if (!condition) throw InvalidArgument(message);
}

inline void require_dimension(std::size_t expected, std::size_t actual, const char* what) {
  if (expected != actual) {
    throw InvalidArgument(std::string(what) + ": dimension mismatch (expected " +
                          std::to_string(expected) + ", got " + std::to_string(actual) + ")");
  }
}

inline double dot(PointView a, PointView b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

inline double norm2(PointView a) { return dot(a, a); }
inline double norm(PointView a) { return std::sqrt(norm2(a)); }

inline double dist2(PointView a, PointView b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    s += d * d;
  }
  return s;
}

inline bool all_finite(PointView a) {
  for (double v : a) {
    if (!std::isfinite(v)) return false;
  }
  return true;
}

/// Axis-aligned box, one [lo, hi] interval per coordinate.
struct Box {
  Point lo;
  Point hi;

  static Box cube(std::size_t dimension, double lo, double hi) {
    return Box{Point(dimension, lo), Point(dimension, hi)};
  }

  std::size_t dimension() const { return lo.size(); }

  bool contains(PointView x) const {
    for (std::size_t i = 0; i < x.size(); ++i) {
      if (x[i] < lo[i] || x[i] > hi[i]) return false;
    }
    return true;
  }

  bool operator==(const Box&) const = default;
};

}  // namespace smoothsgd
