#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include "qbm/errors.hpp"

namespace qbm {

/// Uniform grid symmetric about x = 0 with inclusive endpoints.
struct XGrid {
  double half_span = 0.0;
  std::size_t n = 0;

  XGrid() = default;
  XGrid(double half_span_, std::size_t n_) : half_span(half_span_), n(n_) {
    if (!(half_span > 0.0) || !std::isfinite(half_span)) {
      throw validation_error("grid half-span must be finite and positive");
    }
    if (n < 2) {
      throw validation_error("grid needs at least two points");
    }
  }

  double step() const { return 2.0 * half_span / static_cast<double>(n - 1); }

  double point(std::size_t i) const {
    return -half_span + step() * static_cast<double>(i);
  }

  std::vector<double> points() const {
    std::vector<double> xs(n);
    for (std::size_t i = 0; i < n; ++i) xs[i] = point(i);
    return xs;
  }
};

/// Kahan-compensated accumulator. Summation order is fixed by the caller, so
/// results are bit-identical across runs for identical inputs.
class CompensatedSum {
 public:
  void add(double v) {
    const double y = v - c_;
    const double t = s_ + y;
    c_ = (t - s_) - y;
    s_ = t;
  }
  double value() const { return s_; }

 private:
  double s_ = 0.0;
  double c_ = 0.0;
};

/// Trapezoid integral of uniformly sampled values with compensated summation.
inline double trapezoid(const std::vector<double>& values, double step) {
  if (values.size() < 2) {
    throw validation_error("trapezoid needs at least two samples");
  }
  CompensatedSum acc;
  acc.add(0.5 * values.front());
  for (std::size_t i = 1; i + 1 < values.size(); ++i) acc.add(values[i]);
  acc.add(0.5 * values.back());
  return acc.value() * step;
}

}  // namespace qbm
