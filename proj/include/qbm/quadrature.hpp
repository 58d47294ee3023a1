#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <string>
#include <vector>

#include "qbm/errors.hpp"

namespace qbm {

/// Outcome of an adaptive integration. `error` is the accumulated error
/// estimate, `abs_integral` the integral of |f| (the cancellation floor
/// scale: no quadrature in doubles can beat ~eps * abs_integral).
struct IntegrationResult {
  std::complex<double> value{0.0, 0.0};
  double error = 0.0;
  double abs_integral = 0.0;
  std::size_t evaluations = 0;
  bool converged = false;
};

namespace detail {

// 15-point Kronrod nodes and weights on [-1, 1] with the embedded 7-point
// Gauss rule (its nodes are the odd-index Kronrod nodes).
inline constexpr double kGk15Nodes[8] = {
    0.991455371120813, 0.949107912342759, 0.864864423359769,
    0.741531185599394, 0.586087235467691, 0.405845151377397,
    0.207784955007898, 0.000000000000000};
inline constexpr double kGk15WeightsK[8] = {
    0.022935322010529, 0.063092092629979, 0.104790010322250,
    0.140653259715525, 0.169004726639267, 0.190350578064785,
    0.204432940075298, 0.209482141084728};
inline constexpr double kGk15WeightsG[4] = {
    0.129484966168870, 0.279705391489277, 0.381830050505119,
    0.417959183673469};

struct Segment {
  double a = 0.0;
  double b = 0.0;
  std::complex<double> value{0.0, 0.0};
  double error = 0.0;
  double abs_integral = 0.0;
};

template <typename F>
Segment gk15_segment(F&& f, double a, double b) {
  const double c = 0.5 * (a + b);
  const double h = 0.5 * (b - a);
  std::complex<double> kronrod{0.0, 0.0};
  std::complex<double> gauss{0.0, 0.0};
  double resabs = 0.0;

  const std::complex<double> fc = f(c);
  kronrod += kGk15WeightsK[7] * fc;
  gauss += kGk15WeightsG[3] * fc;
  resabs += kGk15WeightsK[7] * std::abs(fc);

  for (int j = 0; j < 7; ++j) {
    const double x = kGk15Nodes[j];
    const std::complex<double> fl = f(c - h * x);
    const std::complex<double> fr = f(c + h * x);
    kronrod += kGk15WeightsK[j] * (fl + fr);
    resabs += kGk15WeightsK[j] * (std::abs(fl) + std::abs(fr));
    if (j % 2 == 1) {
      gauss += kGk15WeightsG[j / 2] * (fl + fr);
    }
  }

  Segment s;
  s.a = a;
  s.b = b;
  s.value = kronrod * h;
  s.error = std::abs(kronrod - gauss) * h;
  s.abs_integral = resabs * h;
  return s;
}

}  // namespace detail

struct QuadratureOptions {
  double rel_tol = 1e-10;
  double abs_tol = 0.0;
  std::size_t max_segments = 2000;
  /// When true, exhausting the budget above tolerance throws
  /// convergence_error instead of returning converged = false.
  bool throw_on_failure = true;
};

/// Adaptive Gauss-Kronrod integration of a complex-valued integrand over
/// [a, b]. Worst-error-first bisection with deterministic tie-breaking, so
/// identical inputs give bit-identical results. Convergence means
/// error <= max(abs_tol, rel_tol * |value|, floor) where floor is the
/// round-off limit 50 * eps * integral(|f|).
template <typename F>
IntegrationResult integrate_adaptive(F&& f, double a, double b,
                                     const QuadratureOptions& opt = {}) {
  if (!(std::isfinite(a) && std::isfinite(b)) || !(a < b)) {
    throw validation_error("integration bounds must be finite with a < b");
  }
  std::vector<detail::Segment> segs;
  segs.reserve(64);
  segs.push_back(detail::gk15_segment(f, a, b));
  std::size_t evals = 15;

  auto totals = [&segs]() {
    std::complex<double> v{0.0, 0.0};
    double e = 0.0;
    double r = 0.0;
    for (const auto& s : segs) {
      v += s.value;
      e += s.error;
      r += s.abs_integral;
    }
    return std::tuple<std::complex<double>, double, double>(v, e, r);
  };

  const double eps = std::numeric_limits<double>::epsilon();
  while (true) {
    auto [value, err, resabs] = totals();
    const double floor = 50.0 * eps * resabs;
    const double tol = std::max({opt.abs_tol, opt.rel_tol * std::abs(value), floor});
    if (err <= tol) {
      IntegrationResult r;
      r.value = value;
      r.error = err;
      r.abs_integral = resabs;
      r.evaluations = evals;
      r.converged = true;
      return r;
    }
    if (segs.size() >= opt.max_segments) {
      if (opt.throw_on_failure) {
        throw convergence_error(
            "adaptive quadrature did not reach tolerance within its segment "
            "budget (" + std::to_string(opt.max_segments) + " segments)",
            std::abs(value), err);
      }
      IntegrationResult r;
      r.value = value;
      r.error = err;
      r.abs_integral = resabs;
      r.evaluations = evals;
      r.converged = false;
      return r;
    }
    std::size_t worst = 0;
    for (std::size_t i = 1; i < segs.size(); ++i) {
      if (segs[i].error > segs[worst].error) worst = i;
    }
    const detail::Segment seg = segs[worst];
    const double mid = 0.5 * (seg.a + seg.b);
    if (!(seg.a < mid && mid < seg.b)) {
      // interval no longer splittable in double precision
      if (opt.throw_on_failure) {
        throw convergence_error(
            "adaptive quadrature hit the resolution limit of double precision",
            std::abs(std::get<0>(totals())), err);
      }
      IntegrationResult r;
      auto [v2, e2, r2] = totals();
      r.value = v2;
      r.error = e2;
      r.abs_integral = r2;
      r.evaluations = evals;
      r.converged = false;
      return r;
    }
    segs[worst] = detail::gk15_segment(f, seg.a, mid);
    segs.push_back(detail::gk15_segment(f, mid, seg.b));
    evals += 30;
  }
}

/// Real-valued convenience wrapper.
template <typename F>
IntegrationResult integrate_adaptive_real(F&& f, double a, double b,
                                          const QuadratureOptions& opt = {}) {
  return integrate_adaptive(
      [&f](double x) { return std::complex<double>(f(x), 0.0); }, a, b, opt);
}

}  // namespace qbm
