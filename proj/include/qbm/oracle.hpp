#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <numbers>

#include "qbm/correlators.hpp"
#include "qbm/errors.hpp"
#include "qbm/interference.hpp"
#include "qbm/quadrature.hpp"
#include "qbm/scenario.hpp"

namespace qbm {

/// Reduced propagation kernel for the diagonal of the density matrix,
///   J0(X, Y, t) = exp(i X Y / (2 A) + X^2 Q / (4 A^2)) / (4 pi A),
/// where X is the initial off-diagonal separation and Y the propagated
/// center offset. Accepts complex X so callers may integrate along a
/// contour shifted off the real axis (the kernel is entire in X).
inline std::complex<double> j0(const ScenarioParams& p, std::complex<double> X,
                               double Y, double t) {
  if (t <= 0.0 || !std::isfinite(t)) {
    throw singularity_error(
        "propagation kernel is singular at t = 0; use the identity "
        "P(x, 0) = |alpha(x)|^2 instead");
  }
  const BathCorrelators c = correlator(p, t);
  const std::complex<double> i{0.0, 1.0};
  const std::complex<double> expo =
      i * X * (Y / (2.0 * c.A)) + X * X * (c.Q / (4.0 * c.A * c.A));
  return std::exp(expo) / (4.0 * std::numbers::pi * c.A);
}

inline std::complex<double> j0(const ScenarioParams& p, double X, double Y, double t) {
  return j0(p, std::complex<double>(X, 0.0), Y, t);
}

/// Single-packet initial kernel
///   t1(X, q) = exp(-q^2/(2 sigma^2) - X^2/(8 sigma^2)) / sqrt(2 pi sigma^2),
/// the value of alpha1*(q - X/2) alpha1(q + X/2) for one slit at the origin.
inline std::complex<double> slit_kernel(const ScenarioParams& p,
                                        std::complex<double> X, double q) {
  const double s2 = p.sigma * p.sigma;
  const std::complex<double> expo = -q * q / (2.0 * s2) - X * X / (8.0 * s2);
  return std::exp(expo) / std::sqrt(2.0 * std::numbers::pi * s2);
}

inline double slit_kernel(const ScenarioParams& p, double X, double q) {
  return slit_kernel(p, std::complex<double>(X, 0.0), q).real();
}

/// One shifted copy of the single-packet kernel in the four-term expansion of
/// the two-slit initial kernel. The classical pair carries q-shifts of
/// +-d/2, the interference pair X-shifts of +-d.
struct KernelShift {
  double dX = 0.0;
  double dq = 0.0;
};

inline constexpr std::array<KernelShift, 4> kernel_shifts(double d) {
  return {{{0.0, +0.5 * d}, {0.0, -0.5 * d}, {+d, 0.0}, {-d, 0.0}}};
}

/// Values of the four shifted kernel terms at (X, q), each weighted by
/// norm/2, plus their sum. The sum equals alpha*(q - X/2) alpha(q + X/2).
struct KernelDecomposition {
  std::array<double, 4> term{};
  double sum = 0.0;
};

inline KernelDecomposition kernel_decomposition(const ScenarioParams& p,
                                                double X, double q) {
  const SlitPreparation slits(p);
  const auto shifts = kernel_shifts(p.d);
  KernelDecomposition out;
  for (std::size_t k = 0; k < 4; ++k) {
    out.term[k] = 0.5 * slits.norm *
                  slit_kernel(p, X - shifts[k].dX, q - shifts[k].dq);
    out.sum += out.term[k];
  }
  return out;
}

struct OracleOptions {
  double rel_tol = 1e-9;          ///< per-term relative target
  std::size_t max_segments = 2000;///< outer-integral subdivision budget
  bool throw_on_failure = true;
};

/// Result of the quadrature route. `terms` holds the four shifted-kernel
/// integrals in the order of kernel_shifts: the first two sum to the
/// classical background, the last two to the interference contribution.
struct OracleDensity {
  double value = 0.0;
  double error = 0.0;          ///< accumulated quadrature error estimate
  double imag_residual = 0.0;  ///< |imaginary part| left over; should be ~0
  std::size_t evaluations = 0;
  bool converged = true;
  std::array<std::complex<double>, 4> terms{};
};

namespace detail {

/// Integrates J0(X, x_f + q, t) * weight * t1(X - dX, q - dq) over the
/// (X, q) plane by iterated Gauss-Kronrod quadrature.
///
/// In X the integrand is a complex Gaussian; on the real axis it oscillates
/// with frequency (x_f + q)/(2A), and in the far tail the result sits dozens
/// of orders of magnitude below the integrand scale, where real-axis
/// summation in doubles loses everything to cancellation. The integrand is
/// entire in X and vanishes for |Re X| -> inf, so by Cauchy's theorem the
/// X integration may run along the horizontal line through the saddle of its
/// quadratic exponent, where it is a pure damped Gaussian. The kernel
/// functions themselves are evaluated (at complex X) along that line; no
/// closed-form density expression enters.
template <typename InnerF>
IntegrationResult integrate_term(const ScenarioParams& p, double x_f, double t,
                                 const KernelShift& shift, double weight,
                                 const OracleOptions& opt, InnerF&& integrand) {
  const BathCorrelators c = correlator(p, t);
  const double s2 = p.sigma * p.sigma;

  // X exponent: alpha_x X^2 + beta(q) X + const, with
  //   alpha_x = Q/(4A^2) - 1/(8 sigma^2)  (real, negative)
  //   beta(q) = i (x_f + q)/(2A) + dX/(4 sigma^2)
  const double alpha_x = c.Q / (4.0 * c.A * c.A) - 1.0 / (8.0 * s2);
  const double abs_alpha = -alpha_x;
  const double s_max = 6.0 / std::sqrt(abs_alpha);  // exp(alpha s^2) = e^-36 at the edge

  // q envelopes: the kernel contributes a Gaussian of width sigma around dq;
  // the X integral damps q like a Gaussian of width sqrt(A^2/sigma^2 - 2Q)
  // around -x_f (the Fourier width of the X Gaussian). Integrate over the
  // support of their product.
  const double var1 = s2;
  const double var2 = c.A * c.A / s2 + c.s();
  const double inv_var = 1.0 / var1 + 1.0 / var2;
  const double mu = (shift.dq / var1 - x_f / var2) / inv_var;
  const double sigma_c = 1.0 / std::sqrt(inv_var);
  const double q_lo = mu - 9.5 * sigma_c;
  const double q_hi = mu + 9.5 * sigma_c;

  QuadratureOptions inner_opt;
  inner_opt.rel_tol = 1e-11;
  inner_opt.max_segments = 64;
  inner_opt.throw_on_failure = false;

  std::size_t inner_evals = 0;
  double inner_err_rel = 0.0;

  auto x_integral = [&](double q) {
    // saddle of the X exponent
    const std::complex<double> beta{shift.dX / (4.0 * s2),
                                    (x_f + q) / (2.0 * c.A)};
    const std::complex<double> x_saddle = beta / (2.0 * abs_alpha);
    auto g = [&](double s) {
      const std::complex<double> X = x_saddle + s;
      return integrand(X, q);
    };
    IntegrationResult r = integrate_adaptive(g, -s_max, s_max, inner_opt);
    inner_evals += r.evaluations;
    if (std::abs(r.value) > 0.0) {
      inner_err_rel = std::max(inner_err_rel, r.error / std::abs(r.value));
    }
    return r.value;
  };

  QuadratureOptions outer_opt;
  outer_opt.rel_tol = opt.rel_tol;
  outer_opt.max_segments = opt.max_segments;
  outer_opt.throw_on_failure = false;

  IntegrationResult r = integrate_adaptive(x_integral, q_lo, q_hi, outer_opt);
  r.value *= weight;
  r.error = std::abs(weight) * r.error + inner_err_rel * std::abs(r.value);
  r.abs_integral *= std::abs(weight);
  r.evaluations += inner_evals;
  return r;
}

}  // namespace detail

/// Probability density by direct quadrature of the propagation kernel
/// against the two-slit initial kernel, fully independent of the closed-form
/// densities. Requires t > 0 (the kernel is singular at t = 0).
inline OracleDensity oracle_density(const ScenarioParams& p, double x_f,
                                    double t, const OracleOptions& opt = {}) {
  if (t <= 0.0 || !std::isfinite(t)) {
    throw singularity_error(
        "quadrature route requires t > 0; use P(x, 0) = |alpha(x)|^2");
  }
  const SlitPreparation slits(p);
  const auto shifts = kernel_shifts(p.d);
  OracleDensity out;
  std::complex<double> total{0.0, 0.0};
  double abs_floor_scale = 0.0;
  for (std::size_t k = 0; k < 4; ++k) {
    auto integrand = [&](std::complex<double> X, double q) {
      return j0(p, X, x_f + q, t) *
             slit_kernel(p, X - shifts[k].dX, q - shifts[k].dq);
    };
    IntegrationResult r = detail::integrate_term(
        p, x_f, t, shifts[k], 0.5 * slits.norm, opt, integrand);
    out.terms[k] = r.value;
    out.error += r.error;
    out.evaluations += r.evaluations;
    out.converged = out.converged && r.converged;
    abs_floor_scale = std::max(abs_floor_scale, r.abs_integral);
    total += r.value;
  }
  out.value = total.real();
  out.imag_residual = std::abs(total.imag());
  if (!out.converged && opt.throw_on_failure) {
    throw convergence_error(
        "quadrature route did not converge within the subdivision budget",
        out.value, out.error);
  }
  return out;
}

/// Same quadrature route for a single packet launched at the origin; the
/// result must reproduce the single-packet density P_1(x, t).
inline OracleDensity single_slit_oracle_density(const ScenarioParams& p,
                                                double x_f, double t,
                                                const OracleOptions& opt = {}) {
  if (t <= 0.0 || !std::isfinite(t)) {
    throw singularity_error(
        "quadrature route requires t > 0; use P(x, 0) = |alpha(x)|^2");
  }
  const KernelShift none{0.0, 0.0};
  auto integrand = [&](std::complex<double> X, double q) {
    return j0(p, X, x_f + q, t) * slit_kernel(p, X, q);
  };
  IntegrationResult r =
      detail::integrate_term(p, x_f, t, none, 1.0, opt, integrand);
  OracleDensity out;
  out.terms[0] = r.value;
  out.value = r.value.real();
  out.imag_residual = std::abs(r.value.imag());
  out.error = r.error;
  out.evaluations = r.evaluations;
  out.converged = r.converged;
  if (!out.converged && opt.throw_on_failure) {
    throw convergence_error(
        "quadrature route did not converge within the subdivision budget",
        out.value, out.error);
  }
  return out;
}

}  // namespace qbm
