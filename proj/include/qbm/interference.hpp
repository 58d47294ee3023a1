#pragma once

#include <cmath>
#include <numbers>
#include <vector>

#include "qbm/correlators.hpp"
#include "qbm/errors.hpp"
#include "qbm/grid.hpp"
#include "qbm/scenario.hpp"

namespace qbm {

/// Normalized two-slit preparation: the initial wave function is a symmetric
/// sum of two Gaussians of width 2*sigma centered at +-d/2,
///   alpha(x) = sqrt(norm) / (8 pi sigma^2)^{1/4}
///              * (exp(-(x-d/2)^2/(4 sigma^2)) + exp(-(x+d/2)^2/(4 sigma^2)))
/// with norm = 1 / (1 + exp(-d^2/(8 sigma^2))) compensating the overlap.
struct SlitPreparation {
  double sigma = 0.0;
  double d = 0.0;
  double norm = 0.0;

  explicit SlitPreparation(const ScenarioParams& p) : sigma(p.sigma), d(p.d) {
    norm = 1.0 / (1.0 + std::exp(-d * d / (8.0 * sigma * sigma)));
  }

  double alpha(double x) const {
    const double s2 = sigma * sigma;
    const double pre =
        std::sqrt(norm) / std::pow(8.0 * std::numbers::pi * s2, 0.25);
    const double up = x - 0.5 * d;
    const double dn = x + 0.5 * d;
    return pre * (std::exp(-up * up / (4.0 * s2)) +
                  std::exp(-dn * dn / (4.0 * s2)));
  }

  /// |alpha(x)|^2, the t = 0 probability density.
  double alpha_density(double x) const {
    const double a = alpha(x);
    return a * a;
  }
};

/// ln of the single-packet density P_1(x, t) = exp(-x^2/(2 w^2)) / sqrt(2 pi w^2).
inline double log_single_slit_density(const ScenarioParams& p, double x, double t) {
  const double w2 = width_squared(p, t);
  return -0.5 * std::log(2.0 * std::numbers::pi * w2) - x * x / (2.0 * w2);
}

inline double single_slit_density(const ScenarioParams& p, double x, double t) {
  return std::exp(log_single_slit_density(p, x, t));
}

/// Incoherent two-slit background and its per-slit parts:
///   part_minus(x) = norm * P_1(x - d/2, t)   (packet launched at +d/2)
///   part_plus(x)  = norm * P_1(x + d/2, t)   (packet launched at -d/2)
///   background    = (part_minus + part_plus) / 2
struct ClassicalDensity {
  double background = 0.0;
  double part_minus = 0.0;
  double part_plus = 0.0;
};

inline ClassicalDensity classical_density(const ScenarioParams& p, double x, double t) {
  const SlitPreparation slits(p);
  ClassicalDensity c;
  c.part_minus = slits.norm * single_slit_density(p, x - 0.5 * p.d, t);
  c.part_plus = slits.norm * single_slit_density(p, x + 0.5 * p.d, t);
  c.background = 0.5 * (c.part_minus + c.part_plus);
  return c;
}

inline double log_classical_density(const ScenarioParams& p, double x, double t) {
  const SlitPreparation slits(p);
  const double lm = std::log(slits.norm) + log_single_slit_density(p, x - 0.5 * p.d, t);
  const double lp = std::log(slits.norm) + log_single_slit_density(p, x + 0.5 * p.d, t);
  const double hi = std::max(lm, lp);
  const double lo = std::min(lm, lp);
  return hi + std::log1p(std::exp(lo - hi)) - std::log(2.0);
}

/// ln of the fringe envelope amplitude
///   P_int(x, t) = norm / sqrt(2 pi w^2)
///                 * exp(-[x^2 + d^2 (sigma^2 - 2Q)/(4 sigma^2)] / (2 w^2)).
inline double log_interference_amplitude(const ScenarioParams& p, double x, double t) {
  const SlitPreparation slits(p);
  const BathCorrelators c = correlator(p, t);
  const double w2 = width_squared(p, t);
  const double s2 = p.sigma * p.sigma;
  const double shift = p.d * p.d * (s2 + c.s()) / (4.0 * s2);
  return std::log(slits.norm) -
         0.5 * std::log(2.0 * std::numbers::pi * w2) -
         (x * x + shift) / (2.0 * w2);
}

inline double interference_amplitude(const ScenarioParams& p, double x, double t) {
  return std::exp(log_interference_amplitude(p, x, t));
}

/// Fringe phase phi(x, t) = x d A / (2 sigma^2 w^2).
inline double fringe_phase(const ScenarioParams& p, double x, double t) {
  const BathCorrelators c = correlator(p, t);
  const double w2 = width_squared(p, t);
  return x * p.d * c.A / (2.0 * p.sigma * p.sigma * w2);
}

/// Full double-slit density
///   P(x, t) = P_cl(x, t) + P_int(x, t) cos(phi(x, t)).
inline double total_density(const ScenarioParams& p, double x, double t) {
  return classical_density(p, x, t).background +
         interference_amplitude(p, x, t) * std::cos(fringe_phase(p, x, t));
}

// ---------------------------------------------------------------------------
// Attenuation factors at the pattern center, computed in the log domain.
//
// Both closed forms follow from the definitions by cancelling the common
// gaussian prefactors:
//   ln a_vs_classical   = ln P_int(0,t) - ln P_cl(0,t)   = Q d^2 / (4 sigma^2 w^2)
//   ln a_vs_single_slit = ln P_int(0,t) - ln(norm P_1(0,t))
//                       = -d^2 (sigma^2 - 2Q) / (8 sigma^2 w^2)
// They never underflow for valid parameters; the linear accessors exponentiate.
// ---------------------------------------------------------------------------

inline double log_attenuation_vs_classical(const ScenarioParams& p, double t) {
  const BathCorrelators c = correlator(p, t);
  const double w2 = width_squared(p, t);
  const double s2 = p.sigma * p.sigma;
  return c.Q * p.d * p.d / (4.0 * s2 * w2);
}

inline double attenuation_vs_classical(const ScenarioParams& p, double t) {
  return std::exp(log_attenuation_vs_classical(p, t));
}

inline double log_attenuation_vs_single_slit(const ScenarioParams& p, double t) {
  const BathCorrelators c = correlator(p, t);
  const double w2 = width_squared(p, t);
  const double s2 = p.sigma * p.sigma;
  return -p.d * p.d * (s2 + c.s()) / (8.0 * s2 * w2);
}

inline double attenuation_vs_single_slit(const ScenarioParams& p, double t) {
  return std::exp(log_attenuation_vs_single_slit(p, t));
}

/// x-resolved variant of the classical-reference attenuation,
/// P_int(x,t) / sqrt(part_plus * part_minus); provably independent of x and
/// equal to attenuation_vs_classical. Exposed as a diagnostic.
inline double log_attenuation_vs_classical_at(const ScenarioParams& p, double x, double t) {
  const SlitPreparation slits(p);
  const double lm = std::log(slits.norm) + log_single_slit_density(p, x - 0.5 * p.d, t);
  const double lp = std::log(slits.norm) + log_single_slit_density(p, x + 0.5 * p.d, t);
  return log_interference_amplitude(p, x, t) - 0.5 * (lm + lp);
}

/// Infinite-time attenuation floor exp(-d^2 / (8 sigma^2 + 2 lambda_th^2));
/// equals 1 at T = 0 where the thermal length is unbounded.
inline double saturation_attenuation(const ScenarioParams& p) {
  if (p.T == 0.0) return 1.0;
  return std::exp(-p.d * p.d /
                  (8.0 * p.sigma * p.sigma + 2.0 * p.lambda_th_sq()));
}

/// Late-time attenuation law exp(-t / (t_dec (1 + t/t_saturation))), valid for
/// t well above max(1/gamma, t_mix). Requires gamma > 0 and T > 0.
inline double log_longtime_attenuation(const ScenarioParams& p, double t) {
  if (!(p.gamma > 0.0) || !(p.T > 0.0)) {
    throw unsupported_regime_error(
        "longtime attenuation law requires gamma > 0 and T > 0 "
        "(otherwise the decoherence time is unbounded)");
  }
  if (!std::isfinite(t) || t < 0.0) {
    throw validation_error("time must be finite and non-negative");
  }
  const Timescales ts = timescales(p);
  return -t / (ts.t_dec + t * ts.t_dec / ts.t_saturation);
}

inline double longtime_attenuation(const ScenarioParams& p, double t) {
  return std::exp(log_longtime_attenuation(p, t));
}

// ---------------------------------------------------------------------------
// Sampled spatial profile
// ---------------------------------------------------------------------------

/// P(x, t) and its decomposition sampled on a symmetric uniform grid.
struct SpatialProfile {
  double t = 0.0;
  XGrid grid;
  std::vector<double> x;
  std::vector<double> total;
  std::vector<double> classical;
  std::vector<double> classical_minus;
  std::vector<double> classical_plus;
  std::vector<double> envelope;  ///< P_int(x, t)
  std::vector<double> phase;
  double integral = 0.0;  ///< trapezoid integral of total over the grid
};

/// Default profile grid: 2048 points spanning +-(5.5 max(w(t), d) + d/2).
/// The extra half separation keeps the missed tail mass of the two shifted
/// packets below 1e-7 even at w ~ d, where a bare 5 max(w, d) span misses
/// several 1e-6 of probability.
inline XGrid default_profile_grid(const ScenarioParams& p, double t,
                                  std::size_t n = 2048) {
  const double w = std::sqrt(width_squared(p, t));
  return XGrid(5.5 * std::max(w, p.d) + 0.5 * p.d, n);
}

/// Samples the full decomposition. Preconditions: the grid must span at
/// least +-5 max(w(t), d), and the sampled probability must integrate to
/// 1 - 1e-6 or better; otherwise grid_too_small_error.
inline SpatialProfile profile(const ScenarioParams& p, double t, const XGrid& grid) {
  const double w = std::sqrt(width_squared(p, t));
  if (grid.half_span < 5.0 * std::max(w, p.d)) {
    throw grid_too_small_error(
        "profile grid must span at least +-5 max(w(t), d)");
  }
  SpatialProfile out;
  out.t = t;
  out.grid = grid;
  out.x = grid.points();
  const std::size_t n = grid.n;
  out.total.resize(n);
  out.classical.resize(n);
  out.classical_minus.resize(n);
  out.classical_plus.resize(n);
  out.envelope.resize(n);
  out.phase.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double x = out.x[i];
    const ClassicalDensity c = classical_density(p, x, t);
    out.classical[i] = c.background;
    out.classical_minus[i] = c.part_minus;
    out.classical_plus[i] = c.part_plus;
    out.envelope[i] = interference_amplitude(p, x, t);
    out.phase[i] = fringe_phase(p, x, t);
    out.total[i] = c.background + out.envelope[i] * std::cos(out.phase[i]);
  }
  out.integral = trapezoid(out.total, grid.step());
  if (out.integral < 1.0 - 1e-6) {
    throw grid_too_small_error(
        "grid too small: sampled probability integrates below 1 - 1e-6");
  }
  return out;
}

/// Attenuation factors sampled over a time grid, with log-domain columns.
struct AttenuationSeries {
  std::vector<double> t;
  std::vector<double> vs_classical;
  std::vector<double> vs_single_slit;
  std::vector<double> log_vs_classical;
  std::vector<double> log_vs_single_slit;
};

inline AttenuationSeries attenuation_series(const ScenarioParams& p,
                                            const std::vector<double>& times) {
  AttenuationSeries s;
  s.t = times;
  s.vs_classical.reserve(times.size());
  s.vs_single_slit.reserve(times.size());
  s.log_vs_classical.reserve(times.size());
  s.log_vs_single_slit.reserve(times.size());
  for (double t : times) {
    const double la = log_attenuation_vs_classical(p, t);
    const double lb = log_attenuation_vs_single_slit(p, t);
    s.log_vs_classical.push_back(la);
    s.log_vs_single_slit.push_back(lb);
    s.vs_classical.push_back(std::exp(la));
    s.vs_single_slit.push_back(std::exp(lb));
  }
  return s;
}

}  // namespace qbm
