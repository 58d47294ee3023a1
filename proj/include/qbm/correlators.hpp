#pragma once

#include <cmath>
#include <complex>

#include "qbm/errors.hpp"
#include "qbm/scenario.hpp"

namespace qbm {

/// Bath-dressed position correlators of the free Brownian particle at lag t,
/// in the weak-damping limit. A is the imaginary part of the position
/// autocorrelator (it fixes the commutator and the fringe phase), Q the real
/// decay part (Q <= 0; s = -2Q is the classical mean-square displacement
/// growth).
struct BathCorrelators {
  double t = 0.0;
  double A = 0.0;
  double Q = 0.0;

  /// Mean-square displacement accumulated by time t; non-negative.
  double s() const { return -2.0 * Q; }
};

/// Evaluates A(t) and Q(t).
///
/// gamma > 0:  A = (1 - exp(-gamma t)) / (2 m gamma)
///             Q = -(T / (m gamma)) (t - (1 - exp(-gamma t)) / gamma)
/// gamma = 0:  A = t / (2 m),  Q = -T t^2 / (2 m)
///
/// For gamma*t < 1e-6 both expressions lose digits to cancellation, so they
/// switch to a four-term Taylor expansion in gamma*t; at the threshold both
/// branches agree to better than 1e-10 relative.
inline BathCorrelators correlator(const ScenarioParams& p, double t) {
  if (!std::isfinite(t) || t < 0.0) {
    throw validation_error("correlator lag must be finite and non-negative");
  }
  BathCorrelators c;
  c.t = t;
  if (p.gamma == 0.0) {
    c.A = t / (2.0 * p.m);
    c.Q = -p.T * t * t / (2.0 * p.m);
    return c;
  }
  const double x = p.gamma * t;
  if (x < 1e-6) {
    // (1 - e^-x)/x       = 1 - x/2 + x^2/6 - x^3/24 + O(x^4)
    // (x - 1 + e^-x)/x^2 = 1/2 - x/6 + x^2/24 - x^3/120 + O(x^4)
    c.A = (t / (2.0 * p.m)) * (1.0 - x / 2.0 + x * x / 6.0 - x * x * x / 24.0);
    c.Q = -(p.T * t * t / p.m) *
          (0.5 - x / 6.0 + x * x / 24.0 - x * x * x / 120.0);
  } else {
    const double one_minus_exp = -std::expm1(-x);
    c.A = one_minus_exp / (2.0 * p.m * p.gamma);
    c.Q = -(p.T / (p.m * p.gamma)) * (t - one_minus_exp / p.gamma);
  }
  return c;
}

/// Squared width of an evolved single-slit wave packet:
/// w(t)^2 = sigma^2 + A(t)^2 / sigma^2 - 2 Q(t).
inline double width_squared(const ScenarioParams& p, double t) {
  const BathCorrelators c = correlator(p, t);
  const double s2 = p.sigma * p.sigma;
  return s2 + c.A * c.A / s2 + c.s();
}

/// Equal-point commutator of the position at lags 0 and t: [x(t1), x(t1+t)]
/// has the c-number value 2 i A(t).
inline std::complex<double> position_commutator(const ScenarioParams& p, double t) {
  return {0.0, 2.0 * correlator(p, t).A};
}

/// Characteristic times of the double-slit evolution. Entries that are
/// unbounded in the given regime hold qbm::unbounded.
struct Timescales {
  double t_mix = 0.0;       ///< two-packet overlap time 2 m sigma d
  double t_spread = 0.0;    ///< single-packet spreading time 2 m sigma^2
  double t_dec = 0.0;       ///< decoherence time lambda_th^2 / (d^2 gamma)
  double t_saturation = 0.0;///< attenuation saturation time t_dec d^2/(8 sigma^2)
  double tau_gauss = 0.0;   ///< short-time Gaussian decay scale sigma^2 sqrt(m/T)/d
  double lambda_th = 0.0;   ///< thermal de Broglie length
};

inline Timescales timescales(const ScenarioParams& p) {
  Timescales ts;
  ts.t_mix = 2.0 * p.m * p.sigma * p.d;
  ts.t_spread = 2.0 * p.m * p.sigma * p.sigma;
  ts.lambda_th = p.lambda_th();
  ts.tau_gauss = p.T > 0.0
                     ? p.sigma * p.sigma * std::sqrt(p.m / p.T) / p.d
                     : unbounded;
  if (p.T > 0.0 && p.gamma > 0.0) {
    ts.t_dec = p.lambda_th_sq() / (p.d * p.d * p.gamma);
    ts.t_saturation = ts.t_dec * p.d * p.d / (8.0 * p.sigma * p.sigma);
  } else {
    ts.t_dec = unbounded;
    ts.t_saturation = unbounded;
  }
  return ts;
}

}  // namespace qbm
