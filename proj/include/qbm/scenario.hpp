#pragma once

#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "qbm/errors.hpp"

namespace qbm {

/// Value used for timescales and lengths that are unbounded in the given
/// regime (for example the decoherence time at gamma = 0).
inline constexpr double unbounded = std::numeric_limits<double>::infinity();

/// Physical configuration of the double-slit setup and its environment, in
/// units hbar = k_B = 1.
///
/// The natural scales are the particle mass m, the slit separation d and the
/// energy E = 1/(m d^2). Temperature and friction are usually quoted in units
/// of E; the fields here are absolute.
struct ScenarioParams {
  double m = 1.0;      ///< particle mass
  double d = 1.0;      ///< slit separation
  double sigma = 0.05; ///< slit width parameter (wave packets have width 2*sigma)
  double T = 1.0;      ///< bath temperature
  double gamma = 0.0;  ///< Ohmic friction coefficient

  /// Natural energy scale 1/(m d^2).
  double energy_scale() const { return 1.0 / (m * d * d); }

  /// Squared thermal de Broglie length 1/(m T); unbounded at T = 0.
  double lambda_th_sq() const { return T > 0.0 ? 1.0 / (m * T) : unbounded; }

  /// Thermal de Broglie length; unbounded at T = 0.
  double lambda_th() const { return T > 0.0 ? 1.0 / std::sqrt(m * T) : unbounded; }
};

namespace detail {

inline bool finite_positive(double v) { return std::isfinite(v) && v > 0.0; }

}  // namespace detail

/// Throws validation_error naming the violated invariant. Returns the list of
/// non-fatal warnings (currently only the fringe-visibility advisory for
/// sigma/d > 0.1).
inline std::vector<std::string> validate(const ScenarioParams& p) {
  if (!detail::finite_positive(p.m)) {
    throw validation_error("mass must be finite and positive");
  }
  if (!detail::finite_positive(p.d)) {
    throw validation_error("slit separation must be finite and positive");
  }
  if (!detail::finite_positive(p.sigma)) {
    throw validation_error("slit width must be finite and positive");
  }
  if (!std::isfinite(p.T) || p.T < 0.0) {
    throw validation_error("temperature must be finite and non-negative");
  }
  if (!std::isfinite(p.gamma) || p.gamma < 0.0) {
    throw validation_error("friction must be finite and non-negative");
  }
  if (p.sigma / p.d > 0.25) {
    throw validation_error(
        "slit overlap bound violated: sigma/d must not exceed 0.25 "
        "(the two-slit decomposition degenerates when the packets merge)");
  }
  if (p.gamma > 0.0 && !(p.gamma < p.T)) {
    throw validation_error(
        "weak-damping requirement violated: gamma < T must hold whenever "
        "gamma > 0 (the correlators are evaluated in the weak-damping limit)");
  }
  std::vector<std::string> warnings;
  if (p.sigma / p.d > 0.1) {
    warnings.push_back(
        "sigma/d > 0.1: fringe visibility is strongly suppressed; "
        "interference quantities remain well defined but are tiny");
  }
  return warnings;
}

}  // namespace qbm
