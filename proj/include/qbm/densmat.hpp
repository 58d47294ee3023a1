#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <vector>

#include "qbm/correlators.hpp"
#include "qbm/errors.hpp"
#include "qbm/grid.hpp"
#include "qbm/interference.hpp"
#include "qbm/scenario.hpp"

namespace qbm {

enum class DensityPart { full, classical, interference };

/// Position-space density matrix sampled on a square grid (same axis for
/// rows and columns), tagged with which index pairs of the two-packet
/// expansion it contains.
struct DensityMatrixGrid {
  XGrid grid;
  DensityPart part = DensityPart::full;
  std::vector<std::complex<double>> values;  // row-major, values[i*n + j] = rho(x_i, x_j)

  DensityMatrixGrid(XGrid g, DensityPart p)
      : grid(g), part(p), values(g.n * g.n) {}

  std::size_t n() const { return grid.n; }
  std::complex<double>& at(std::size_t i, std::size_t j) {
    return values[i * grid.n + j];
  }
  const std::complex<double>& at(std::size_t i, std::size_t j) const {
    return values[i * grid.n + j];
  }
};

/// Minimum half-span needed to hold the four packet humps and the thermal
/// coherence envelope down to negligible tail mass.
inline double density_grid_min_half_span(const ScenarioParams& p) {
  const double lam = p.T > 0.0 ? p.lambda_th() : 0.0;
  return 0.5 * p.d + 6.0 * p.sigma + 3.0 * lam;
}

/// Default axis for density-matrix work. Odd point count so that every
/// other point forms an exact half-resolution subgrid (used for the
/// grid-error estimate of the off-diagonal norm).
inline XGrid default_density_grid(const ScenarioParams& p, std::size_t n = 1025) {
  return XGrid{density_grid_min_half_span(p), n};
}

/// Axis sized for the state after free evolution for time t: the packets
/// spread to width w(t), so the span grows with sqrt(w^2 - sigma^2) on top
/// of the initial requirement. The evolved terms have no structure finer
/// than the initial thermal envelope, so the point count can stay fixed.
inline XGrid evolved_density_grid(const ScenarioParams& p, double t,
                                  std::size_t n = 1025) {
  const double extra =
      std::sqrt(std::max(width_squared(p, t) - p.sigma * p.sigma, 0.0));
  return XGrid{density_grid_min_half_span(p) + 5.5 * extra, n};
}

namespace detail {

/// One term exp(a1 x^2 + a2 x'^2 + b x x' + d1 x + d2 x' + c) of the
/// density matrix. The initial state is a sum of four such terms (real
/// coefficients); free evolution keeps the form but makes them complex.
struct BivariateGaussianTerm {
  std::complex<double> a1{}, a2{}, b{}, d1{}, d2{}, c{};

  std::complex<double> operator()(double x, double xp) const {
    return std::exp(a1 * (x * x) + a2 * (xp * xp) + b * (x * xp) + d1 * x +
                    d2 * xp + c);
  }
};

/// Terms of rho(x, x') = (N/2) e^{-(x-x')^2/(2 lambda^2)} sum_{ij} psi_i(x)
/// psi_j(x') for the requested index pairs; centers +-d/2, widths sigma.
/// T = 0 drops the coherence envelope (pure two-packet state).
inline std::vector<BivariateGaussianTerm> initial_terms(const ScenarioParams& p,
                                                        DensityPart part) {
  const double s2 = p.sigma * p.sigma;
  const double inv_l2 = p.m * p.T;  // 1/lambda_th^2, zero at T=0
  const SlitPreparation slits(p);
  const double log_weight = std::log(0.5 * slits.norm) -
                            0.5 * std::log(2.0 * std::numbers::pi * s2);

  std::vector<std::array<double, 2>> centers;
  const double h = 0.5 * p.d;
  if (part == DensityPart::full || part == DensityPart::classical) {
    centers.push_back({+h, +h});
    centers.push_back({-h, -h});
  }
  if (part == DensityPart::full || part == DensityPart::interference) {
    centers.push_back({+h, -h});
    centers.push_back({-h, +h});
  }

  std::vector<BivariateGaussianTerm> terms;
  terms.reserve(centers.size());
  for (const auto& cc : centers) {
    BivariateGaussianTerm t;
    t.a1 = -1.0 / (4.0 * s2) - 0.5 * inv_l2;
    t.a2 = t.a1;
    t.b = inv_l2;
    t.d1 = cc[0] / (2.0 * s2);
    t.d2 = cc[1] / (2.0 * s2);
    t.c = log_weight - (cc[0] * cc[0] + cc[1] * cc[1]) / (4.0 * s2);
    terms.push_back(t);
  }
  return terms;
}

/// Propagates one Gaussian term through the free kernel
///   K(x, y) = sqrt(m/(2 pi i t)) exp(i m (x-y)^2 / (2 t))
/// on the left and its conjugate on the right, by completing the square in
/// y and then in y'. Both Gaussian integrals have negative-real-part
/// quadratic coefficients, so the principal square root applies.
inline BivariateGaussianTerm evolve_term(const BivariateGaussianTerm& t0,
                                         double m, double time) {
  const std::complex<double> i{0.0, 1.0};
  const double kappa = m / (2.0 * time);
  const std::complex<double> P1 = t0.a1 + i * kappa;
  const std::complex<double> P2 = t0.a2 - i * kappa - t0.b * t0.b / (4.0 * P1);

  // After the y integral the y' linear coefficient is
  //   L2 = mu0 + mu1 x + mu2 x'.
  const std::complex<double> mu0 = t0.d2 - t0.b * t0.d1 / (2.0 * P1);
  const std::complex<double> mu1 = i * kappa * t0.b / P1;
  const std::complex<double> mu2 = 2.0 * i * kappa;

  BivariateGaussianTerm t;
  t.a1 = i * kappa + kappa * kappa / P1 - mu1 * mu1 / (4.0 * P2);
  t.a2 = -i * kappa + kappa * kappa / P2;
  t.b = -mu1 * mu2 / (2.0 * P2);
  t.d1 = i * kappa * t0.d1 / P1 - mu0 * mu1 / (2.0 * P2);
  t.d2 = -mu0 * mu2 / (2.0 * P2);
  t.c = t0.c - t0.d1 * t0.d1 / (4.0 * P1) - mu0 * mu0 / (4.0 * P2) +
        std::log(m / (2.0 * std::numbers::pi * time)) +
        0.5 * std::log(std::numbers::pi / -P1) +
        0.5 * std::log(std::numbers::pi / -P2);
  return t;
}

inline void fill_grid(DensityMatrixGrid& dm,
                      const std::vector<BivariateGaussianTerm>& terms) {
  const std::size_t n = dm.n();
  for (std::size_t i = 0; i < n; ++i) {
    const double x = dm.grid.point(i);
    for (std::size_t j = 0; j < n; ++j) {
      const double xp = dm.grid.point(j);
      std::complex<double> v{0.0, 0.0};
      for (const auto& t : terms) v += t(x, xp);
      dm.at(i, j) = v;
    }
  }
}

inline void require_grid_span(const ScenarioParams& p, const XGrid& grid) {
  const double need = density_grid_min_half_span(p);
  if (grid.half_span < need * (1.0 - 1e-12)) {
    throw grid_too_small_error(
        "density-matrix grid must span at least d/2 + 6 sigma + 3 lambda_th "
        "per side to hold the packet humps and the coherence envelope");
  }
}

}  // namespace detail

/// Thermal two-packet density matrix at t = 0. Requires T > 0 (the
/// coherence envelope needs a finite thermal wavelength); use
/// pure_initial_density_matrix for the T = 0 state.
inline DensityMatrixGrid initial_density_matrix(const ScenarioParams& p,
                                                const XGrid& grid,
                                                DensityPart part) {
  validate(p);
  if (!(p.T > 0.0)) {
    throw validation_error(
        "thermal density matrix requires T > 0; use "
        "pure_initial_density_matrix for the zero-temperature state");
  }
  detail::require_grid_span(p, grid);
  DensityMatrixGrid dm(grid, part);
  detail::fill_grid(dm, detail::initial_terms(p, part));
  return dm;
}

/// Zero-temperature variant: plain outer products of the two packets, no
/// thermal envelope.
inline DensityMatrixGrid pure_initial_density_matrix(const ScenarioParams& p,
                                                     const XGrid& grid,
                                                     DensityPart part) {
  validate(p);
  if (p.T != 0.0) {
    throw validation_error(
        "pure_initial_density_matrix is the T = 0 construction; use "
        "initial_density_matrix for T > 0");
  }
  detail::require_grid_span(p, grid);
  DensityMatrixGrid dm(grid, part);
  detail::fill_grid(dm, detail::initial_terms(p, part));
  return dm;
}

/// h * sum of the diagonal (real part).
inline double trace(const DensityMatrixGrid& dm) {
  CompensatedSum sum;
  for (std::size_t i = 0; i < dm.n(); ++i) sum.add(dm.at(i, i).real());
  return sum.value() * dm.grid.step();
}

struct OffDiagonalNorm {
  double a_od_sq = 0.0;  ///< h^2 * sum |rho_int|^2
  double a_od = 0.0;     ///< its square root
  double error = 0.0;    ///< grid-halving estimate for a_od
};

/// Squared Frobenius weight of the interference block, h^2 sum |rho|^2,
/// with a grid-error estimate from comparing against the half-resolution
/// subgrid (grids must have an odd point count so that subgrid exists).
inline OffDiagonalNorm off_diagonal_norm(const DensityMatrixGrid& dm) {
  if (dm.part != DensityPart::interference) {
    throw validation_error(
        "off-diagonal norm is defined for the interference part only");
  }
  const std::size_t n = dm.n();
  if (n % 2 == 0) {
    throw validation_error(
        "off-diagonal norm needs an odd grid point count so a "
        "half-resolution subgrid exists for the error estimate");
  }
  const double h = dm.grid.step();
  CompensatedSum full, coarse;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      const double a = std::norm(dm.at(i, j));
      full.add(a);
      if (i % 2 == 0 && j % 2 == 0) coarse.add(a);
    }
  }
  OffDiagonalNorm out;
  out.a_od_sq = full.value() * h * h;
  out.a_od = std::sqrt(out.a_od_sq);
  const double coarse_sq = coarse.value() * (2.0 * h) * (2.0 * h);
  out.error = std::abs(std::sqrt(std::max(coarse_sq, 0.0)) - out.a_od);
  return out;
}

/// Diagnostic rescaling of a_od by the Frobenius weight of the classical
/// block (the convention in which the saturation value becomes 1 at T=0).
inline double normalized_off_diagonal_norm(const DensityMatrixGrid& interference,
                                           const DensityMatrixGrid& classical) {
  if (classical.part != DensityPart::classical) {
    throw validation_error("normalization reference must be the classical part");
  }
  const OffDiagonalNorm od = off_diagonal_norm(interference);
  const double h = classical.grid.step();
  CompensatedSum sum;
  for (const auto& v : classical.values) sum.add(std::norm(v));
  const double cl_norm = std::sqrt(sum.value() * h * h);
  return od.a_od * std::numbers::sqrt2 / cl_norm;
}

struct ClosedFormAOd {
  double value = 0.0;
  /// false when sigma >= 0.2 lambda_th, where the narrow-packet reading
  /// behind the closed form starts to degrade
  bool narrow_packet_valid = true;
};

/// Narrow-packet closed form a_od = exp(-d^2/(2 lambda_th^2)) / sqrt(2);
/// equals the saturation attenuation divided by sqrt(2) as sigma -> 0.
inline ClosedFormAOd closed_form_a_od(const ScenarioParams& p) {
  validate(p);
  ClosedFormAOd out;
  if (p.T > 0.0) {
    const double l2 = p.lambda_th_sq();
    out.value = std::exp(-p.d * p.d / (2.0 * l2)) / std::numbers::sqrt2;
    out.narrow_packet_valid = p.sigma < 0.2 * std::sqrt(l2);
  } else {
    out.value = 1.0 / std::numbers::sqrt2;
    out.narrow_packet_valid = true;
  }
  return out;
}

/// Evolves the tagged part of the initial state through the free-particle
/// kernel for time t, exactly: each Gaussian term is propagated by
/// completing the square, then re-sampled on the input grid. Only the
/// dissipationless case is supported.
inline DensityMatrixGrid free_unitary_evolve(const DensityMatrixGrid& dm,
                                             const ScenarioParams& p,
                                             double t) {
  validate(p);
  if (p.gamma != 0.0) {
    throw unsupported_regime_error(
        "off-diagonal evolution is implemented for gamma = 0 only");
  }
  if (!(t >= 0.0) || !std::isfinite(t)) {
    throw validation_error("evolution time must be finite and nonnegative");
  }
  if (t == 0.0) return dm;
  detail::require_grid_span(p, dm.grid);
  auto terms = detail::initial_terms(p, dm.part);
  for (auto& term : terms) term = detail::evolve_term(term, p.m, t);
  DensityMatrixGrid out(dm.grid, dm.part);
  detail::fill_grid(out, terms);
  return out;
}

/// Same evolution, but sampled directly on the given grid instead of the
/// grid of a prepared initial matrix. This is the form to use for late
/// times, where the spread state no longer fits the initial axis; pair it
/// with evolved_density_grid(p, t).
inline DensityMatrixGrid free_unitary_evolve(const ScenarioParams& p,
                                             DensityPart part, double t,
                                             const XGrid& grid) {
  validate(p);
  if (p.gamma != 0.0) {
    throw unsupported_regime_error(
        "off-diagonal evolution is implemented for gamma = 0 only");
  }
  if (!(t >= 0.0) || !std::isfinite(t)) {
    throw validation_error("evolution time must be finite and nonnegative");
  }
  detail::require_grid_span(p, grid);
  auto terms = detail::initial_terms(p, part);
  if (t > 0.0) {
    for (auto& term : terms) term = detail::evolve_term(term, p.m, t);
  }
  DensityMatrixGrid out(grid, part);
  detail::fill_grid(out, terms);
  return out;
}

}  // namespace qbm
