#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include "qbm/correlators.hpp"
#include "qbm/densmat.hpp"
#include "qbm/grid.hpp"
#include "qbm/interference.hpp"

namespace {

qbm::ScenarioParams params(double sigma, double T, double gamma = 0.0) {
  qbm::ScenarioParams p;
  p.sigma = sigma;
  p.T = T;
  p.gamma = gamma;
  return p;
}

double frobenius(const qbm::DensityMatrixGrid& dm) {
  qbm::CompensatedSum sum;
  for (const auto& v : dm.values) sum.add(std::norm(v));
  const double h = dm.grid.step();
  return std::sqrt(sum.value() * h * h);
}

}  // namespace

TEST_CASE("diagonal of the initial matrix is the prepared density") {
  const auto p = params(0.05, 1.0);
  const auto grid = qbm::default_density_grid(p, 257);
  const auto rho = qbm::initial_density_matrix(p, grid, qbm::DensityPart::full);
  const qbm::SlitPreparation slits(p);
  for (std::size_t i = 0; i < grid.n; i += 5) {
    const double x = grid.point(i);
    // the edge diagonal carries exponents ~1800; see the symmetry test
    CHECK(rho.at(i, i).real() ==
          Catch::Approx(slits.alpha_density(x)).margin(1e-300).epsilon(1e-10));
    CHECK(rho.at(i, i).imag() == 0.0);
  }
}

TEST_CASE("initial matrix is real symmetric and splits into its parts") {
  const auto p = params(0.05, 1.0);
  const auto grid = qbm::default_density_grid(p, 129);
  const auto full = qbm::initial_density_matrix(p, grid, qbm::DensityPart::full);
  const auto cl = qbm::initial_density_matrix(p, grid, qbm::DensityPart::classical);
  const auto inter =
      qbm::initial_density_matrix(p, grid, qbm::DensityPart::interference);
  for (std::size_t i = 0; i < grid.n; i += 7) {
    for (std::size_t j = 0; j < grid.n; j += 7) {
      CHECK(full.at(i, j).imag() == 0.0);
      // deep-tail entries carry exponents up to ~2900, so their relative
      // rounding error scales with the exponent; 1e-10 still pins structure
      CHECK(full.at(i, j).real() ==
            Catch::Approx(full.at(j, i).real()).margin(1e-300).epsilon(1e-10));
      CHECK(full.at(i, j).real() ==
            Catch::Approx(cl.at(i, j).real() + inter.at(i, j).real())
                .margin(1e-300)
                .epsilon(1e-12));
    }
  }
}

TEST_CASE("thermal factor sets the cross-peak to same-peak ratio") {
  // grid chosen so +-d/2 are exact grid points
  const auto p = params(0.05, 1.0);
  const qbm::XGrid grid{4.0, 17};
  const auto cl = qbm::initial_density_matrix(p, grid, qbm::DensityPart::classical);
  const auto inter =
      qbm::initial_density_matrix(p, grid, qbm::DensityPart::interference);
  REQUIRE(grid.point(9) == 0.5);
  REQUIRE(grid.point(7) == -0.5);
  // rho_int(x, -x) / rho_cl(x, x) = exp(-2 x^2 / lambda_th^2) for every x;
  // at the packet centers the exponent is d^2/(2 lambda_th^2)
  CHECK(inter.at(9, 7).real() / cl.at(9, 9).real() ==
        Catch::Approx(std::exp(-0.5)).epsilon(1e-13));
  CHECK(inter.at(7, 9).real() / cl.at(7, 7).real() ==
        Catch::Approx(std::exp(-0.5)).epsilon(1e-13));
}

TEST_CASE("traces of the parts split as N and 1 - N") {
  const auto p = params(0.2, 1.0);  // wide slits so 1 - N is well resolved
  const auto grid = qbm::default_density_grid(p, 513);
  const auto full = qbm::initial_density_matrix(p, grid, qbm::DensityPart::full);
  const auto cl = qbm::initial_density_matrix(p, grid, qbm::DensityPart::classical);
  const auto inter =
      qbm::initial_density_matrix(p, grid, qbm::DensityPart::interference);
  const double n_slits = qbm::SlitPreparation(p).norm;
  CHECK(qbm::trace(full) == Catch::Approx(1.0).margin(1e-9));
  CHECK(qbm::trace(cl) == Catch::Approx(n_slits).margin(1e-9));
  CHECK(qbm::trace(inter) == Catch::Approx(1.0 - n_slits).margin(1e-9));
}

TEST_CASE("off-diagonal weight against a frozen high-precision value") {
  const auto p = params(0.05, 1.0);
  const auto rho = qbm::initial_density_matrix(p, qbm::default_density_grid(p),
                                               qbm::DensityPart::interference);
  const auto od = qbm::off_diagonal_norm(rho);
  // exact Frobenius integral of the interference block, 50-digit arithmetic:
  // (N^2/4)(1+4 s^2/l^2)^{-1/2} [2 e^{-d^2/(l^2+4 s^2)} + e^{-d^2/(4 s^2)}]
  CHECK(std::abs(od.a_od - 0.4299395429612914) < od.error + 1e-8);
  CHECK(od.a_od_sq == Catch::Approx(od.a_od * od.a_od).epsilon(1e-14));
  CHECK(od.a_od <= 1.0 / std::numbers::sqrt2 + 1e-12);

  // doubling the resolution moves the value by less than the estimate
  const auto coarse = qbm::off_diagonal_norm(qbm::initial_density_matrix(
      p, qbm::default_density_grid(p, 513), qbm::DensityPart::interference));
  CHECK(std::abs(coarse.a_od - od.a_od) <= coarse.error + 1e-12);
  CHECK(od.error < 1e-9);
}

TEST_CASE("off-diagonal weight shrinks monotonically with temperature") {
  double prev = 1.0;
  for (double T : {0.5, 1.0, 2.0, 4.0, 8.0}) {
    const auto p = params(0.05, T);
    const auto od = qbm::off_diagonal_norm(qbm::initial_density_matrix(
        p, qbm::default_density_grid(p), qbm::DensityPart::interference));
    CHECK(od.a_od < prev);
    CHECK(od.a_od > 0.0);
    prev = od.a_od;
  }
}

TEST_CASE("closed form for the off-diagonal weight") {
  const auto narrow = qbm::closed_form_a_od(params(0.01, 1.0));
  CHECK(narrow.value ==
        Catch::Approx(std::exp(-0.5) / std::numbers::sqrt2).epsilon(1e-14));
  CHECK(narrow.narrow_packet_valid);

  // the sigma = d/100 grid value, frozen from 50-digit arithmetic, sits
  // within 1e-4 of the closed form; at sigma = d/20 the gap is ~2.5e-3
  CHECK(std::abs(0.4289248070950266 / narrow.value - 1.0) < 1e-4);
  const auto wide = qbm::closed_form_a_od(params(0.05, 1.0));
  CHECK(std::abs(0.4299395429612914 / wide.value - 1.0) < 3e-3);
  CHECK(wide.narrow_packet_valid);  // 0.05 < 0.2 lambda_th = 0.2

  const auto hot = qbm::closed_form_a_od(params(0.05, 25.0));
  CHECK_FALSE(hot.narrow_packet_valid);  // lambda_th = 0.2, sigma >= 0.2 lambda
}

TEST_CASE("normalized off-diagonal variant follows its defining relation") {
  const auto p = params(0.05, 1.0);
  const auto grid = qbm::default_density_grid(p, 513);
  const auto inter =
      qbm::initial_density_matrix(p, grid, qbm::DensityPart::interference);
  const auto cl = qbm::initial_density_matrix(p, grid, qbm::DensityPart::classical);
  const double got = qbm::normalized_off_diagonal_norm(inter, cl);
  const double want =
      qbm::off_diagonal_norm(inter).a_od * std::numbers::sqrt2 / frobenius(cl);
  CHECK(got == Catch::Approx(want).epsilon(1e-12));
  CHECK_THROWS_AS(qbm::normalized_off_diagonal_norm(inter, inter),
                  qbm::validation_error);
}

TEST_CASE("off-diagonal norm input checking") {
  const auto p = params(0.05, 1.0);
  const auto cl = qbm::initial_density_matrix(p, qbm::default_density_grid(p, 65),
                                              qbm::DensityPart::classical);
  CHECK_THROWS_AS(qbm::off_diagonal_norm(cl), qbm::validation_error);
  const auto even = qbm::initial_density_matrix(p, qbm::default_density_grid(p, 64),
                                                qbm::DensityPart::interference);
  CHECK_THROWS_AS(qbm::off_diagonal_norm(even), qbm::validation_error);
}

TEST_CASE("initial matrix construction guards") {
  const auto p = params(0.05, 1.0);
  CHECK_THROWS_AS(qbm::initial_density_matrix(p, qbm::XGrid{1.0, 65},
                                              qbm::DensityPart::full),
                  qbm::grid_too_small_error);
  CHECK_THROWS_AS(qbm::pure_initial_density_matrix(p, qbm::default_density_grid(p),
                                                   qbm::DensityPart::full),
                  qbm::validation_error);
  const auto cold = params(0.05, 0.0);
  CHECK_THROWS_AS(qbm::initial_density_matrix(cold, qbm::default_density_grid(cold),
                                              qbm::DensityPart::full),
                  qbm::validation_error);
}

TEST_CASE("pure state carries the maximal off-diagonal weight") {
  const auto p = params(0.05, 0.0);
  const auto grid = qbm::default_density_grid(p, 513);
  const auto inter =
      qbm::pure_initial_density_matrix(p, grid, qbm::DensityPart::interference);
  const auto od = qbm::off_diagonal_norm(inter);
  const double n_slits = qbm::SlitPreparation(p).norm;
  CHECK(std::abs(od.a_od - n_slits / std::numbers::sqrt2) < od.error + 1e-9);
  CHECK(od.a_od <= 1.0 / std::numbers::sqrt2 + 1e-12);
}

TEST_CASE("interference block peaks at the cross-packet corners") {
  const auto p = params(0.05, 1.0);
  const qbm::XGrid grid{4.0, 257};
  const auto inter =
      qbm::initial_density_matrix(p, grid, qbm::DensityPart::interference);
  double best = -1.0;
  std::size_t bi = 0, bj = 0;
  for (std::size_t i = 0; i < grid.n; ++i) {
    for (std::size_t j = 0; j < grid.n; ++j) {
      const double a = std::abs(inter.at(i, j));
      if (a > best) {
        best = a;
        bi = i;
        bj = j;
      }
    }
  }
  CHECK(std::abs(std::abs(grid.point(bi)) - 0.5) <= grid.step());
  CHECK(std::abs(std::abs(grid.point(bj)) - 0.5) <= grid.step());
  CHECK(grid.point(bi) * grid.point(bj) < 0.0);  // opposite corners
}

TEST_CASE("free evolution preserves trace, hermiticity and the diagonal law") {
  const auto p = params(0.05, 1.0);
  const double t = 0.1;  // t_mix
  const auto grid = qbm::evolved_density_grid(p, t);
  const auto rho = qbm::free_unitary_evolve(p, qbm::DensityPart::full, t, grid);

  CHECK(qbm::trace(rho) == Catch::Approx(1.0).margin(1e-8));

  double peak = 0.0;
  for (std::size_t i = 0; i < grid.n; ++i) {
    peak = std::max(peak, rho.at(i, i).real());
  }
  for (std::size_t i = 0; i < grid.n; i += 3) {
    const double want = qbm::total_density(p, grid.point(i), t);
    if (want > 1e-12 * peak) {
      CHECK(rho.at(i, i).real() == Catch::Approx(want).epsilon(1e-8));
    }
    CHECK(std::abs(rho.at(i, i).imag()) < 1e-12 * peak);
  }
  for (std::size_t i = 0; i < grid.n; i += 101) {
    for (std::size_t j = 0; j < grid.n; j += 103) {
      const auto a = rho.at(i, j);
      const auto b = std::conj(rho.at(j, i));
      CHECK(std::abs(a - b) < 1e-12 * peak);
    }
  }
}

TEST_CASE("evolved classical and interference traces keep their split") {
  const auto p = params(0.2, 1.0);
  const double t = 0.2;
  const auto grid = qbm::evolved_density_grid(p, t);
  const double n_slits = qbm::SlitPreparation(p).norm;
  const auto cl = qbm::free_unitary_evolve(p, qbm::DensityPart::classical, t, grid);
  const auto inter =
      qbm::free_unitary_evolve(p, qbm::DensityPart::interference, t, grid);
  CHECK(qbm::trace(cl) == Catch::Approx(n_slits).margin(1e-7));
  CHECK(qbm::trace(inter) == Catch::Approx(1.0 - n_slits).margin(1e-7));
}

TEST_CASE("free evolution keeps the off-diagonal weight constant") {
  const auto p = params(0.05, 1.0);
  const auto base = qbm::off_diagonal_norm(qbm::initial_density_matrix(
      p, qbm::default_density_grid(p), qbm::DensityPart::interference));
  for (double u : {0.3, 1.0, 3.0}) {
    const double t = u * 0.1;
    const auto evolved = qbm::free_unitary_evolve(
        p, qbm::DensityPart::interference, t, qbm::evolved_density_grid(p, t));
    const auto od = qbm::off_diagonal_norm(evolved);
    CHECK(std::abs(od.a_od / base.a_od - 1.0) < 1e-6);
  }
}

TEST_CASE("evolution guards") {
  const auto p = params(0.05, 1.0);
  const auto grid = qbm::default_density_grid(p, 65);
  const auto rho = qbm::initial_density_matrix(p, grid, qbm::DensityPart::full);
  CHECK_THROWS_AS(qbm::free_unitary_evolve(rho, params(0.05, 1.0, 0.3), 0.1),
                  qbm::unsupported_regime_error);
  CHECK_THROWS_AS(qbm::free_unitary_evolve(rho, p, -0.1), qbm::validation_error);
  const auto same = qbm::free_unitary_evolve(rho, p, 0.0);
  CHECK(same.at(32, 32).real() == rho.at(32, 32).real());
}

TEST_CASE("closed-form evolution agrees with a discretized propagator") {
  // one brute-force reference point: rho_t(x, x') by trapezoid quadrature of
  // K(x,y,t) rho_0(y,y') K*(x',y',t) on a 2001 x 2001 grid
  const auto p = params(0.05, 1.0);
  const double t = 0.03;
  const double x = 0.45;
  const double xp = -0.40;

  auto terms = qbm::detail::initial_terms(p, qbm::DensityPart::full);
  std::complex<double> closed{0.0, 0.0};
  for (const auto& term : terms) {
    closed += qbm::detail::evolve_term(term, p.m, t)(x, xp);
  }

  const double kappa = p.m / (2.0 * t);
  const double pref =
      qbm::SlitPreparation(p).norm /
      (2.0 * std::sqrt(2.0 * std::numbers::pi * p.sigma * p.sigma));
  const std::size_t n = 2001;
  const double h = 2.0 / static_cast<double>(n - 1);
  std::vector<double> y(n), f(n);
  for (std::size_t i = 0; i < n; ++i) {
    y[i] = -1.0 + h * static_cast<double>(i);
    f[i] = std::exp(-(y[i] - 0.5) * (y[i] - 0.5) / (4.0 * p.sigma * p.sigma)) +
           std::exp(-(y[i] + 0.5) * (y[i] + 0.5) / (4.0 * p.sigma * p.sigma));
  }
  std::complex<double> acc{0.0, 0.0};
  for (std::size_t i = 0; i < n; ++i) {
    const double wi = (i == 0 || i == n - 1) ? 0.5 : 1.0;
    const double dxi = x - y[i];
    for (std::size_t j = 0; j < n; ++j) {
      const double wj = (j == 0 || j == n - 1) ? 0.5 : 1.0;
      const double dxj = xp - y[j];
      const double dy = y[i] - y[j];
      const std::complex<double> arg{-0.5 * p.m * p.T * dy * dy,
                                     kappa * (dxi * dxi - dxj * dxj)};
      acc += wi * wj * f[i] * f[j] * std::exp(arg);
    }
  }
  const std::complex<double> brute =
      acc * (h * h * pref * p.m / (2.0 * std::numbers::pi * t));
  CHECK(std::abs(closed - brute) < 1e-6 * std::abs(closed));
}
