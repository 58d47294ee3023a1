#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <complex>
#include <numbers>

#include "qbm/grid.hpp"
#include "qbm/quadrature.hpp"
#include "qbm/scenario.hpp"

TEST_CASE("polynomials are integrated exactly") {
  const auto r = qbm::integrate_adaptive_real(
      [](double x) { return x * x; }, 0.0, 3.0);
  CHECK(r.converged);
  CHECK(r.value.real() == Catch::Approx(9.0).epsilon(1e-14));
  CHECK(r.value.imag() == 0.0);
  CHECK(r.evaluations == 15);  // a single GK15 panel is exact for x^2
}

TEST_CASE("oscillatory gaussian reference value") {
  // integral of exp(-x^2 + i x) over [-8, 8]; tails beyond are ~1e-28.
  // closed form over the whole line: sqrt(pi) exp(-1/4)
  const auto r = qbm::integrate_adaptive(
      [](double x) { return std::exp(std::complex<double>(-x * x, x)); },
      -8.0, 8.0);
  CHECK(r.converged);
  CHECK(r.value.real() == Catch::Approx(1.3803884470431430).epsilon(1e-12));
  CHECK(std::abs(r.value.imag()) < 1e-14);
  CHECK(std::abs(r.value.real() - 1.3803884470431430) <= r.error + 1e-15);
}

TEST_CASE("tolerances are honored") {
  auto f = [](double x) { return std::exp(-x * x); };
  qbm::QuadratureOptions opt;
  opt.rel_tol = 1e-6;
  const auto loose = qbm::integrate_adaptive_real(f, -6.0, 6.0, opt);
  opt.rel_tol = 1e-13;
  const auto tight = qbm::integrate_adaptive_real(f, -6.0, 6.0, opt);
  CHECK(loose.converged);
  CHECK(tight.converged);
  CHECK(tight.evaluations >= loose.evaluations);
  const double exact = std::sqrt(std::numbers::pi);
  CHECK(tight.value.real() == Catch::Approx(exact).epsilon(1e-13));
  CHECK(std::abs(loose.value.real() - exact) <= 1e-6 * exact);
}

TEST_CASE("budget exhaustion throws with the partial value attached") {
  qbm::QuadratureOptions opt;
  opt.max_segments = 2;  // cannot resolve a megahertz oscillation
  auto fast = [](double x) { return std::cos(1e6 * x); };
  try {
    qbm::integrate_adaptive_real(fast, -1.0, 1.0, opt);
    FAIL("expected convergence_error");
  } catch (const qbm::convergence_error& e) {
    CHECK(std::isfinite(e.value()));
    CHECK(e.error_estimate() > 0.0);
    CHECK(std::string(e.what()).find("segment") != std::string::npos);
  }
}

TEST_CASE("budget exhaustion can be reported instead of thrown") {
  qbm::QuadratureOptions opt;
  opt.max_segments = 2;
  opt.throw_on_failure = false;
  const auto r = qbm::integrate_adaptive_real(
      [](double x) { return std::cos(1e6 * x); }, -1.0, 1.0, opt);
  CHECK_FALSE(r.converged);
  CHECK(r.error > 0.0);
}

TEST_CASE("bad bounds are rejected") {
  auto f = [](double x) { return x; };
  CHECK_THROWS_AS(qbm::integrate_adaptive_real(f, 1.0, 0.0),
                  qbm::validation_error);
  CHECK_THROWS_AS(qbm::integrate_adaptive_real(f, 0.0, qbm::unbounded),
                  qbm::validation_error);
}

TEST_CASE("results are deterministic") {
  auto f = [](double x) {
    return std::exp(std::complex<double>(-0.3 * x * x, 7.0 * x));
  };
  const auto a = qbm::integrate_adaptive(f, -5.0, 5.0);
  const auto b = qbm::integrate_adaptive(f, -5.0, 5.0);
  CHECK(a.value.real() == b.value.real());
  CHECK(a.value.imag() == b.value.imag());
  CHECK(a.evaluations == b.evaluations);
}

TEST_CASE("trapezoid and compensated sum basics") {
  // trapezoid rule is exact for linear functions
  std::vector<double> linear;
  const double h = 0.125;
  for (int i = 0; i <= 16; ++i) linear.push_back(3.0 * (i * h) + 1.0);
  CHECK(qbm::trapezoid(linear, h) == Catch::Approx(3.0 * 2.0 + 2.0).epsilon(1e-15));
  CHECK_THROWS_AS(qbm::trapezoid({1.0}, h), qbm::validation_error);

  qbm::CompensatedSum sum;
  for (int i = 0; i < 10; ++i) sum.add(0.1);
  CHECK(sum.value() == Catch::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("grid geometry") {
  const qbm::XGrid g{2.0, 5};
  CHECK(g.step() == Catch::Approx(1.0));
  CHECK(g.point(0) == Catch::Approx(-2.0));
  CHECK(g.point(4) == Catch::Approx(2.0));
  CHECK(g.points().size() == 5);
  CHECK_THROWS_AS(qbm::XGrid(0.0, 5), qbm::validation_error);
  CHECK_THROWS_AS(qbm::XGrid(1.0, 1), qbm::validation_error);
}
