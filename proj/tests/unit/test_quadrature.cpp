#include <doctest.h>

#include <cmath>

#include "parabolic/quadrature.hpp"

using namespace parabolic;

TEST_SUITE("quadrature") {
  TEST_CASE("Gauss-Legendre rule integrates polynomials up to degree 2n-1") {
    const auto& rule = gauss_legendre(16);
    double wsum = 0.0;
    for (double w : rule.weights) wsum += w;
    CHECK(wsum == doctest::Approx(2.0).epsilon(1e-15));
    for (int deg = 0; deg <= 31; ++deg) {
      double s = 0.0;
      for (std::size_t i = 0; i < rule.nodes.size(); ++i) s += rule.weights[i] * std::pow(rule.nodes[i], deg);
      const double exact = deg % 2 == 1 ? 0.0 : 2.0 / (deg + 1);
      CHECK(std::abs(s - exact) < 1e-14);
    }
  }

  TEST_CASE("window weight") {
    QuadratureConfig cfg;
    CHECK(window_weight(0.0, cfg) == 1.0);
    CHECK(window_weight(9.6, cfg) == 1.0);
    CHECK(window_weight(-10.8, cfg) == doctest::Approx(0.5));
    CHECK(window_weight(12.0, cfg) == 0.0);
    CHECK(window_weight(13.0, cfg) == 0.0);
  }

  TEST_CASE("polar point mapping") {
    for (double u : {-3.0, -0.2, 0.0, 1.7}) {
      const auto p = PolarPoint::from_u(u);
      CHECK(p.sin_theta * p.sin_theta + p.cos_theta * p.cos_theta == doctest::Approx(1.0));
      const auto q = PolarPoint::from_theta(p.theta());
      CHECK(q.u == doctest::Approx(u).epsilon(1e-12));
    }
    CHECK_THROWS_AS(PolarPoint::from_theta(0.0), DomainError);
    CHECK_THROWS_AS(PolarPoint::from_theta(M_PI), DomainError);
  }

  TEST_CASE("spectral nodes integrate the solid-angle weight") {
    // int du sech^2 u = 2 (the full sphere in theta); the taper removes < 1e-8
    QuadratureConfig cfg;
    for (double rate : {1.0, 25.0, 300.0}) {
      double s = 0.0;
      for (const auto& n : spectral_nodes(rate, cfg)) s += n.weight * n.point.sin_theta * n.point.sin_theta;
      CHECK(s == doctest::Approx(2.0).epsilon(1e-8));
    }
  }

  TEST_CASE("adaptive Gauss-Kronrod") {
    QuadratureConfig cfg;
    auto f = [](double x) { return std::array<cplx, 2>{std::sin(x), std::exp(cplx{0.0, 40.0 * x})}; };
    const auto r = integrate_adaptive<2>(f, 0.0, M_PI, 1, cfg);
    CHECK(r.value[0].real() == doctest::Approx(2.0).epsilon(1e-12));
    const cplx exact = (std::exp(cplx{0.0, 40.0 * M_PI}) - 1.0) / cplx{0.0, 40.0};
    CHECK(std::abs(r.value[1] - exact) < 1e-12);
    CHECK(r.error < 1e-10);
  }

  TEST_CASE("adaptive integration reports non-convergence") {
    QuadratureConfig cfg;
    cfg.max_subdivisions = 2;
    auto f = [](double x) { return std::array<cplx, 1>{std::sqrt(std::abs(x))}; };
    CHECK_THROWS_AS(integrate_adaptive<1>(f, -1.0, 1.0, 1, cfg), QuadratureError);
    QuadratureConfig tight;
    tight.relative_tolerance = 1e-15;
    CHECK_THROWS_AS(integrate_adaptive<1>(f, 0.0, 1.0, 1, tight), QuadratureError);
  }

  TEST_CASE("config validation") {
    QuadratureConfig cfg;
    cfg.relative_tolerance = 0.1;
    CHECK_THROWS_AS(cfg.validate(), DomainError);
    cfg.relative_tolerance = 1e-8;
    cfg.taper_fraction = 1.0;
    CHECK_THROWS_AS(cfg.validate(), DomainError);
  }
}
