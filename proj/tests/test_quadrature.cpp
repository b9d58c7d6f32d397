#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "kpz/quadrature.hpp"
#include "oracles.hpp"

using namespace kpz;

TEST_CASE("Gauss-Legendre integrates polynomials of degree 2n-1 exactly") {
  for (int n : {1, 2, 5, 16, 48}) {
    const auto& g = gauss_legendre(n);
    REQUIRE(g.x.size() == static_cast<size_t>(n));
    for (int d = 0; d <= 2 * n - 1; ++d) {
      double s = 0.0;
      for (int i = 0; i < n; ++i) s += g.w[i] * std::pow(g.x[i], d);
      const double exact = d % 2 ? 0.0 : 2.0 / (d + 1);
      CHECK(s == doctest::Approx(exact).epsilon(1e-13));
    }
    for (int i = 1; i < n; ++i) CHECK(g.x[i] > g.x[i - 1]);
  }
}

TEST_CASE("geometric panels cover [0, L] with growing widths") {
  PanelSpec s;
  s.panels = 6;
  s.ratio = 1.5;
  const auto e = geometric_panels(10.0, s);
  REQUIRE(e.size() == 7);
  CHECK(e.front() == 0.0);
  CHECK(e.back() == 10.0);
  for (size_t i = 2; i < e.size(); ++i)
    CHECK(e[i] - e[i - 1] == doctest::Approx(1.5 * (e[i - 1] - e[i - 2])));
  s.first_width = 0.1;
  const auto f = geometric_panels(10.0, s);
  CHECK(f[1] - f[0] <= 0.1 + 1e-12);
  CHECK(f.back() == 10.0);
}

TEST_CASE("ray contour reproduces the Airy function") {
  for (double x : {-4.0, -1.0, 0.0, 0.7, 3.0}) {
    const double L = auto_truncation(1.0, x);
    const auto r = ray_rule(cplx(1.0, 0.0), kPi / 3, L);
    const cplx v = integrate1([x](cplx z) { return std::exp(z * z * z / 3.0 - z * x); }, r) /
                   cplx(0.0, 2 * kPi);
    CHECK(v.real() == doctest::Approx(oracle::ai(x)).epsilon(1e-12));
    CHECK(std::abs(v.imag()) < 1e-12);
  }
}

TEST_CASE("double contour integral factorizes") {
  const auto r = ray_rule(cplx(0.5, 0.0), kPi / 3, auto_truncation(1.0, 1.0));
  const double x = 0.3, y = -0.8;
  auto f = [](double s) { return [s](cplx z) { return std::exp(z * z * z / 3.0 - z * s); }; };
  const cplx prod = integrate1(f(x), r) * integrate1(f(y), r);
  const cplx dbl = integrate2([&](cplx z, cplx w) { return f(x)(z) * f(y)(w); }, r, r);
  CHECK(std::abs(prod - dbl) < 1e-12 * std::abs(prod));
}

TEST_CASE("ray_rule rejects degenerate input") {
  CHECK_THROWS_AS(ray_rule(cplx(0, 0), kPi / 3, -1.0), std::invalid_argument);
  CHECK_THROWS_AS(ray_rule(cplx(0, 0), 0.0, 5.0), std::invalid_argument);
}
