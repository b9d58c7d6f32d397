#pragma once
#include <Eigen/Dense>
#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/special_functions/airy.hpp>
#include <cmath>
#include <vector>

// Reference values built from Boost Airy functions and Boost Gauss-Legendre rules,
// sharing no code with the library.
namespace oracle {

inline double ai(double x) { return boost::math::airy_ai(x); }
inline double aip(double x) { return boost::math::airy_ai_prime(x); }

inline double airy_kernel(double x, double y) {
  if (std::abs(x - y) < 1e-9) return aip(x) * aip(x) - x * ai(x) * ai(x);
  return (ai(x) * aip(y) - aip(x) * ai(y)) / (x - y);
}

// 100-point Gauss-Legendre rule on [a, b].
inline void gl_rule(double a, double b, std::vector<double>& x, std::vector<double>& w) {
  using G = boost::math::quadrature::gauss<double, 100>;
  const auto& ab = G::abscissa();
  const auto& wt = G::weights();
  x.clear();
  w.clear();
  const double c = 0.5 * (a + b), h = 0.5 * (b - a);
  for (size_t i = 0; i < ab.size(); ++i) {
    x.push_back(c - h * ab[i]);
    w.push_back(h * wt[i]);
    x.push_back(c + h * ab[i]);
    w.push_back(h * wt[i]);
  }
}

// det(I + sign * K) on L^2(a, a + len).
template <class K>
double det_on(K k, double a, double len, double sign) {
  std::vector<double> x, w;
  gl_rule(a, a + len, x, w);
  const int n = static_cast<int>(x.size());
  Eigen::MatrixXd m(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      m(i, j) = (i == j ? 1.0 : 0.0) + sign * std::sqrt(w[i] * w[j]) * k(x[i], x[j]);
  return m.determinant();
}

// int_R e^{c l} Ai(x + l) Ai(y + l) dl, c > 0, by panels of the 100-point rule on [-60, 12].
inline double airy_product_integral(double c, double x, double y) {
  std::vector<double> nodes, w;
  double v = 0.0;
  for (double a = -60.0; a < 12.0; a += 4.0) {
    gl_rule(a, a + 4.0, nodes, w);
    for (size_t i = 0; i < nodes.size(); ++i)
      v += w[i] * std::exp(c * nodes[i]) * ai(x + nodes[i]) * ai(y + nodes[i]);
  }
  return v;
}

inline double f_gue(double s) { return det_on(airy_kernel, s, 16.0, -1.0); }

// det(I - B) with B(x,y) = Ai(x + y + s) on (0, inf).
inline double f_goe(double s) {
  return det_on([s](double x, double y) { return ai(x + y + s); }, 0.0, 16.0, -1.0);
}

// (det(I - B) + det(I + B)) / 2 with B(x,y) = Ai((x + y)/2 + s) / 2 on (0, inf).
inline double f_gse(double s) {
  auto b = [s](double x, double y) { return 0.5 * ai(0.5 * (x + y) + s); };
  return 0.5 * (det_on(b, 0.0, 30.0, -1.0) + det_on(b, 0.0, 30.0, 1.0));
}

// P(Gamma(2, alpha) + Exp(1) <= h), the law of H(2,2).
inline double hypoexp_2_2(double alpha, double h) {
  if (std::abs(alpha - 1.0) < 1e-12) return 1 - std::exp(-h) * (1 + h + h * h / 2);
  const double g = 1 - std::exp(-alpha * h) * (1 + alpha * h);
  const double b = 1 - alpha;
  const double inner = std::exp(b * h) * (h / b - 1 / (b * b)) + 1 / (b * b);
  return g - std::exp(-h) * alpha * alpha * inner;
}

}  // namespace oracle
