#pragma once
// Factorized evaluation of double contour integrals over node sets.
#include <Eigen/Dense>
#include <functional>
#include <vector>

#include "kpz/quadrature.hpp"

namespace kpz::detail {

using PointFactor = std::function<cplx(cplx, double)>;
using Coupling = std::function<cplx(cplx, cplx)>;

// F(a, p) = weight_p * f(node_p, x_a)
Eigen::MatrixXcd factor_matrix(const QuadratureRule& r, const std::vector<double>& xs,
                               const PointFactor& f);
// C(p, q) = c(z_p, w_q)
Eigen::MatrixXcd coupling_matrix(const QuadratureRule& rz, const QuadratureRule& rw,
                                 const Coupling& c);

// (2 pi i)^{-2} sum_{p,q} w_p f(z_p, x_a) c(z_p, w_q) w_q g(w_q, y_b)
Eigen::MatrixXcd double_sum(const QuadratureRule& rz, const std::vector<double>& xs,
                            const PointFactor& f, const QuadratureRule& rw,
                            const std::vector<double>& ys, const PointFactor& g,
                            const Coupling& c);
// Same sum entry by entry, serially.
Eigen::MatrixXcd double_sum_reference(const QuadratureRule& rz, const std::vector<double>& xs,
                                      const PointFactor& f, const QuadratureRule& rw,
                                      const std::vector<double>& ys, const PointFactor& g,
                                      const Coupling& c);

// (2 pi i)^{-1} sum_p w_p f(z_p, x_a)
Eigen::VectorXcd single_sum(const QuadratureRule& r, const std::vector<double>& xs,
                            const PointFactor& f);

// Real part; records the largest imaginary part relative to 1 + |value|.
Eigen::MatrixXd real_part(const Eigen::MatrixXcd& m, double& max_imag);
Eigen::VectorXd real_part(const Eigen::VectorXcd& v, double& max_imag);

// Selects a reference or factorized evaluation.
struct DoubleSum {
  bool reference = false;
  Eigen::MatrixXcd operator()(const QuadratureRule& rz, const std::vector<double>& xs,
                              const PointFactor& f, const QuadratureRule& rw,
                              const std::vector<double>& ys, const PointFactor& g,
                              const Coupling& c) const {
    return reference ? double_sum_reference(rz, xs, f, rw, ys, g, c)
                     : double_sum(rz, xs, f, rw, ys, g, c);
  }
};

inline const cplx kTwoPiI{0.0, 2.0 * kPi};

}  // namespace kpz::detail

#include "kpz/kernels.hpp"

namespace kpz::detail {

// Rule on C_a^phi for integrands e^{z^3/3 - x z} (phi = pi/3) or e^{-w^3/3 + w y}
// (phi = 2 pi/3), truncated for the smallest argument x_min.
QuadratureRule cubic_rule(double apex, double x_min, const QuadOptions& q, double phi = kPi / 3.0);

inline double min_of(const std::vector<double>& v) {
  double m = v.empty() ? 0.0 : v[0];
  for (double t : v) m = std::min(m, t);
  return m;
}

}  // namespace kpz::detail
