#include "contour_sum.hpp"

#include <cmath>

namespace kpz::detail {

Eigen::MatrixXcd factor_matrix(const QuadratureRule& r, const std::vector<double>& xs,
                               const PointFactor& f) {
  const int nx = static_cast<int>(xs.size()), np = static_cast<int>(r.size());
  Eigen::MatrixXcd out(nx, np);
#pragma omp parallel for schedule(static)
  for (int a = 0; a < nx; ++a)
    for (int p = 0; p < np; ++p) out(a, p) = r.weights[p] * f(r.nodes[p], xs[a]);
  return out;
}

Eigen::MatrixXcd coupling_matrix(const QuadratureRule& rz, const QuadratureRule& rw,
                                 const Coupling& c) {
  const int np = static_cast<int>(rz.size()), nq = static_cast<int>(rw.size());
  Eigen::MatrixXcd out(np, nq);
#pragma omp parallel for schedule(static)
  for (int p = 0; p < np; ++p)
    for (int q = 0; q < nq; ++q) out(p, q) = c(rz.nodes[p], rw.nodes[q]);
  return out;
}

Eigen::MatrixXcd double_sum(const QuadratureRule& rz, const std::vector<double>& xs,
                            const PointFactor& f, const QuadratureRule& rw,
                            const std::vector<double>& ys, const PointFactor& g,
                            const Coupling& c) {
  const Eigen::MatrixXcd fz = factor_matrix(rz, xs, f);
  const Eigen::MatrixXcd gw = factor_matrix(rw, ys, g);
  const Eigen::MatrixXcd cc = coupling_matrix(rz, rw, c);
  const Eigen::MatrixXcd left = fz * cc;
  return (left * gw.transpose()) / (kTwoPiI * kTwoPiI);
}

Eigen::MatrixXcd double_sum_reference(const QuadratureRule& rz, const std::vector<double>& xs,
                                      const PointFactor& f, const QuadratureRule& rw,
                                      const std::vector<double>& ys, const PointFactor& g,
                                      const Coupling& c) {
  const int nx = static_cast<int>(xs.size()), ny = static_cast<int>(ys.size());
  Eigen::MatrixXcd out(nx, ny);
  for (int a = 0; a < nx; ++a) {
    for (int b = 0; b < ny; ++b) {
      cplx sum = 0.0;
      for (std::size_t p = 0; p < rz.size(); ++p) {
        const cplx fp = rz.weights[p] * f(rz.nodes[p], xs[a]);
        cplx inner = 0.0;
        for (std::size_t q = 0; q < rw.size(); ++q)
          inner += c(rz.nodes[p], rw.nodes[q]) * rw.weights[q] * g(rw.nodes[q], ys[b]);
        sum += fp * inner;
      }
      out(a, b) = sum / (kTwoPiI * kTwoPiI);
    }
  }
  return out;
}

Eigen::VectorXcd single_sum(const QuadratureRule& r, const std::vector<double>& xs,
                            const PointFactor& f) {
  const int nx = static_cast<int>(xs.size());
  Eigen::VectorXcd out(nx);
  for (int a = 0; a < nx; ++a) {
    cplx sum = 0.0;
    for (std::size_t p = 0; p < r.size(); ++p) sum += r.weights[p] * f(r.nodes[p], xs[a]);
    out(a) = sum / kTwoPiI;
  }
  return out;
}

Eigen::MatrixXd real_part(const Eigen::MatrixXcd& m, double& max_imag) {
  for (Eigen::Index a = 0; a < m.rows(); ++a)
    for (Eigen::Index b = 0; b < m.cols(); ++b)
      max_imag = std::max(max_imag, std::abs(m(a, b).imag()) / (1.0 + std::abs(m(a, b).real())));
  return m.real();
}

Eigen::VectorXd real_part(const Eigen::VectorXcd& v, double& max_imag) {
  for (Eigen::Index a = 0; a < v.size(); ++a)
    max_imag = std::max(max_imag, std::abs(v(a).imag()) / (1.0 + std::abs(v(a).real())));
  return v.real();
}

}  // namespace kpz::detail
