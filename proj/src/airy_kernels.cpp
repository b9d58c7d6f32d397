#include <cmath>

#include "contour_sum.hpp"
#include "kpz/kernels.hpp"

namespace kpz {

using detail::double_sum;
using detail::min_of;
using detail::real_part;

QuadOptions QuadOptions::refined() const {
  QuadOptions r = *this;
  r.panels.nodes_per_panel *= 2;
  r.panels.panels *= 2;
  r.panels.ratio = std::sqrt(r.panels.ratio);
  if (r.panels.first_width > 0.0) r.panels.first_width *= 0.5;
  r.length_scale *= 2.0;
  return r;
}

namespace detail {

QuadratureRule cubic_rule(double apex, double x_min, const QuadOptions& q, double phi) {
  // log-modulus of the integrand along the outgoing ray
  const cplx dir = std::polar(1.0, phi);
  const bool w_side = phi > kPi / 2;
  auto logmag = [&](double u) {
    const cplx z = apex + u * dir;
    const cplx e = w_side ? (-z * z * z / 3.0 + x_min * z) : (z * z * z / 3.0 - x_min * z);
    return e.real();
  };
  const double s = std::max(0.0, 0.5 * (apex * apex - x_min)) + 0.5 * std::abs(apex);
  double L = auto_truncation(1.0, s);
  const double target = 16.0 * std::log(10.0) + 2.0;
  double peak = logmag(0.0);
  for (double u = 0.0; u < L; u += L / 400.0) peak = std::max(peak, logmag(u));
  while (logmag(L) > peak - target) L *= 1.1;
  return ray_rule(cplx(apex, 0.0), phi, (L + 0.5) * q.length_scale, q.panels);
}

}  // namespace detail

namespace {

inline cplx cubic_exp(cplx z, double x) { return std::exp(z * z * z / 3.0 - x * z); }

}  // namespace

Eigen::MatrixXd airy_kernel_matrix(const std::vector<double>& xs, const std::vector<double>& ys,
                                   const QuadOptions& q, bool reference, double* max_imag) {
  const auto rz = detail::cubic_rule(1.0, min_of(xs), q);
  const auto rw = detail::cubic_rule(-1.0, min_of(ys), q, 2.0 * kPi / 3.0);
  auto f = [](cplx z, double x) { return cubic_exp(z, x); };
  auto g = [](cplx w, double y) { return std::exp(-w * w * w / 3.0 + w * y); };
  auto c = [](cplx z, cplx w) { return 1.0 / (z - w); };
  const detail::DoubleSum ds{reference};
  double im = 0.0;
  Eigen::MatrixXd out = real_part(ds(rz, xs, f, rw, ys, g, c), im);
  if (max_imag) *max_imag = im;
  return out;
}

double airy_kernel(double u, double v, const QuadOptions& q) {
  return airy_kernel_matrix({u}, {v}, q)(0, 0);
}

// ---- GSE ----

KernelBlock GseKernel::eval(const std::vector<double>& xs, const std::vector<double>& ys,
                            bool ref) const {
  const auto rz = detail::cubic_rule(1.0, min_of(xs), q_);
  const auto rw = detail::cubic_rule(1.0, min_of(ys), q_);
  auto e = [](cplx z, double x) { return cubic_exp(z, x); };
  const detail::DoubleSum ds{ref};
  KernelBlock b;
  b.k11 = real_part(ds(rz, xs, e, rw, ys, e,
                       [](cplx z, cplx w) { return (z - w) / (4.0 * z * w * (z + w)); }),
                    b.max_imag);
  b.k12 = real_part(
      ds(rz, xs, e, rw, ys, e, [](cplx z, cplx w) { return (z - w) / (4.0 * z * (z + w)); }),
      b.max_imag);
  b.k22 = real_part(
      ds(rz, xs, e, rw, ys, e, [](cplx z, cplx w) { return (z - w) / (4.0 * (z + w)); }),
      b.max_imag);
  return b;
}

KernelBlock GseKernel::block(int, const std::vector<double>& xs, int,
                             const std::vector<double>& ys) const {
  return eval(xs, ys, false);
}
KernelBlock GseKernel::block_reference(int, const std::vector<double>& xs, int,
                                       const std::vector<double>& ys) const {
  return eval(xs, ys, true);
}

// ---- GOE ----

KernelBlock GoeKernel::eval(const std::vector<double>& xs, const std::vector<double>& ys,
                            bool ref) const {
  const auto rz = detail::cubic_rule(1.0, min_of(xs), q_);
  const auto rw = detail::cubic_rule(1.0, min_of(ys), q_);
  auto e = [](cplx z, double x) { return cubic_exp(z, x); };
  auto e_over_z = [](cplx z, double x) { return cubic_exp(z, x) / z; };
  const detail::DoubleSum ds{ref};
  KernelBlock b;
  b.k11 = real_part(
      ds(rz, xs, e, rw, ys, e, [](cplx z, cplx w) { return (z - w) / (z + w); }), b.max_imag);

  // w contour moved right of the pole at 0; the residue contributes Ai(x)/2
  const Eigen::VectorXd ai = real_part(detail::single_sum(rz, xs, e), b.max_imag);
  b.k12 = real_part(ds(rz, xs, e, rw, ys, e,
                       [](cplx z, cplx w) { return (w - z) / (2.0 * w * (z + w)); }),
                    b.max_imag);
  b.k12.colwise() += 0.5 * ai;

  const Eigen::VectorXd sx = real_part(detail::single_sum(rz, xs, e_over_z), b.max_imag);
  const Eigen::VectorXd sy = real_part(detail::single_sum(rw, ys, e_over_z), b.max_imag);
  b.k22 = real_part(ds(rz, xs, e, rw, ys, e,
                       [](cplx z, cplx w) { return (z - w) / (4.0 * z * w * (z + w)); }),
                    b.max_imag);
  const int nx = static_cast<int>(xs.size()), ny = static_cast<int>(ys.size());
  for (int a = 0; a < nx; ++a)
    for (int c = 0; c < ny; ++c) {
      const double d = xs[a] - ys[c];
      const double sg = d > 0 ? 1.0 : (d < 0 ? -1.0 : 0.0);
      b.k22(a, c) += 0.25 * (sy(c) - sx(a)) - 0.25 * sg;
    }
  b.jump22 = true;
  return b;
}

KernelBlock GoeKernel::block(int, const std::vector<double>& xs, int,
                             const std::vector<double>& ys) const {
  return eval(xs, ys, false);
}
KernelBlock GoeKernel::block_reference(int, const std::vector<double>& xs, int,
                                       const std::vector<double>& ys) const {
  return eval(xs, ys, true);
}

double GoeKernel::k12_literal(double x, double y) const {
  const auto rz = detail::cubic_rule(1.0, x, q_);
  const auto rwl = detail::cubic_rule(-0.5, y, q_);
  auto e = [](cplx z, double t) { return cubic_exp(z, t); };
  double im = 0.0;
  return real_part(double_sum(rz, {x}, e, rwl, {y}, e,
                              [](cplx z, cplx w) { return (w - z) / (2.0 * w * (z + w)); }),
                   im)(0, 0);
}

Matrix22 gse_kernel(double x, double y) { return GseKernel{}({0, x}, {0, y}); }
Matrix22 goe_kernel(double x, double y) { return GoeKernel{}({0, x}, {0, y}); }

}  // namespace kpz
