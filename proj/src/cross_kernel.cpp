#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "contour_sum.hpp"
#include "kpz/kernels.hpp"

namespace kpz {

using detail::cubic_rule;
using detail::min_of;
using detail::real_part;
using detail::single_sum;

void CrossKernelParams::validate() const {
  if (!std::isfinite(varpi)) throw std::invalid_argument("crossover kernel: varpi must be finite");
  if (eta.empty()) throw std::invalid_argument("crossover kernel: eta must be nonempty");
  for (std::size_t i = 0; i < eta.size(); ++i) {
    if (!(eta[i] >= 0.0) || !std::isfinite(eta[i]))
      throw std::invalid_argument("crossover kernel: eta must be nonnegative");
    if (i > 0 && eta[i] < eta[i - 1])
      throw std::invalid_argument("crossover kernel: eta must be nondecreasing");
  }
}

namespace {

double log_erfc(double q) {
  if (q < 25.0) return std::log(std::erfc(q));
  const double r = 1.0 / (q * q);
  return -q * q - std::log(q * std::sqrt(kPi)) +
         std::log1p(r * (-0.5 + r * (0.75 + r * (-1.875 + r * 6.5625))));
}

double cube(double t) { return t * t * t; }

// e^{z^3/3 - x z + r x}
detail::PointFactor cubic_factor(double r) {
  return [r](cplx z, double x) { return std::exp(z * z * z / 3.0 - x * z + r * x); };
}

double r12_exponent(double ei, double ej, double x, double y) {
  const double d = ei - ej;
  return (-d * d * d * d + 6.0 * (x + y) * d * d + 3.0 * (x - y) * (x - y)) / (12.0 * d);
}

// -(1/2) (1/2 pi i) int z E(z) dz / ((varpi + z)(varpi - z)) on a contour between the two
// poles, E(z) = exp((z+ei)^3/3 + (-z+ej)^3/3 - x(z+ei) - y(-z+ej)). The cubic terms cancel,
// leaving a Gaussian; for ei + ej > 0 the value is antisymmetric and smooth, otherwise it
// is the x > y branch extended by antisymmetry.
double cross_last_term(double varpi, double ei, double ej, double x, double y, double shift) {
  const double p = std::abs(varpi), s = ei + ej, d = x - y;
  if (s == 0.0) {
    if (d == 0.0) return 0.0;
    return (d > 0.0 ? -0.25 : 0.25) * std::exp(-p * std::abs(d) + shift);
  }
  const double b = ei * ei - ej * ej - d, rs = 2.0 * std::sqrt(s);
  const double lc = (cube(ei) + cube(ej)) / 3.0 - x * ei - y * ej + s * p * p + shift;
  const double t1 = lc - b * p + log_erfc(-(b - 2.0 * s * p) / rs);
  const double t2 = lc + b * p + log_erfc((b + 2.0 * s * p) / rs);
  return 0.125 * (std::exp(t1) - std::exp(t2));
}

// -(1/2)(1/2 pi i) int z E(z) dz, E as above, ei + ej > 0.
double su_r22(double ei, double ej, double x, double y, double shift) {
  const double s = ei + ej, b = ei * ei - ej * ej - (x - y);
  if (b == 0.0) return 0.0;
  const double lc = (cube(ei) + cube(ej)) / 3.0 - x * ei - y * ej + shift;
  const double v = std::exp(lc + std::log(std::abs(b)) - b * b / (4.0 * s)) /
                   (4.0 * s * std::sqrt(4.0 * kPi * s));
  return b > 0.0 ? v : -v;
}

// (1/2 pi i) int e^{u^3/3 - x u - r x} du / (u - u0) on a contour right or left of u0.
Eigen::VectorXd pole_integral(double u0, bool left, const std::vector<double>& xs, double r,
                              const QuadOptions& q, double& max_imag) {
  auto f = [u0, r](cplx u, double x) { return std::exp(u * u * u / 3.0 - x * u - r * x) / (u - u0); };
  if (left && u0 >= 1.5)
    return real_part(single_sum(cubic_rule(1.0, min_of(xs), q), xs, f), max_imag);
  Eigen::VectorXd v = real_part(
      single_sum(cubic_rule(std::max(1.0, u0 + 0.5), min_of(xs), q), xs, f), max_imag);
  if (left)
    for (std::size_t a = 0; a < xs.size(); ++a)
      v(a) -= std::exp(cube(u0) / 3.0 - xs[a] * u0 - r * xs[a]);
  return v;
}

void add_r12(KernelBlock& b, double ei, double ej, const std::vector<double>& xs,
             const std::vector<double>& ys, double ex, double ey) {
  if (!(ei < ej))
    throw std::invalid_argument("crossover kernel: R12 needs strictly increasing eta");
  const double norm = std::sqrt(4.0 * kPi * (ej - ei));
  for (std::size_t a = 0; a < xs.size(); ++a)
    for (std::size_t c = 0; c < ys.size(); ++c)
      b.k12(a, c) -= std::exp(r12_exponent(ei, ej, xs[a], ys[c]) + ex * xs[a] - ey * ys[c]) / norm;
}

void check_components(int ci, int cj, int k) {
  if (ci < 0 || cj < 0 || ci >= k || cj >= k)
    throw std::out_of_range("crossover kernel: component index");
}

}  // namespace

double cross_r12(double eta_i, double eta_j, double x, double y) {
  if (!(eta_i < eta_j)) throw std::invalid_argument("cross_r12: need eta_i < eta_j");
  return -std::exp(r12_exponent(eta_i, eta_j, x, y)) / std::sqrt(4.0 * kPi * (eta_j - eta_i));
}

// ---- crossover ----

CrossKernel::CrossKernel(CrossKernelParams p, CrossR22 form, QuadOptions q)
    : p_(std::move(p)), form_(form), q_(q) {
  p_.validate();
}

// Rates must exceed the growth e^{-(varpi + eta_i) y} of the residue terms and increase with
// the component so that R12 decays along x = y.
double CrossKernel::component_conjugation(int i) const {
  return std::max(0.0, -(p_.varpi + p_.eta.at(i))) + 0.25 * (i + 1.0) / p_.k();
}

KernelBlock CrossKernel::block(int ci, const std::vector<double>& xs, int cj,
                               const std::vector<double>& ys) const {
  return eval(ci, xs, cj, ys, false, 0.0, 0.0);
}

KernelBlock CrossKernel::block_reference(int ci, const std::vector<double>& xs, int cj,
                                         const std::vector<double>& ys) const {
  return eval(ci, xs, cj, ys, true, 0.0, 0.0);
}

KernelBlock CrossKernel::conjugated_block(int ci, const std::vector<double>& xs, int cj,
                                          const std::vector<double>& ys, double rx, double ry,
                                          bool reference) const {
  return eval(ci, xs, cj, ys, reference, rx, ry);
}

KernelBlock CrossKernel::eval(int ci, const std::vector<double>& xs, int cj,
                              const std::vector<double>& ys, bool ref, double ex,
                              double ey) const {
  check_components(ci, cj, p_.k());
  const double vp = p_.varpi, ei = p_.eta[ci], ej = p_.eta[cj];
  const double xmin = min_of(xs), ymin = min_of(ys);
  const int nx = static_cast<int>(xs.size()), ny = static_cast<int>(ys.size());
  const detail::DoubleSum ds{ref};
  KernelBlock b;

  // I11
  {
    const auto rz = cubic_rule(std::max(1.0, ex + 0.5), xmin, q_);
    const auto rw = cubic_rule(std::max(1.0, ey + 0.5), ymin, q_);
    auto c = [=](cplx z, cplx w) {
      return (z + ei - w - ej) / (z + w + ei + ej) * (z + vp + ei) / (z + ei) * (w + vp + ej) /
             (w + ej);
    };
    b.k11 = real_part(ds(rz, xs, cubic_factor(ex), rw, ys, cubic_factor(ey), c), b.max_imag);
  }

  // I12; when the pole varpi + eta_j is not well right of the origin the w contour passes
  // to its right and the residue is added back
  {
    const double w0 = vp + ej;
    const bool moved = w0 < 1.5;
    const double aw = moved ? std::max(1.0, w0 + 0.5) : 1.0;
    const double az = std::max({1.0, ex + 0.5, ej - ei - aw + 0.5});
    const auto rz = cubic_rule(az, xmin, q_);
    const auto rw = cubic_rule(aw, ymin, q_);
    auto c = [=](cplx z, cplx w) {
      return (z + ei - w + ej) / (2.0 * (z + ei) * (z + ei + w - ej)) * (z + vp + ei) /
             (-w + vp + ej);
    };
    b.k12 = real_part(ds(rz, xs, cubic_factor(ex), rw, ys, cubic_factor(-ey), c), b.max_imag);
    if (moved) {
      auto f = [=](cplx z, double x) {
        return (z + ei - vp) / (2.0 * (z + ei)) * std::exp(z * z * z / 3.0 - x * z + ex * x);
      };
      const Eigen::VectorXd v = real_part(single_sum(rz, xs, f), b.max_imag);
      for (int a = 0; a < nx; ++a)
        for (int e = 0; e < ny; ++e)
          b.k12(a, e) += v(a) * std::exp(cube(w0) / 3.0 - ys[e] * w0 - ey * ys[e]);
    }
  }
  if (ci < cj) add_r12(b, ei, ej, xs, ys, ex, ey);

  // I22: for varpi >= 1 both contours pass between eta and eta + varpi, which absorbs the two
  // single integrals; otherwise they stay right of both poles and the single integrals are kept
  const bool between = vp >= 1.0;
  {
    const double off = between ? std::min(1.0, 0.5 * vp) : std::max(vp, 0.0) + 0.5;
    const auto rz = cubic_rule(ei + off, xmin, q_);
    const auto rw = cubic_rule(ej + off, ymin, q_);
    auto c = [=](cplx z, cplx w) {
      return (z - ei - w + ej) / (4.0 * (z - ei + w - ej) * (z - vp - ei) * (w - vp - ej));
    };
    b.k22 = real_part(ds(rz, xs, cubic_factor(-ex), rw, ys, cubic_factor(-ey), c), b.max_imag);
  }
  if (!between) {
    // contours right of -varpi when varpi > 0, left of it otherwise
    const bool left = vp <= 0.0;
    const Eigen::VectorXd sx = pole_integral(ei - vp, left, xs, ex, q_, b.max_imag);
    const Eigen::VectorXd sy = pole_integral(ej - vp, left, ys, ey, q_, b.max_imag);
    for (int a = 0; a < nx; ++a)
      for (int e = 0; e < ny; ++e) {
        const double x = xs[a], y = ys[e];
        b.k22(a, e) += -0.25 * sx(a) * std::exp(cube(vp + ej) / 3.0 - y * (vp + ej) - ey * y) +
                       0.25 * sy(e) * std::exp(cube(vp + ei) / 3.0 - x * (vp + ei) - ex * x);
      }
  }
  if (form_ == CrossR22::kWithResidueTerms && vp > 0.0) {
    for (int a = 0; a < nx; ++a)
      for (int e = 0; e < ny; ++e) {
        const double x = xs[a], y = ys[e], sh = -ex * x - ey * y;
        const double fi_m = cube(ei - vp) / 3.0 - x * (ei - vp);
        const double fj_p = cube(ej + vp) / 3.0 - y * (ej + vp);
        const double fj_m = cube(ej - vp) / 3.0 - y * (ej - vp);
        const double fi_p = cube(ei + vp) / 3.0 - x * (ei + vp);
        b.k22(a, e) += 0.25 * std::exp(fi_m + fj_p + sh) - 0.25 * std::exp(fj_m + fi_p + sh);
      }
  }
  for (int a = 0; a < nx; ++a)
    for (int e = 0; e < ny; ++e)
      b.k22(a, e) += cross_last_term(vp, ei, ej, xs[a], ys[e], -ex * xs[a] - ey * ys[e]);
  b.jump22 = ei + ej == 0.0;
  return b;
}

double CrossKernel::k12_literal(int ci, double x, int cj, double y, double az, double aw) const {
  check_components(ci, cj, p_.k());
  const double vp = p_.varpi, ei = p_.eta[ci], ej = p_.eta[cj];
  if (!(az > -ei && az + aw > ej - ei && aw < vp + ej))
    throw std::invalid_argument("k12_literal: apexes outside the constraint region");
  auto c = [=](cplx z, cplx w) {
    return (z + ei - w + ej) / (2.0 * (z + ei) * (z + ei + w - ej)) * (z + vp + ei) /
           (-w + vp + ej);
  };
  double im = 0.0;
  double v = real_part(detail::double_sum(cubic_rule(az, x, q_), {x}, cubic_factor(0.0),
                                          cubic_rule(aw, y, q_), {y}, cubic_factor(0.0), c),
                       im)(0, 0);
  if (ci < cj) v += cross_r12(ei, ej, x, y);
  return v;
}

double CrossKernel::k22_literal(int ci, double x, int cj, double y) const {
  check_components(ci, cj, p_.k());
  const double vp = p_.varpi;
  if (vp == 0.0) throw std::invalid_argument("k22_literal: needs varpi != 0");
  // value on the branch x - eta_i > y - eta_j
  auto branch = [&](int i, double u, int j, double v, bool last) {
    const double ei = p_.eta[i], ej = p_.eta[j];
    double im = 0.0;
    const double bz = std::max(ei, ei + vp) + 0.5, bw = std::max(ej, ej + vp) + 0.5;
    auto c = [=](cplx z, cplx w) {
      return (z - ei - w + ej) / (4.0 * (z - ei + w - ej) * (z - vp - ei) * (w - vp - ej));
    };
    double val = real_part(detail::double_sum(cubic_rule(bz, u, q_), {u}, cubic_factor(0.0),
                                              cubic_rule(bw, v, q_), {v}, cubic_factor(0.0), c),
                           im)(0, 0);
    // single integrals on contours left of -varpi, in the variable z + eta
    auto left_integral = [&](double eta, double t) {
      const double u0 = eta - vp;
      auto f = [u0](cplx s, double xx) { return std::exp(s * s * s / 3.0 - xx * s) / (s - u0); };
      return real_part(single_sum(cubic_rule(u0 - 0.5, t, q_), {t}, f), im)(0);
    };
    val += -0.25 * left_integral(ei, u) * std::exp(cube(vp + ej) / 3.0 - v * (vp + ej));
    val += 0.25 * left_integral(ej, v) * std::exp(cube(vp + ei) / 3.0 - u * (vp + ei));
    if (!last) return val;
    const double s = ei + ej;
    auto h = [=](cplx z, double) {
      const cplx e = (z + ei) * (z + ei) * (z + ei) / 3.0 + (-z + ej) * (-z + ej) * (-z + ej) / 3.0 -
                     u * (z + ei) - v * (-z + ej);
      return z * std::exp(e) / ((vp + z) * (vp - z));
    };
    const QuadratureRule r = s > 0.0
                                 ? ray_rule(cplx(0.0, 0.0), kPi / 2.0, std::sqrt(80.0 / s) + 4.0,
                                            q_.panels)
                                 : ray_rule(cplx(0.0, 0.0), kPi / 3.0, 80.0 / (u - v), q_.panels);
    val += -0.5 * real_part(single_sum(r, {0.0}, h), im)(0);
    return val;
  };
  const double d = (x - p_.eta[ci]) - (y - p_.eta[cj]);
  const bool degenerate = p_.eta[ci] + p_.eta[cj] == 0.0;
  if (d > 0.0) return branch(ci, x, cj, y, true);
  if (d < 0.0) return -branch(cj, y, ci, x, true);
  return 0.5 * (branch(ci, x, cj, y, !degenerate) - branch(cj, y, ci, x, !degenerate));
}

Matrix22 cross_kernel(const CrossKernelParams& p, KernelPoint a, KernelPoint b) {
  return CrossKernel(p)(a, b);
}

// ---- symplectic-unitary ----

SuKernel::SuKernel(CrossKernelParams p, SuR22 form, QuadOptions q)
    : p_(std::move(p)), form_(form), q_(q) {
  p_.validate();
  for (double e : p_.eta)
    if (!(e > 0.0))
      throw std::invalid_argument("SU kernel: needs eta > 0 (use the crossover kernel at eta = 0)");
}

double SuKernel::component_conjugation(int i) const { return 0.25 * (i + 1.0) / p_.k(); }

KernelBlock SuKernel::block(int ci, const std::vector<double>& xs, int cj,
                            const std::vector<double>& ys) const {
  return eval(ci, xs, cj, ys, false, 0.0, 0.0);
}

KernelBlock SuKernel::block_reference(int ci, const std::vector<double>& xs, int cj,
                                      const std::vector<double>& ys) const {
  return eval(ci, xs, cj, ys, true, 0.0, 0.0);
}

KernelBlock SuKernel::conjugated_block(int ci, const std::vector<double>& xs, int cj,
                                       const std::vector<double>& ys, double rx, double ry,
                                       bool reference) const {
  return eval(ci, xs, cj, ys, reference, rx, ry);
}

KernelBlock SuKernel::eval(int ci, const std::vector<double>& xs, int cj,
                           const std::vector<double>& ys, bool ref, double ex, double ey) const {
  check_components(ci, cj, p_.k());
  const double ei = p_.eta[ci], ej = p_.eta[cj];
  const double xmin = min_of(xs), ymin = min_of(ys);
  const detail::DoubleSum ds{ref};
  KernelBlock b;
  {
    const auto rz = cubic_rule(std::max(1.0, ex + 0.5), xmin, q_);
    const auto rw = cubic_rule(std::max(1.0, ey + 0.5), ymin, q_);
    auto c = [=](cplx z, cplx w) {
      return (z + ei - w - ej) / (4.0 * (z + ei) * (w + ej) * (z + w + ei + ej));
    };
    b.k11 = real_part(ds(rz, xs, cubic_factor(ex), rw, ys, cubic_factor(ey), c), b.max_imag);
  }
  {
    const double az = std::max(1.0, ex + 0.5), aw = std::max(1.0, ej - ei - az + 0.5);
    const auto rz = cubic_rule(az, xmin, q_);
    const auto rw = cubic_rule(aw, ymin, q_);
    auto c = [=](cplx z, cplx w) {
      return (z + ei - w + ej) / (2.0 * (z + ei) * (z + w + ei - ej));
    };
    b.k12 = real_part(ds(rz, xs, cubic_factor(ex), rw, ys, cubic_factor(-ey), c), b.max_imag);
  }
  if (ci < cj) add_r12(b, ei, ej, xs, ys, ex, ey);
  {
    const auto rz = cubic_rule(std::max(1.0, ei + 0.5), xmin, q_);
    const auto rw = cubic_rule(std::max(1.0, ej + 0.5), ymin, q_);
    auto c = [=](cplx z, cplx w) { return (z - ei - w + ej) / (z - ei + w - ej); };
    b.k22 = real_part(ds(rz, xs, cubic_factor(-ex), rw, ys, cubic_factor(-ey), c), b.max_imag);
  }
  const double r22 = form_ == SuR22::kCrossLimit ? 4.0 : 1.0;
  for (std::size_t a = 0; a < xs.size(); ++a)
    for (std::size_t e = 0; e < ys.size(); ++e)
      b.k22(a, e) += r22 * su_r22(ei, ej, xs[a], ys[e], -ex * xs[a] - ey * ys[e]);
  return b;
}

Matrix22 su_kernel(const CrossKernelParams& p, KernelPoint a, KernelPoint b) {
  return SuKernel(p)(a, b);
}

}  // namespace kpz
