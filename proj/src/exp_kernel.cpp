#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "contour_sum.hpp"
#include "kpz/kernels.hpp"

namespace kpz {

void ExpKernelParams::validate() const {
  if (!(alpha > 0.0)) throw std::invalid_argument("exp kernel: alpha must be positive");
  if (n.empty() || n.size() != m.size())
    throw std::invalid_argument("exp kernel: n and m must be nonempty and of equal length");
  for (std::size_t i = 0; i < n.size(); ++i) {
    if (m[i] < 1 || n[i] < m[i])
      throw std::invalid_argument("exp kernel: need n_i >= m_i >= 1");
    if (i > 0 && !(n[i] > n[i - 1] && m[i] < m[i - 1]))
      throw std::invalid_argument("exp kernel: n must increase and m decrease");
  }
}

namespace {

constexpr double kMerge = 1e-12;

// scale * prod_k (z - c_k)^{e_k}
struct PoleProduct {
  double scale = 1.0;
  std::vector<std::pair<double, int>> f;

  // multiplies by (coeff * (z - c))^e
  PoleProduct& lin(double c, int e, double coeff = 1.0) {
    if (e == 0) return *this;
    scale *= std::pow(coeff, e);
    for (auto& [cc, ee] : f)
      if (std::abs(cc - c) < kMerge) {
        ee += e;
        return *this;
      }
    f.emplace_back(c, e);
    return *this;
  }
  PoleProduct& one_plus_2z(int e) { return lin(-0.5, e, 2.0); }
  PoleProduct& one_minus_2z(int e) { return lin(0.5, e, -2.0); }

  int order(double z0) const {
    for (const auto& [c, e] : f)
      if (std::abs(c - z0) < kMerge) return std::max(0, -e);
    return 0;
  }
};

// Taylor data of s^k R(z0 + s) up to s^{k-1}, k the pole order.
struct PoleData {
  double z0 = 0.0;
  std::vector<double> reg;
  int order() const { return static_cast<int>(reg.size()); }
};

std::vector<double> series_mul(const std::vector<double>& a, const std::vector<double>& b) {
  std::vector<double> out(a.size(), 0.0);
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; i + j < a.size(); ++j) out[i + j] += a[i] * b[j];
  return out;
}

std::vector<PoleData> poles_of(const PoleProduct& r, std::vector<double> candidates) {
  std::sort(candidates.begin(), candidates.end());
  std::vector<PoleData> out;
  for (std::size_t q = 0; q < candidates.size(); ++q) {
    const double z0 = candidates[q];
    if (q > 0 && std::abs(z0 - candidates[q - 1]) < kMerge) continue;
    const int k = r.order(z0);
    if (k == 0) continue;
    std::vector<double> reg(k, 0.0);
    reg[0] = r.scale;
    for (const auto& [c, e] : r.f) {
      if (std::abs(c - z0) < kMerge) continue;
      const double a = z0 - c;
      std::vector<double> ser(k);
      double coef = std::pow(a, e);
      for (int j = 0; j < k; ++j) {
        ser[j] = coef;
        coef *= (e - j) / ((j + 1.0) * a);
      }
      reg = series_mul(reg, ser);
    }
    out.push_back({z0, std::move(reg)});
  }
  return out;
}

// Laurent coefficients [s^{-1-a}] of R(z0 + s) e^{-x (z0 + s) + shift}, a = 0..k-1.
std::vector<double> laurent(const PoleData& pd, double x, double shift = 0.0) {
  const int k = pd.order();
  std::vector<double> ex(k);
  ex[0] = 1.0;
  for (int j = 1; j < k; ++j) ex[j] = ex[j - 1] * (-x) / j;
  const double s = std::exp(-x * pd.z0 + shift);
  std::vector<double> out(k, 0.0);
  for (int a = 0; a < k; ++a) {
    double sum = 0.0;
    for (int l = 0; l <= k - 1 - a; ++l) sum += pd.reg[l] * ex[k - 1 - a - l];
    out[a] = s * sum;
  }
  return out;
}

// Sum of residues of R(z) e^{-xz + shift} at the given poles.
double residue_sum(const std::vector<PoleData>& poles, double x, double shift = 0.0) {
  double sum = 0.0;
  for (const auto& pd : poles) sum += laurent(pd, x, shift)[0];
  return sum;
}

enum class CouplingKind { k11, k12, k22 };

// Taylor coefficients C(a, b) of the coupling at (z0 + s, w0 + t).
Eigen::MatrixXd coupling_coeffs(CouplingKind kind, double z0, double w0, int kz, int kw) {
  auto mul = [kz, kw](const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
    Eigen::MatrixXd out = Eigen::MatrixXd::Zero(kz, kw);
    for (int i = 0; i < kz; ++i)
      for (int j = 0; j < kw; ++j)
        for (int k = 0; k <= i; ++k)
          for (int l = 0; l <= j; ++l) out(i, j) += a(k, l) * b(i - k, j - l);
    return out;
  };
  Eigen::MatrixXd lin = Eigen::MatrixXd::Zero(kz, kw);
  lin(0, 0) = z0 - w0;
  if (kz > 1) lin(1, 0) = 1.0;
  if (kw > 1) lin(0, 1) = -1.0;
  Eigen::MatrixXd inv_sum(kz, kw);
  for (int i = 0; i < kz; ++i) {
    double binom = 1.0;  // C(i + j, i)
    for (int j = 0; j < kw; ++j) {
      if (j > 0) binom *= static_cast<double>(i + j) / j;
      inv_sum(i, j) = ((i + j) % 2 ? -1.0 : 1.0) * binom / std::pow(z0 + w0, i + j + 1);
    }
  }
  Eigen::MatrixXd c = mul(lin, inv_sum);
  if (kind != CouplingKind::k22) {
    Eigen::MatrixXd inv_z = Eigen::MatrixXd::Zero(kz, kw);
    for (int i = 0; i < kz; ++i) inv_z(i, 0) = (i % 2 ? -1.0 : 1.0) / std::pow(z0, i + 1);
    c = mul(c, inv_z);
  }
  if (kind == CouplingKind::k11) {
    Eigen::MatrixXd inv_w = Eigen::MatrixXd::Zero(kz, kw);
    for (int j = 0; j < kw; ++j) inv_w(0, j) = (j % 2 ? -1.0 : 1.0) / std::pow(w0, j + 1);
    c = mul(c, inv_w);
  }
  const double scale = kind == CouplingKind::k11 ? 0.25 : (kind == CouplingKind::k12 ? 0.5 : 1.0);
  return scale * c;
}

// (2 pi i)^{-2} double integral with both contours closed on the given poles.
// Row x carries the extra factor e^{rx x}, column y carries e^{ry y}.
Eigen::MatrixXd double_residue(CouplingKind kind, const std::vector<PoleData>& pz,
                               const std::vector<double>& xs, const std::vector<PoleData>& pw,
                               const std::vector<double>& ys, double rx, double ry,
                               bool reference) {
  int kz = 0, kw = 0;
  for (const auto& p : pz) kz += p.order();
  for (const auto& p : pw) kw += p.order();
  const int nx = static_cast<int>(xs.size()), ny = static_cast<int>(ys.size());
  if (kz == 0 || kw == 0) return Eigen::MatrixXd::Zero(nx, ny);
  Eigen::MatrixXd c(kz, kw);
  for (int oz = 0, a = 0; a < static_cast<int>(pz.size()); oz += pz[a].order(), ++a)
    for (int ow = 0, b = 0; b < static_cast<int>(pw.size()); ow += pw[b].order(), ++b)
      c.block(oz, ow, pz[a].order(), pw[b].order()) =
          coupling_coeffs(kind, pz[a].z0, pw[b].z0, pz[a].order(), pw[b].order());
  auto coeffs = [](const std::vector<PoleData>& poles, double x, double rate) {
    std::vector<double> out;
    for (const auto& pd : poles) {
      const auto l = laurent(pd, x, rate * x);
      out.insert(out.end(), l.begin(), l.end());
    }
    return Eigen::VectorXd(Eigen::Map<const Eigen::VectorXd>(out.data(), out.size()));
  };
  if (reference) {
    Eigen::MatrixXd out(nx, ny);
    for (int a = 0; a < nx; ++a)
      for (int b = 0; b < ny; ++b) out(a, b) = coeffs(pz, xs[a], rx).dot(c * coeffs(pw, ys[b], ry));
    return out;
  }
  Eigen::MatrixXd fa(nx, kz), gb(ny, kw);
#pragma omp parallel for schedule(static)
  for (int a = 0; a < nx; ++a) fa.row(a) = coeffs(pz, xs[a], rx).transpose();
#pragma omp parallel for schedule(static)
  for (int b = 0; b < ny; ++b) gb.row(b) = coeffs(pw, ys[b], ry).transpose();
  return fa * c * gb.transpose();
}

// Rule on C_apex^{pi/3}; truncated where the measured log-modulus has dropped far below its peak.
QuadratureRule measured_rule(double apex, double delta, const std::function<double(cplx)>& logmag,
                             const QuadOptions& q) {
  const cplx dir = std::polar(1.0, kPi / 3.0);
  const double target = 16.0 * std::log(10.0) + 4.0;
  double peak = logmag(cplx(apex, 0.0));
  double L = 0.0;
  for (double u = 0.25 * delta; u < 1e7; u *= 1.15) {
    const double v = logmag(apex + u * dir);
    peak = std::max(peak, v);
    if (v < peak - target) {
      L = u;
      break;
    }
  }
  if (L == 0.0) throw std::runtime_error("exp kernel: integrand does not decay along the contour");
  PanelSpec spec = q.panels;
  const double fw = 0.5 * delta / q.length_scale;
  spec.first_width = spec.first_width > 0.0 ? std::min(spec.first_width, fw) : fw;
  return ray_rule(cplx(apex, 0.0), kPi / 3.0, L * q.length_scale, spec);
}

}  // namespace

ExpKernel::ExpKernel(ExpKernelParams p, QuadOptions q)
    : p_(std::move(p)), apex_(default_apexes(p_.alpha)), q_(q), mode_(ExpEvaluation::kResidues) {
  p_.validate();
}

ExpKernel::ExpKernel(ExpKernelParams p, ExpApexes apexes, QuadOptions q)
    : p_(std::move(p)), apex_(apexes), q_(q), mode_(ExpEvaluation::kContours) {
  p_.validate();
  const double pole = p_.alpha - 0.5;
  const auto& a = apex_;
  auto bad = [](const char* what) { throw std::invalid_argument(std::string("exp kernel: ") + what); };
  if (!(a.i11 > 0.0 && a.i11 < 0.5)) bad("I11 apex must lie in (0, 1/2)");
  if (!(a.i12_z > 0.0 && a.i12_z < 0.5)) bad("I12 z apex must lie in (0, 1/2)");
  if (!(a.i12_w < 0.5 && a.i12_z + a.i12_w > 0.0 && a.i12_w != pole))
    bad("I12 w apex must satisfy a_z + a_w > 0, a_w < 1/2, a_w != (2 alpha - 1)/2");
  if (!(a.i22 > 0.0 && a.i22 < 0.5 && a.i22 != pole)) bad("I22 apex must lie in (0, 1/2)");
}

ExpApexes ExpKernel::default_apexes(double alpha) {
  const double p = alpha - 0.5;
  ExpApexes a;
  a.i11 = 0.25;
  a.i12_z = 0.25;
  a.i12_w = p > 0.25 ? 0.5 * std::min(p, 0.5) : 0.5 * (std::max(p, 0.0) + 0.5);
  a.i22 = p > 0.25 ? 0.5 * std::min(p, 0.5) : (p > 0.0 ? 0.5 * (p + 0.5) : 0.25);
  return a;
}

double ExpKernel::conjugation() const { return component_conjugation(0); }

// Rates increase with the component so that R12 (i < j), bounded along x = y, decays there.
double ExpKernel::component_conjugation(int i) const {
  const double lo = std::max(0.0, 0.5 - p_.alpha), hi = 0.5;
  return lo + (hi - lo) * (i + 1.0) / (p_.k() + 1.0);
}

KernelBlock ExpKernel::block(int ci, const std::vector<double>& xs, int cj,
                             const std::vector<double>& ys) const {
  return eval(ci, xs, cj, ys, false, 0.0, 0.0);
}

KernelBlock ExpKernel::block_reference(int ci, const std::vector<double>& xs, int cj,
                                       const std::vector<double>& ys) const {
  return eval(ci, xs, cj, ys, true, 0.0, 0.0);
}

KernelBlock ExpKernel::conjugated_block(int ci, const std::vector<double>& xs, int cj,
                                        const std::vector<double>& ys, double rx, double ry,
                                        bool reference) const {
  if (mode_ == ExpEvaluation::kContours)
    return MatrixKernel::conjugated_block(ci, xs, cj, ys, rx, ry, reference);
  return eval(ci, xs, cj, ys, reference, rx, ry);
}

KernelBlock ExpKernel::eval(int ci, const std::vector<double>& xs, int cj,
                            const std::vector<double>& ys, bool ref, double ex,
                            double ey) const {
  if (ci < 0 || cj < 0 || ci >= p_.k() || cj >= p_.k())
    throw std::out_of_range("exp kernel: component index");
  const double al = p_.alpha, p = al - 0.5;
  const int ni = p_.n[ci], mi = p_.m[ci], nj = p_.n[cj], mj = p_.m[cj];
  const int nx = static_cast<int>(xs.size()), ny = static_cast<int>(ys.size());
  auto cst = [al](int n, int m) { return std::pow(2.0 * al, m) / std::pow(2.0 - 2.0 * al, n); };
  // residues at (1 - 2 alpha)/2 and 1/2 of (1+2z)^m / ((1-2z)^n (z + p)) e^{-xz}
  auto psi = [p](int n, int m) {
    PoleProduct r;
    r.one_plus_2z(m).one_minus_2z(-n).lin(-p, -1);
    return r;
  };

  KernelBlock b;
  // ---- I-part ----
  if (mode_ == ExpEvaluation::kResidues) {
    PoleProduct z11, w11, z12, w12, z22, w22;
    z11.one_plus_2z(ni).one_minus_2z(-mi).lin(-p, 1, 2.0);
    w11.one_plus_2z(nj).one_minus_2z(-mj).lin(-p, 1, 2.0);
    z12 = z11;
    w12.one_plus_2z(mj).one_minus_2z(-nj).lin(p, -1, -2.0);
    z22.one_plus_2z(mi).one_minus_2z(-ni).lin(p, -1, -2.0);
    w22.one_plus_2z(mj).one_minus_2z(-nj).lin(p, -1, -2.0);
    const std::vector<double> half{0.5}, both{p, 0.5};
    const auto& right22 = al > 0.5 ? both : half;
    b.k11 = double_residue(CouplingKind::k11, poles_of(z11, half), xs, poles_of(w11, half), ys,
                           ex, ey, ref);
    b.k12 = double_residue(CouplingKind::k12, poles_of(z12, half), xs, poles_of(w12, both), ys,
                           ex, -ey, ref);
    b.k22 = double_residue(CouplingKind::k22, poles_of(z22, right22), xs, poles_of(w22, right22),
                           ys, -ex, -ey, ref);
  } else {
    using detail::min_of;
    const detail::DoubleSum ds{ref};
    const double xmin = min_of(xs), ymin = min_of(ys);
    if (!(xmin > 0.0 && ymin > 0.0))
      throw std::invalid_argument("exp kernel: contour evaluation needs positive arguments");
    auto log_f11 = [al](int n, int m) {
      return [=](cplx z, double x) {
        return -x * z + double(n) * std::log(1.0 + 2.0 * z) - double(m) * std::log(1.0 - 2.0 * z) +
               std::log(2.0 * z + 2.0 * al - 1.0);
      };
    };
    auto log_g = [al](int n, int m) {
      return [=](cplx w, double y) {
        return -y * w + double(m) * std::log(1.0 + 2.0 * w) - double(n) * std::log(1.0 - 2.0 * w) -
               std::log(2.0 * al - 1.0 - 2.0 * w);
      };
    };
    auto as_factor = [](auto lf) { return [lf](cplx z, double x) { return std::exp(lf(z, x)); }; };
    auto logmag_at = [](auto lf, double x) { return [lf, x](cplx z) { return lf(z, x).real(); }; };
    double im = 0.0;

    const double a11 = apex_.i11;
    const double d11 = std::min(a11, 0.5 - a11);
    const auto r11z = measured_rule(a11, d11, logmag_at(log_f11(ni, mi), xmin), q_);
    const auto r11w = measured_rule(a11, d11, logmag_at(log_f11(nj, mj), ymin), q_);
    b.k11 = detail::real_part(
        ds(r11z, xs, as_factor(log_f11(ni, mi)), r11w, ys, as_factor(log_f11(nj, mj)),
           [](cplx z, cplx w) { return (z - w) / (4.0 * z * w * (z + w)); }),
        im);

    const double az = apex_.i12_z, aw = apex_.i12_w;
    const double dz = std::min({az, 0.5 - az, az + aw});
    const double dw = std::min({std::abs(aw - p), 0.5 - aw, az + aw});
    const auto r12z = measured_rule(az, dz, logmag_at(log_f11(ni, mi), xmin), q_);
    const auto r12w = measured_rule(aw, dw, logmag_at(log_g(nj, mj), ymin), q_);
    b.k12 = detail::real_part(ds(r12z, xs, as_factor(log_f11(ni, mi)), r12w, ys,
                                 as_factor(log_g(nj, mj)),
                                 [](cplx z, cplx w) { return (z - w) / (2.0 * z * (z + w)); }),
                              im);
    if (aw > p) {
      // w was moved right of its pole at (2 alpha - 1)/2
      auto lu = [=](cplx z, double x) {
        return -x * z + double(ni) * std::log(1.0 + 2.0 * z) -
               double(mi) * std::log(1.0 - 2.0 * z) + std::log((z - p) / z);
      };
      const auto ru = measured_rule(az, std::min(az, 0.5 - az), logmag_at(lu, xmin), q_);
      const Eigen::VectorXd u = detail::real_part(detail::single_sum(ru, xs, as_factor(lu)), im);
      const double c = 0.5 * cst(nj, mj);
      for (int a = 0; a < nx; ++a)
        for (int e = 0; e < ny; ++e) b.k12(a, e) += c * std::exp(-p * ys[e]) * u(a);
    }

    const double bb = apex_.i22;
    double d22 = std::min({bb, 0.5 - bb});
    if (al > 0.5) d22 = std::min(d22, std::abs(bb - p));
    const auto r22z = measured_rule(bb, d22, logmag_at(log_g(ni, mi), xmin), q_);
    const auto r22w = measured_rule(bb, d22, logmag_at(log_g(nj, mj), ymin), q_);
    b.k22 = detail::real_part(ds(r22z, xs, as_factor(log_g(ni, mi)), r22w, ys,
                                 as_factor(log_g(nj, mj)),
                                 [](cplx z, cplx w) { return (z - w) / (z + w); }),
                              im);
    if (al > 0.5 && bb > p) {
      // both contours moved right of (2 alpha - 1)/2
      auto ls = [=](int n, int m) {
        return [=](cplx z, double x) {
          return -x * z + double(m) * std::log(1.0 + 2.0 * z) -
                 double(n) * std::log(1.0 - 2.0 * z) - std::log(z + p);
        };
      };
      const double ds2 = std::min({bb, 0.5 - bb});
      const auto rsx = measured_rule(bb, ds2, logmag_at(ls(ni, mi), xmin), q_);
      const auto rsy = measured_rule(bb, ds2, logmag_at(ls(nj, mj), ymin), q_);
      const Eigen::VectorXd sx = detail::real_part(detail::single_sum(rsx, xs, as_factor(ls(ni, mi))), im);
      const Eigen::VectorXd sy = detail::real_part(detail::single_sum(rsy, ys, as_factor(ls(nj, mj))), im);
      const double ci_ = cst(ni, mi), cj_ = cst(nj, mj);
      for (int a = 0; a < nx; ++a)
        for (int e = 0; e < ny; ++e)
          b.k22(a, e) += -0.25 * cj_ * std::exp(-p * ys[e]) * sx(a) +
                         0.25 * ci_ * std::exp(-p * xs[a]) * sy(e);
    }
    b.max_imag = im;
  }

  // ---- R-part: closed on its poles ----
  // g(d, shift): the x > y branch of the |x - y| term as an analytic function of d = x - y
  std::function<double(double, double)> g_ij, g_ji;
  Eigen::MatrixXd t = Eigen::MatrixXd::Zero(nx, ny);  // terms in x and y separately
  if (al == 0.5) {
    auto chi = [](int n, int m) {
      PoleProduct r;
      r.one_plus_2z(m).one_minus_2z(-n).lin(0.0, -1, 4.0);
      return poles_of(r, {0.5});
    };
    const auto cx = chi(ni, mi), cy = chi(nj, mj);
    for (int a = 0; a < nx; ++a)
      for (int e = 0; e < ny; ++e)
        t(a, e) = residue_sum(cx, xs[a], -ex * xs[a] - ey * ys[e]) -
                  residue_sum(cy, ys[e], -ex * xs[a] - ey * ys[e]);
    auto gbar = [](int n1, int m1, int n2, int m2) {
      PoleProduct r;
      r.one_plus_2z(m1 - n2).one_minus_2z(m2 - n1).lin(0.0, -1, 2.0);
      const auto pl = poles_of(r, {0.5});
      return [pl](double d, double shift) {
        return -residue_sum(pl, d, shift) - 0.25 * std::exp(shift);
      };
    };
    g_ij = gbar(ni, mi, nj, mj);
    g_ji = gbar(nj, mj, ni, mi);
  } else {
    auto phi = [p](int n1, int m1, int n2, int m2) {
      PoleProduct r;
      r.one_plus_2z(m1 - n2).one_minus_2z(m2 - n1).lin(0.0, 1, 2.0).lin(p, -1, -2.0).lin(-p, -1, 2.0);
      const auto pl = poles_of(r, {std::abs(p), 0.5});
      return [pl](double d, double shift) { return residue_sum(pl, d, shift); };
    };
    g_ij = phi(ni, mi, nj, mj);
    g_ji = phi(nj, mj, ni, mi);
    if (al < 0.5) {
      const auto sx = poles_of(psi(ni, mi), {-p, 0.5}), sy = poles_of(psi(nj, mj), {-p, 0.5});
      const double cy = -0.25 * cst(nj, mj), cx = 0.25 * cst(ni, mi);
      for (int a = 0; a < nx; ++a)
        for (int e = 0; e < ny; ++e) {
          const double x = xs[a], y = ys[e];
          // residue sums enter with a minus sign: the contour lies left of (1 - 2 alpha)/2
          t(a, e) = -cy * residue_sum(sx, x, -(p + ey) * y - ex * x) -
                    cx * residue_sum(sy, y, -(p + ex) * x - ey * y);
        }
    }
  }
  for (int a = 0; a < nx; ++a)
    for (int e = 0; e < ny; ++e) {
      const double d = xs[a] - ys[e], shift = -ex * xs[a] - ey * ys[e];
      double v;
      if (d > 0)
        v = g_ij(d, shift);
      else if (d < 0)
        v = -g_ji(-d, shift);
      else
        v = 0.5 * (g_ij(0.0, shift) - g_ji(0.0, shift));
      b.k22(a, e) += t(a, e) + v;
    }
  b.jump22 = true;

  if (ci < cj) {
    PoleProduct r;
    r.one_plus_2z(ni - nj).one_minus_2z(mj - mi);
    const auto pl = poles_of(r, {0.5});
    for (int a = 0; a < nx; ++a)
      for (int e = 0; e < ny; ++e)
        b.k12(a, e) += residue_sum(pl, std::abs(xs[a] - ys[e]), ex * xs[a] - ey * ys[e]);
    b.jump12 = true;
  }
  return b;
}

Matrix22 exp_kernel(const ExpKernelParams& p, KernelPoint a, KernelPoint b) {
  return ExpKernel(p)(a, b);
}

}  // namespace kpz
