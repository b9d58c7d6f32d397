#include "kpz/distributions.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <stdexcept>

namespace kpz {

double gaussian_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

NystromSpec default_spec(double map_scale, bool verify) {
  NystromSpec s;
  s.scale = map_scale;
  s.nodes = verify ? 96 : 48;
  return s;
}

double finite_n_map_scale(const ExpKernelParams& p) {
  const int n = p.n.empty() ? 1 : *std::max_element(p.n.begin(), p.n.end());
  return 4.0 * std::max(1.0, std::cbrt(n / 4.0));
}

double f_gue(double x, const NystromSpec& spec) {
  return fredholm_det(
      [](const std::vector<double>& a, const std::vector<double>& b) {
        return airy_kernel_matrix(a, b);
      },
      x, spec);
}
double f_goe(double x, const NystromSpec& spec) {
  return fredholm_pf(GoeKernel{}, DomainDk{{x}}, spec);
}
double f_gse(double x, const NystromSpec& spec) {
  return fredholm_pf(GseKernel{}, DomainDk{{x}}, spec);
}

double finite_n_lpp_cdf(const std::vector<double>& h, const ExpKernelParams& p,
                        const NystromSpec& spec) {
  p.validate();
  if (static_cast<int>(h.size()) != p.k()) throw std::invalid_argument("one threshold per point");
  for (double v : h)
    if (!(v > 0.0)) throw std::invalid_argument("thresholds must be positive");
  return fredholm_pf(ExpKernel(p), DomainDk{h}, spec);
}
double finite_n_lpp_cdf(const std::vector<double>& h, const ExpKernelParams& p) {
  return finite_n_lpp_cdf(h, p, default_spec(finite_n_map_scale(p)));
}

double cross_cdf(const std::vector<double>& h, double varpi, const std::vector<double>& eta,
                 const NystromSpec& spec) {
  if (h.size() != eta.size()) throw std::invalid_argument("one threshold per eta");
  return fredholm_pf(CrossKernel(CrossKernelParams{varpi, eta}), DomainDk{h}, spec);
}
double cross_cdf(const std::vector<double>& h, double varpi, const std::vector<double>& eta) {
  return cross_cdf(h, varpi, eta, default_spec());
}

double su_cdf(const std::vector<double>& h, const std::vector<double>& eta,
              const NystromSpec& spec) {
  if (h.size() != eta.size()) throw std::invalid_argument("one threshold per eta");
  return fredholm_pf(SuKernel(CrossKernelParams{0.0, eta}), DomainDk{h}, spec);
}
double su_cdf(const std::vector<double>& h, const std::vector<double>& eta) {
  return su_cdf(h, eta, default_spec());
}

std::string family_name(Family f) {
  switch (f) {
    case Family::kGaussian: return "gaussian";
    case Family::kGue: return "gue";
    case Family::kGoe: return "goe";
    case Family::kGse: return "gse";
    case Family::kFiniteN: return "finite_n";
    case Family::kCross: return "cross";
    case Family::kSu: return "su";
  }
  return "unknown";
}

// ---- CdfHandle ----

CdfHandle::CdfHandle(Family f, NystromSpec spec)
    : family_(f), spec_(spec), memo_(std::make_shared<Memo>()) {}

CdfHandle CdfHandle::gaussian() { return CdfHandle(Family::kGaussian, {}); }
CdfHandle CdfHandle::gue(NystromSpec spec) { return CdfHandle(Family::kGue, spec); }
CdfHandle CdfHandle::goe(NystromSpec spec) {
  CdfHandle c(Family::kGoe, spec);
  c.kernel_ = std::make_shared<GoeKernel>();
  return c;
}
CdfHandle CdfHandle::gse(NystromSpec spec) {
  CdfHandle c(Family::kGse, spec);
  c.kernel_ = std::make_shared<GseKernel>();
  return c;
}
CdfHandle CdfHandle::finite_n(ExpKernelParams p) {
  const double s = finite_n_map_scale(p);
  return finite_n(std::move(p), default_spec(s));
}
CdfHandle CdfHandle::finite_n(ExpKernelParams p, NystromSpec spec) {
  CdfHandle c(Family::kFiniteN, spec);
  c.kernel_ = std::make_shared<ExpKernel>(p);
  c.exp_ = std::move(p);
  return c;
}
CdfHandle CdfHandle::cross(double varpi, std::vector<double> eta, NystromSpec spec) {
  CdfHandle c(Family::kCross, spec);
  c.kernel_ = std::make_shared<CrossKernel>(CrossKernelParams{varpi, eta});
  c.varpi_ = varpi;
  c.eta_ = std::move(eta);
  return c;
}
CdfHandle CdfHandle::su(std::vector<double> eta, NystromSpec spec) {
  CdfHandle c(Family::kSu, spec);
  c.kernel_ = std::make_shared<SuKernel>(CrossKernelParams{0.0, eta});
  c.eta_ = std::move(eta);
  return c;
}

int CdfHandle::components() const { return kernel_ ? kernel_->components() : 1; }

void CdfHandle::set_spec(const NystromSpec& spec) {
  spec_ = spec;
  memo_ = std::make_shared<Memo>();
}

double CdfHandle::evaluate(const std::vector<double>& h) const {
  switch (family_) {
    case Family::kGaussian: return gaussian_cdf(h[0]);
    case Family::kGue: return f_gue(h[0], spec_);
    case Family::kFiniteN:
      for (double v : h)
        if (!(v > 0.0)) return 0.0;
      [[fallthrough]];
    default: return fredholm_pf(*kernel_, DomainDk{h}, spec_);
  }
}

double CdfHandle::operator()(const std::vector<double>& h) const {
  if (static_cast<int>(h.size()) != components())
    throw std::invalid_argument("threshold count does not match the family");
  {
    std::lock_guard<std::mutex> lock(memo_->mu);
    auto it = memo_->values.find(h);
    if (it != memo_->values.end()) return it->second;
  }
  const double v = evaluate(h);
  std::lock_guard<std::mutex> lock(memo_->mu);
  memo_->values.emplace(h, v);
  return v;
}

std::vector<double> CdfHandle::tabulate(const std::vector<double>& xs) const {
  std::vector<double> out(xs.size());
  const int n = static_cast<int>(xs.size());
#pragma omp parallel for schedule(dynamic)
  for (int i = 0; i < n; ++i) out[i] = (*this)(xs[i]);
  return out;
}

size_t CdfHandle::cached() const {
  std::lock_guard<std::mutex> lock(memo_->mu);
  return memo_->values.size();
}

// ---- TabulatedCdf ----

TabulatedCdf::TabulatedCdf(std::vector<double> xs, std::vector<double> fs)
    : x_(std::move(xs)), f_(std::move(fs)) {
  const size_t n = x_.size();
  if (n < 2 || f_.size() != n) throw std::invalid_argument("need at least two table points");
  // Fritsch-Carlson slopes keep the interpolant monotone
  std::vector<double> del(n - 1);
  for (size_t i = 0; i + 1 < n; ++i) del[i] = (f_[i + 1] - f_[i]) / (x_[i + 1] - x_[i]);
  d_.assign(n, 0.0);
  d_[0] = del[0];
  d_[n - 1] = del[n - 2];
  for (size_t i = 1; i + 1 < n; ++i) {
    if (del[i - 1] * del[i] <= 0.0) continue;
    const double h0 = x_[i] - x_[i - 1], h1 = x_[i + 1] - x_[i];
    const double w1 = 2 * h1 + h0, w2 = h1 + 2 * h0;
    d_[i] = (w1 + w2) / (w1 / del[i - 1] + w2 / del[i]);
  }
}

TabulatedCdf TabulatedCdf::from(const CdfHandle& f, double lo, double hi, double step) {
  std::vector<double> xs;
  const int n = static_cast<int>(std::lround((hi - lo) / step));
  for (int i = 0; i <= n; ++i) xs.push_back(lo + i * step);
  std::vector<double> fs = f.tabulate(xs);
  return TabulatedCdf(std::move(xs), std::move(fs));
}

double TabulatedCdf::operator()(double x) const {
  if (x <= x_.front()) return std::clamp(f_.front(), 0.0, 1.0);
  if (x >= x_.back()) return std::clamp(f_.back(), 0.0, 1.0);
  const size_t i = std::upper_bound(x_.begin(), x_.end(), x) - x_.begin() - 1;
  const double h = x_[i + 1] - x_[i], t = (x - x_[i]) / h;
  const double h00 = (1 + 2 * t) * (1 - t) * (1 - t), h10 = t * (1 - t) * (1 - t);
  const double h01 = t * t * (3 - 2 * t), h11 = t * t * (t - 1);
  const double v = h00 * f_[i] + h10 * h * d_[i] + h01 * f_[i + 1] + h11 * h * d_[i + 1];
  return std::clamp(v, 0.0, 1.0);
}

void write_cdf_table(const std::string& path, const std::vector<double>& xs,
                     const std::vector<double>& fs) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << "x,F\n" << std::setprecision(12);
  for (size_t i = 0; i < xs.size(); ++i) out << xs[i] << ',' << fs[i] << '\n';
}

}  // namespace kpz
