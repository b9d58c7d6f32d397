#pragma once
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include "kpz/fredholm.hpp"
#include "kpz/kernels.hpp"

namespace kpz {

double gaussian_cdf(double x);

// Tracy-Widom laws with the default resolution (48 nodes, map scale 2).
double f_gue(double x, const NystromSpec& spec = {});
double f_goe(double x, const NystromSpec& spec = {});
double f_gse(double x, const NystromSpec& spec = {});

// P(H(n_1,m_1) < h_1, ..., H(n_k,m_k) < h_k), h_i > 0.
double finite_n_lpp_cdf(const std::vector<double>& h, const ExpKernelParams& p);
double finite_n_lpp_cdf(const std::vector<double>& h, const ExpKernelParams& p,
                        const NystromSpec& spec);
double cross_cdf(const std::vector<double>& h, double varpi, const std::vector<double>& eta);
double cross_cdf(const std::vector<double>& h, double varpi, const std::vector<double>& eta,
                 const NystromSpec& spec);
double su_cdf(const std::vector<double>& h, const std::vector<double>& eta);
double su_cdf(const std::vector<double>& h, const std::vector<double>& eta,
              const NystromSpec& spec);

// Map scale used when none is given: 2 for the limit laws, growing like n^{1/3} for finite n.
NystromSpec default_spec(double map_scale = 2.0, bool verify = false);
double finite_n_map_scale(const ExpKernelParams& p);

enum class Family { kGaussian, kGue, kGoe, kGse, kFiniteN, kCross, kSu };

std::string family_name(Family f);

// Memoized CDF of one family with fixed parameters.
class CdfHandle {
 public:
  static CdfHandle gaussian();
  static CdfHandle gue(NystromSpec spec = default_spec());
  static CdfHandle goe(NystromSpec spec = default_spec());
  static CdfHandle gse(NystromSpec spec = default_spec());
  static CdfHandle finite_n(ExpKernelParams p);
  static CdfHandle finite_n(ExpKernelParams p, NystromSpec spec);
  static CdfHandle cross(double varpi, std::vector<double> eta,
                         NystromSpec spec = default_spec());
  static CdfHandle su(std::vector<double> eta, NystromSpec spec = default_spec());

  Family family() const { return family_; }
  int components() const;
  const NystromSpec& spec() const { return spec_; }
  // Drops memoized values when the resolution changes.
  void set_spec(const NystromSpec& spec);

  double operator()(const std::vector<double>& h) const;
  double operator()(double h) const { return (*this)(std::vector<double>{h}); }

  // One-point values on a grid, evaluated in parallel.
  std::vector<double> tabulate(const std::vector<double>& xs) const;
  size_t cached() const;

 private:
  CdfHandle(Family f, NystromSpec spec);
  double evaluate(const std::vector<double>& h) const;

  Family family_;
  NystromSpec spec_;
  double varpi_ = 0.0;
  std::vector<double> eta_;
  ExpKernelParams exp_;
  std::shared_ptr<const MatrixKernel> kernel_;
  struct Memo {
    std::mutex mu;
    std::map<std::vector<double>, double> values;
  };
  std::shared_ptr<Memo> memo_;
};

// Piecewise cubic Hermite interpolant of a tabulated CDF, clamped to [0,1].
class TabulatedCdf {
 public:
  TabulatedCdf() = default;
  TabulatedCdf(std::vector<double> xs, std::vector<double> fs);
  static TabulatedCdf from(const CdfHandle& f, double lo, double hi, double step);
  double operator()(double x) const;
  const std::vector<double>& xs() const { return x_; }
  const std::vector<double>& fs() const { return f_; }

 private:
  std::vector<double> x_, f_, d_;
};

// CSV with header "x,F" and one row per grid point.
void write_cdf_table(const std::string& path, const std::vector<double>& xs,
                     const std::vector<double>& fs);

}  // namespace kpz
