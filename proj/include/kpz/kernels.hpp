#pragma once
#include <memory>
#include <vector>

#include "kpz/kernel.hpp"
#include "kpz/quadrature.hpp"

namespace kpz {

// Resolution of every contour rule used by a kernel.
struct QuadOptions {
  PanelSpec panels;
  double length_scale = 1.0;  // multiplies every truncation length
  QuadOptions refined() const;  // doubled nodes, panels and length
};

// ---- Airy kernel (scalar) ----
double airy_kernel(double u, double v, const QuadOptions& q = {});
Eigen::MatrixXd airy_kernel_matrix(const std::vector<double>& xs, const std::vector<double>& ys,
                                   const QuadOptions& q = {}, bool reference = false,
                                   double* max_imag = nullptr);

// ---- GSE and GOE matrix kernels (one component) ----
class GseKernel : public MatrixKernel {
 public:
  explicit GseKernel(QuadOptions q = {}) : q_(q) {}
  int components() const override { return 1; }
  KernelBlock block(int, const std::vector<double>& xs, int,
                    const std::vector<double>& ys) const override;
  KernelBlock block_reference(int, const std::vector<double>& xs, int,
                              const std::vector<double>& ys) const override;

 private:
  KernelBlock eval(const std::vector<double>& xs, const std::vector<double>& ys, bool ref) const;
  QuadOptions q_;
};

class GoeKernel : public MatrixKernel {
 public:
  explicit GoeKernel(QuadOptions q = {}) : q_(q) {}
  int components() const override { return 1; }
  KernelBlock block(int, const std::vector<double>& xs, int,
                    const std::vector<double>& ys) const override;
  KernelBlock block_reference(int, const std::vector<double>& xs, int,
                              const std::vector<double>& ys) const override;
  double conjugation() const override { return 0.25; }

  // K12 with the w contour left of the origin and no residue correction.
  double k12_literal(double x, double y) const;

 private:
  KernelBlock eval(const std::vector<double>& xs, const std::vector<double>& ys, bool ref) const;
  QuadOptions q_;
};

// ---- finite-n half-space exponential LPP kernel ----
struct ExpKernelParams {
  double alpha = 1.0;
  std::vector<int> n, m;  // n increasing, m decreasing, n_i > m_i >= 1 (n_i = m_i allowed)
  int k() const { return static_cast<int>(n.size()); }
  void validate() const;
};

// Contour apexes of the I-part. An apex right of the pole at (2 alpha - 1)/2 where the
// definition puts the contour left of it is compensated by the crossed residue.
struct ExpApexes {
  double i11 = 0.25;
  double i12_z = 0.25, i12_w = 0.25;
  double i22 = 0.25;
};

enum class ExpEvaluation {
  kResidues,  // every contour integral closed on the poles to its right
  kContours,  // double integrals by quadrature on the given apexes
};

class ExpKernel : public MatrixKernel {
 public:
  explicit ExpKernel(ExpKernelParams p, QuadOptions q = {});
  ExpKernel(ExpKernelParams p, ExpApexes apexes, QuadOptions q = {});
  int components() const override { return p_.k(); }
  KernelBlock block(int ci, const std::vector<double>& xs, int cj,
                    const std::vector<double>& ys) const override;
  KernelBlock block_reference(int ci, const std::vector<double>& xs, int cj,
                              const std::vector<double>& ys) const override;
  double conjugation() const override;
  double component_conjugation(int i) const override;
  KernelBlock conjugated_block(int ci, const std::vector<double>& xs, int cj,
                               const std::vector<double>& ys, double rx, double ry,
                               bool reference) const override;
  const ExpKernelParams& params() const { return p_; }
  const ExpApexes& apexes() const { return apex_; }
  ExpEvaluation evaluation() const { return mode_; }
  static ExpApexes default_apexes(double alpha);

 private:
  KernelBlock eval(int ci, const std::vector<double>& xs, int cj, const std::vector<double>& ys,
                   bool ref, double ex, double ey) const;
  ExpKernelParams p_;
  ExpApexes apex_;
  QuadOptions q_;
  ExpEvaluation mode_;
};

// ---- crossover kernels ----
struct CrossKernelParams {
  double varpi = 0.0;
  std::vector<double> eta;  // nondecreasing, nonnegative
  int k() const { return static_cast<int>(eta.size()); }
  void validate() const;
};

// How the second-second entry is represented when varpi > 0.
enum class CrossR22 {
  kBounded,            // residue terms of the I-part and R-part cancelled, no exponential terms
  kWithResidueTerms,   // adds the two pure exponential terms
};

class CrossKernel : public MatrixKernel {
 public:
  CrossKernel(CrossKernelParams p, CrossR22 form = CrossR22::kBounded, QuadOptions q = {});
  int components() const override { return p_.k(); }
  KernelBlock block(int ci, const std::vector<double>& xs, int cj,
                    const std::vector<double>& ys) const override;
  KernelBlock block_reference(int ci, const std::vector<double>& xs, int cj,
                              const std::vector<double>& ys) const override;
  double conjugation() const override { return component_conjugation(0); }
  double component_conjugation(int i) const override;
  KernelBlock conjugated_block(int ci, const std::vector<double>& xs, int cj,
                               const std::vector<double>& ys, double rx, double ry,
                               bool reference) const override;
  const CrossKernelParams& params() const { return p_; }
  CrossR22 form() const { return form_; }

  // Second-second entry with every contour placed literally: I22 right of both poles,
  // the single integrals left of -varpi, the last one on a contour between -varpi and varpi.
  // Needs varpi != 0.
  double k22_literal(int ci, double x, int cj, double y) const;
  // First-second entry with the contours at the given apexes (w left of its pole).
  double k12_literal(int ci, double x, int cj, double y, double az, double aw) const;

 private:
  KernelBlock eval(int ci, const std::vector<double>& xs, int cj, const std::vector<double>& ys,
                   bool ref, double ex, double ey) const;
  CrossKernelParams p_;
  CrossR22 form_;
  QuadOptions q_;
};

// Normalization of the single-integral part of the SU kernel's second-second entry.
enum class SuR22 {
  kCrossLimit,     // prefactor -2: the varpi -> infinity limit of K^cross
  kHalfPrefactor,  // prefactor -1/2
};

class SuKernel : public MatrixKernel {
 public:
  explicit SuKernel(CrossKernelParams p, SuR22 form = SuR22::kCrossLimit, QuadOptions q = {});
  int components() const override { return p_.k(); }
  KernelBlock block(int ci, const std::vector<double>& xs, int cj,
                    const std::vector<double>& ys) const override;
  KernelBlock block_reference(int ci, const std::vector<double>& xs, int cj,
                              const std::vector<double>& ys) const override;
  double conjugation() const override { return component_conjugation(0); }
  double component_conjugation(int i) const override;
  KernelBlock conjugated_block(int ci, const std::vector<double>& xs, int cj,
                               const std::vector<double>& ys, double rx, double ry,
                               bool reference) const override;
  const CrossKernelParams& params() const { return p_; }
  SuR22 form() const { return form_; }

 private:
  KernelBlock eval(int ci, const std::vector<double>& xs, int cj, const std::vector<double>& ys,
                   bool ref, double ex, double ey) const;
  CrossKernelParams p_;
  SuR22 form_;
  QuadOptions q_;
};

// R12 of the crossover kernels (i < j, eta_i < eta_j), closed form.
double cross_r12(double eta_i, double eta_j, double x, double y);

// Pointwise conveniences.
Matrix22 gse_kernel(double x, double y);
Matrix22 goe_kernel(double x, double y);
Matrix22 exp_kernel(const ExpKernelParams& p, KernelPoint a, KernelPoint b);
Matrix22 cross_kernel(const CrossKernelParams& p, KernelPoint a, KernelPoint b);
Matrix22 su_kernel(const CrossKernelParams& p, KernelPoint a, KernelPoint b);

}  // namespace kpz
