#pragma once
#include <Eigen/Dense>
#include <memory>
#include <vector>

namespace kpz {

// A point of {0..k-1} x R. Components are 0-based in code.
struct KernelPoint {
  int i = 0;
  double x = 0.0;
};

struct Matrix22 {
  double k11 = 0, k12 = 0, k21 = 0, k22 = 0;
};

// Kernel entries between the points xs of component ci (rows) and ys of component cj (columns).
// Entries are the full pointwise values, with sgn(0) = 0 on jump lines.
// An entry flagged as jumping is analytic on either side of the line x - y = shift.
struct KernelBlock {
  Eigen::MatrixXd k11, k12, k22;
  bool jump12 = false, jump22 = false;
  double shift12 = 0.0, shift22 = 0.0;
  double max_imag = 0.0;  // largest discarded imaginary part
};

class MatrixKernel {
 public:
  virtual ~MatrixKernel() = default;
  virtual int components() const = 0;

  // Factorized assembly, parallel over rows.
  virtual KernelBlock block(int ci, const std::vector<double>& xs, int cj,
                            const std::vector<double>& ys) const = 0;
  // Serial pointwise double sums; same values as block().
  virtual KernelBlock block_reference(int ci, const std::vector<double>& xs, int cj,
                                      const std::vector<double>& ys) const {
    return block(ci, xs, cj, ys);
  }

  // Conjugation rate to use before discretizing (0 = none).
  virtual double conjugation() const { return 0.0; }
  // Rate for one component; kernels coupling components along x = y may stagger these.
  virtual double component_conjugation(int) const { return conjugation(); }
  // Block with rows scaled by rate rx and columns by rate ry, as in ConjugatedKernel.
  virtual KernelBlock conjugated_block(int ci, const std::vector<double>& xs, int cj,
                                       const std::vector<double>& ys, double rx, double ry,
                                       bool reference) const;

  Matrix22 operator()(KernelPoint p, KernelPoint q) const;
};

// K'11 = e^{ex+ey} K11, K'12 = e^{ex-ey} K12, K'22 = e^{-ex-ey} K22.
class ConjugatedKernel : public MatrixKernel {
 public:
  ConjugatedKernel(std::shared_ptr<const MatrixKernel> base, double rate);
  int components() const override { return base_->components(); }
  KernelBlock block(int ci, const std::vector<double>& xs, int cj,
                    const std::vector<double>& ys) const override;
  KernelBlock block_reference(int ci, const std::vector<double>& xs, int cj,
                              const std::vector<double>& ys) const override;
  double rate() const { return rate_; }

 private:
  std::shared_ptr<const MatrixKernel> base_;
  double rate_;
};

std::shared_ptr<const MatrixKernel> conjugate_kernel(std::shared_ptr<const MatrixKernel> k,
                                                     double rate);

// Applies the conjugation above to a block evaluated at xs (rows) and ys (columns).
void conjugate_block(KernelBlock& b, const std::vector<double>& xs, const std::vector<double>& ys,
                     double rx, double ry);

}  // namespace kpz
