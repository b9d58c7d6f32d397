#pragma once
#include <Eigen/Dense>

namespace kpz {

// Dense real skew-symmetric matrix; symmetrized as (A - A^T)/2 on construction.
class SkewMatrix {
 public:
  explicit SkewMatrix(const Eigen::MatrixXd& a);
  int dim() const { return static_cast<int>(a_.rows()); }
  const Eigen::MatrixXd& matrix() const { return a_; }

 private:
  Eigen::MatrixXd a_;
};

// Parlett-Reid elimination with partial pivoting. Throws on odd dimension.
double pfaffian(const SkewMatrix& a);
double pfaffian(Eigen::MatrixXd a);  // takes ownership of a skew matrix, no symmetrization

}  // namespace kpz
