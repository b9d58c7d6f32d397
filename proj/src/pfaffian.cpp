#include "kpz/pfaffian.hpp"

#include <cmath>
#include <stdexcept>

namespace kpz {

SkewMatrix::SkewMatrix(const Eigen::MatrixXd& a) {
  if (a.rows() != a.cols()) throw std::invalid_argument("SkewMatrix: not square");
  a_ = 0.5 * (a - a.transpose());
}

double pfaffian(const SkewMatrix& a) { return pfaffian(a.matrix()); }

double pfaffian(Eigen::MatrixXd a) {
  const int n = static_cast<int>(a.rows());
  if (n != a.cols()) throw std::invalid_argument("pfaffian: not square");
  if (n % 2 != 0) throw std::invalid_argument("pfaffian: odd dimension");
  if (n == 0) return 1.0;
  double pf = 1.0;
  for (int k = 0; k < n - 1; k += 2) {
    // pivot: largest entry of column k below the diagonal
    int kp = k + 1;
    double best = std::abs(a(k + 1, k));
    for (int i = k + 2; i < n; ++i) {
      if (std::abs(a(i, k)) > best) {
        best = std::abs(a(i, k));
        kp = i;
      }
    }
    if (kp != k + 1) {
      a.row(k + 1).swap(a.row(kp));
      a.col(k + 1).swap(a.col(kp));
      pf = -pf;
    }
    if (std::abs(a(k + 1, k)) < 1e-30) return 0.0;
    const double piv = a(k, k + 1);
    pf *= piv;
    if (k + 2 < n) {
      const int m = n - k - 2;
      const Eigen::VectorXd tau = a.row(k).segment(k + 2, m).transpose() / piv;
      const Eigen::VectorXd col = a.col(k + 1).segment(k + 2, m);
      a.block(k + 2, k + 2, m, m).noalias() += tau * col.transpose() - col * tau.transpose();
    }
  }
  return pf;
}

}  // namespace kpz
