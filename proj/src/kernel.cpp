#include "kpz/kernel.hpp"

#include <algorithm>
#include <cmath>

namespace kpz {

Matrix22 MatrixKernel::operator()(KernelPoint p, KernelPoint q) const {
  const KernelBlock pq = block(p.i, {p.x}, q.i, {q.x});
  const KernelBlock qp = block(q.i, {q.x}, p.i, {p.x});
  return Matrix22{pq.k11(0, 0), pq.k12(0, 0), -qp.k12(0, 0), pq.k22(0, 0)};
}

KernelBlock MatrixKernel::conjugated_block(int ci, const std::vector<double>& xs, int cj,
                                           const std::vector<double>& ys, double rx, double ry,
                                           bool reference) const {
  KernelBlock b = reference ? block_reference(ci, xs, cj, ys) : block(ci, xs, cj, ys);
  conjugate_block(b, xs, ys, rx, ry);
  return b;
}

ConjugatedKernel::ConjugatedKernel(std::shared_ptr<const MatrixKernel> base, double rate)
    : base_(std::move(base)), rate_(rate) {}

void conjugate_block(KernelBlock& b, const std::vector<double>& xs, const std::vector<double>& ys,
                     double rx, double ry) {
  if (rx == 0.0 && ry == 0.0) return;
  const int nx = static_cast<int>(xs.size()), ny = static_cast<int>(ys.size());
  // growth factors are capped; entries far out have underflowed to zero already
  auto fac = [](double t) { return std::exp(std::clamp(t, -350.0, 350.0)); };
  Eigen::VectorXd ex(nx), ey(ny), ix(nx), iy(ny);
  for (int a = 0; a < nx; ++a) {
    ex(a) = fac(rx * xs[a]);
    ix(a) = fac(-rx * xs[a]);
  }
  for (int c = 0; c < ny; ++c) {
    ey(c) = fac(ry * ys[c]);
    iy(c) = fac(-ry * ys[c]);
  }
  b.k11 = ex.asDiagonal() * b.k11 * ey.asDiagonal();
  b.k12 = ex.asDiagonal() * b.k12 * iy.asDiagonal();
  b.k22 = ix.asDiagonal() * b.k22 * iy.asDiagonal();
}

KernelBlock ConjugatedKernel::block(int ci, const std::vector<double>& xs, int cj,
                                    const std::vector<double>& ys) const {
  KernelBlock b = base_->block(ci, xs, cj, ys);
  conjugate_block(b, xs, ys, rate_, rate_);
  return b;
}

KernelBlock ConjugatedKernel::block_reference(int ci, const std::vector<double>& xs, int cj,
                                              const std::vector<double>& ys) const {
  KernelBlock b = base_->block_reference(ci, xs, cj, ys);
  conjugate_block(b, xs, ys, rate_, rate_);
  return b;
}

std::shared_ptr<const MatrixKernel> conjugate_kernel(std::shared_ptr<const MatrixKernel> k,
                                                     double rate) {
  return std::make_shared<ConjugatedKernel>(std::move(k), rate);
}

}  // namespace kpz
