#pragma once
#include <Eigen/Dense>
#include <functional>
#include <vector>

#include "kpz/kernel.hpp"

namespace kpz {

// Discretization of [h, inf) by x = h + scale * u / (1 - u), Gauss-Legendre panels in u.
struct NystromSpec {
  int nodes = 48;             // per component
  int panels = 1;             // equal panels in u
  double scale = 1.0;
  double conjugation = -1.0;  // negative: use the kernel's recommendation
  bool jump_aware = true;     // rows crossing a jump line are integrated piecewise
  bool reference = false;     // serial pointwise assembly
  NystromSpec refined() const;  // doubled nodes and doubled map scale
};

struct DomainDk {
  std::vector<double> h;  // component i is [h_i, inf)
  int k() const { return static_cast<int>(h.size()); }
};

struct HalfLineNodes {
  double h = 0.0, scale = 1.0;
  std::vector<double> x, w;          // nodes and weights in x
  std::vector<double> u, omega;      // nodes and weights in u
  std::vector<int> panel;            // panel index of each node
  std::vector<double> edges;         // panel edges in u
};

// Extra panel edges at the given points of (h, inf).
HalfLineNodes half_line_nodes(double h, const NystromSpec& spec, std::vector<double> breaks = {});

using ScalarKernel =
    std::function<Eigen::MatrixXd(const std::vector<double>&, const std::vector<double>&)>;

// det(I - K) on L^2(s, inf).
double fredholm_det(const ScalarKernel& k, double s, const NystromSpec& spec = {});

// The 2M x 2M skew matrix of sqrt(w_a w_b) K(p_a, p_b), node-interleaved, conjugated per spec.
Eigen::MatrixXd assemble_pf_matrix(const MatrixKernel& k, const DomainDk& d,
                                   const NystromSpec& spec = {});

// Pf(J - K) on L^2(D_k).
double fredholm_pf(const MatrixKernel& k, const DomainDk& d, const NystromSpec& spec = {});

// Block-diagonal J of matching size.
Eigen::MatrixXd pf_unit(int nodes);

// Truncated Fredholm Pfaffian series with tensor Gauss-Legendre quadrature in each term.
double pf_series_oracle(const MatrixKernel& k, const DomainDk& d, int max_order,
                        int nodes = 16, double scale = 1.0, std::vector<double>* terms = nullptr);

}  // namespace kpz
