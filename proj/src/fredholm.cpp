#include "kpz/fredholm.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "kpz/pfaffian.hpp"
#include "kpz/quadrature.hpp"

namespace kpz {

NystromSpec NystromSpec::refined() const {
  NystromSpec r = *this;
  r.nodes *= 2;
  r.scale *= 2.0;
  return r;
}

HalfLineNodes half_line_nodes(double h, const NystromSpec& spec, std::vector<double> breaks) {
  if (spec.nodes < 2 || spec.panels < 1 || spec.nodes % spec.panels != 0)
    throw std::invalid_argument("half_line_nodes: nodes must be a positive multiple of panels");
  HalfLineNodes n;
  n.h = h;
  n.scale = spec.scale;
  const int per = spec.nodes / spec.panels;
  const auto& g = gauss_legendre(per);
  for (int p = 0; p <= spec.panels; ++p) n.edges.push_back(static_cast<double>(p) / spec.panels);
  for (double b : breaks)
    if (b > h) n.edges.push_back((b - h) / (spec.scale + b - h));
  std::sort(n.edges.begin(), n.edges.end());
  n.edges.erase(std::unique(n.edges.begin(), n.edges.end(),
                            [](double a, double b) { return b - a < 1e-12; }),
                n.edges.end());
  for (int p = 0; p + 1 < static_cast<int>(n.edges.size()); ++p) {
    const double a = n.edges[p], b = n.edges[p + 1];
    for (int k = 0; k < per; ++k) {
      const double u = 0.5 * (a + b) + 0.5 * (b - a) * g.x[k];
      const double om = 0.5 * (b - a) * g.w[k];
      n.u.push_back(u);
      n.omega.push_back(om);
      n.panel.push_back(p);
      n.x.push_back(h + spec.scale * u / (1.0 - u));
      n.w.push_back(om * spec.scale / ((1.0 - u) * (1.0 - u)));
    }
  }
  return n;
}

double fredholm_det(const ScalarKernel& k, double s, const NystromSpec& spec) {
  const HalfLineNodes n = half_line_nodes(s, spec);
  const int m = static_cast<int>(n.x.size());
  const Eigen::MatrixXd kx = k(n.x, n.x);
  Eigen::VectorXd sw(m);
  for (int a = 0; a < m; ++a) sw(a) = std::sqrt(n.w[a]);
  const Eigen::MatrixXd a = Eigen::MatrixXd::Identity(m, m) - sw.asDiagonal() * kx * sw.asDiagonal();
  return a.partialPivLu().determinant();
}

namespace {

// Rows re-integrated across the jump: the panel holding the jump point is split there and each
// side is integrated against the Lagrange basis with the kernel's own one-sided values.
void split_rows(const MatrixKernel& k, int ci, const HalfLineNodes& xn, int cj,
                const HalfLineNodes& yn, double rx, double ry, bool reference, KernelBlock& b) {
  const bool j12 = b.jump12, j22 = b.jump22;
  if (!j12 && !j22) return;
  const int nx = static_cast<int>(xn.x.size()), ny = static_cast<int>(yn.x.size());
  const int panels = static_cast<int>(yn.edges.size()) - 1;
  const int per = ny / panels;
  const auto& g = gauss_legendre(per);
  std::vector<double> bary(ny);
  for (int c = 0; c < ny; ++c) {
    const int p0 = yn.panel[c] * per;
    double prod = 1.0;
    for (int q = p0; q < p0 + per; ++q)
      if (q != c) prod *= yn.u[c] - yn.u[q];
    bary[c] = 1.0 / prod;
  }
  auto row = [&](int a) {
    for (int jump = 0; jump < 2; ++jump) {
      if ((jump == 0 && !j12) || (jump == 1 && !j22)) continue;
      const double shift = jump == 0 ? b.shift12 : b.shift22;
      const double t = xn.x[a] - shift - yn.h;
      if (t <= 0.0) continue;
      const double uc = t / (yn.scale + t);
      const int p = static_cast<int>(std::upper_bound(yn.edges.begin(), yn.edges.end(), uc) -
                                     yn.edges.begin()) - 1;
      if (p < 0 || p >= panels) continue;
      const double lo = yn.edges[p], hi = yn.edges[p + 1];
      std::vector<double> us, om, ys;
      for (const auto& [l, r] : {std::pair{lo, uc}, std::pair{uc, hi}})
        for (int q = 0; q < per; ++q) {
          const double u = 0.5 * (l + r) + 0.5 * (r - l) * g.x[q];
          us.push_back(u);
          om.push_back(0.5 * (r - l) * g.w[q] * yn.scale / ((1.0 - u) * (1.0 - u)));
          ys.push_back(yn.h + yn.scale * u / (1.0 - u));
        }
      const KernelBlock f = k.conjugated_block(ci, {xn.x[a]}, cj, ys, rx, ry, reference);
      const Eigen::MatrixXd& kf = jump == 0 ? f.k12 : f.k22;
      Eigen::MatrixXd& out = jump == 0 ? b.k12 : b.k22;
      for (int c = p * per; c < (p + 1) * per; ++c) {
        double sum = 0.0;
        for (std::size_t q = 0; q < us.size(); ++q) {
          double l = bary[c];
          for (int e = p * per; e < (p + 1) * per; ++e)
            if (e != c) l *= us[q] - yn.u[e];
          sum += om[q] * l * kf(0, static_cast<int>(q));
        }
        out(a, c) = sum / yn.w[c];
      }
    }
  };
  if (reference) {
    for (int a = 0; a < nx; ++a) row(a);
  } else {
#pragma omp parallel for schedule(dynamic)
    for (int a = 0; a < nx; ++a) row(a);
  }
}

}  // namespace

Eigen::MatrixXd pf_unit(int nodes) {
  Eigen::MatrixXd j = Eigen::MatrixXd::Zero(2 * nodes, 2 * nodes);
  for (int a = 0; a < nodes; ++a) {
    j(2 * a, 2 * a + 1) = 1.0;
    j(2 * a + 1, 2 * a) = -1.0;
  }
  return j;
}

Eigen::MatrixXd assemble_pf_matrix(const MatrixKernel& k, const DomainDk& d,
                                   const NystromSpec& spec) {
  if (d.k() != k.components()) throw std::invalid_argument("assemble_pf_matrix: component count");
  auto rate = [&](int i) {
    return spec.conjugation >= 0.0 ? spec.conjugation : k.component_conjugation(i);
  };
  // the range of the operator on component i kinks where a jump line of block (i, j) enters [h_j, inf)
  std::vector<std::vector<double>> breaks(d.k());
  for (int i = 0; i < d.k(); ++i)
    for (int j = 0; j < d.k(); ++j) {
      if (i == j) continue;
      const KernelBlock b = k.block(i, {d.h[j] + 1.0}, j, {d.h[j]});
      if (b.jump12) breaks[i].push_back(d.h[j] + b.shift12);
      if (b.jump22) breaks[i].push_back(d.h[j] + b.shift22);
      const KernelBlock t = k.block(j, {d.h[j]}, i, {d.h[j] + 1.0});
      if (t.jump12) breaks[i].push_back(d.h[j] - t.shift12);
    }
  std::vector<HalfLineNodes> nodes;
  std::vector<int> offset;
  int total = 0;
  for (int i = 0; i < d.k(); ++i) {
    nodes.push_back(half_line_nodes(d.h[i], spec, breaks[i]));
    offset.push_back(total);
    total += static_cast<int>(nodes.back().x.size());
  }
  Eigen::MatrixXd kh = Eigen::MatrixXd::Zero(2 * total, 2 * total);
  for (int ci = 0; ci < d.k(); ++ci) {
    for (int cj = 0; cj < d.k(); ++cj) {
      const auto& xn = nodes[ci];
      const auto& yn = nodes[cj];
      KernelBlock b = k.conjugated_block(ci, xn.x, cj, yn.x, rate(ci), rate(cj), spec.reference);
      if (spec.jump_aware) split_rows(k, ci, xn, cj, yn, rate(ci), rate(cj), spec.reference, b);
      const int nx = static_cast<int>(xn.x.size()), ny = static_cast<int>(yn.x.size());
      for (int a = 0; a < nx; ++a) {
        for (int c = 0; c < ny; ++c) {
          const double sw = std::sqrt(xn.w[a] * yn.w[c]);
          const int ra = 2 * (offset[ci] + a), rc = 2 * (offset[cj] + c);
          kh(ra, rc) = sw * b.k11(a, c);
          kh(ra, rc + 1) = sw * b.k12(a, c);
          kh(rc + 1, ra) = -sw * b.k12(a, c);
          kh(ra + 1, rc + 1) = sw * b.k22(a, c);
        }
      }
    }
  }
  for (int i = 0; i < d.k(); ++i) {
    // decay diagnostic on the outermost node of each component
    const int last = 2 * (offset[i] + static_cast<int>(nodes[i].x.size()) - 1);
    const double edge = std::max(kh.row(last).cwiseAbs().maxCoeff(), kh.row(last + 1).cwiseAbs().maxCoeff());
    if (!(edge < 1e-3))
      throw std::runtime_error("fredholm_pf: kernel does not decay on the domain (edge entry " +
                               std::to_string(edge) + "); conjugate it");
  }
  return 0.5 * (kh - kh.transpose());
}

double fredholm_pf(const MatrixKernel& k, const DomainDk& d, const NystromSpec& spec) {
  const Eigen::MatrixXd kh = assemble_pf_matrix(k, d, spec);
  return pfaffian(Eigen::MatrixXd(pf_unit(static_cast<int>(kh.rows() / 2)) - kh));
}

double pf_series_oracle(const MatrixKernel& k, const DomainDk& d, int max_order, int nodes,
                        double scale, std::vector<double>* terms) {
  if (max_order < 0 || max_order > 4) throw std::invalid_argument("pf_series_oracle: order 0..4");
  NystromSpec spec;
  spec.nodes = nodes;
  spec.scale = scale;
  struct Pt {
    int comp, idx;
    double w;
  };
  std::vector<HalfLineNodes> hn;
  std::vector<Pt> pts;
  for (int i = 0; i < d.k(); ++i) {
    hn.push_back(half_line_nodes(d.h[i], spec));
    for (int a = 0; a < nodes; ++a) pts.push_back({i, a, hn[i].w[a]});
  }
  const int g = static_cast<int>(pts.size());
  // pointwise kernel values on all node pairs
  Eigen::MatrixXd k11(g, g), k12(g, g), k22(g, g);
  for (int ci = 0; ci < d.k(); ++ci)
    for (int cj = 0; cj < d.k(); ++cj) {
      const KernelBlock b = k.block(ci, hn[ci].x, cj, hn[cj].x);
      for (int a = 0; a < nodes; ++a)
        for (int c = 0; c < nodes; ++c) {
          k11(ci * nodes + a, cj * nodes + c) = b.k11(a, c);
          k12(ci * nodes + a, cj * nodes + c) = b.k12(a, c);
          k22(ci * nodes + a, cj * nodes + c) = b.k22(a, c);
        }
    }
  double total = 1.0;
  if (terms) terms->assign(1, 1.0);
  double fact = 1.0;
  for (int r = 1; r <= max_order; ++r) {
    fact *= r;
    double sum = 0.0;
    std::vector<int> t(r, 0);
    Eigen::MatrixXd m(2 * r, 2 * r);
    while (true) {
      double wprod = 1.0;
      for (int s = 0; s < r; ++s) wprod *= pts[t[s]].w;
      for (int s = 0; s < r; ++s)
        for (int q = 0; q < r; ++q) {
          m(2 * s, 2 * q) = k11(t[s], t[q]);
          m(2 * s, 2 * q + 1) = k12(t[s], t[q]);
          m(2 * s + 1, 2 * q) = -k12(t[q], t[s]);
          m(2 * s + 1, 2 * q + 1) = k22(t[s], t[q]);
        }
      sum += wprod * pfaffian(SkewMatrix(m));
      int pos = 0;
      while (pos < r && ++t[pos] == g) t[pos++] = 0;
      if (pos == r) break;
    }
    const double term = (r % 2 ? -1.0 : 1.0) * sum / fact;
    if (terms) terms->push_back(term);
    total += term;
  }
  return total;
}

}  // namespace kpz
