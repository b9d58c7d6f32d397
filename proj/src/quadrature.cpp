#include "kpz/quadrature.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <stdexcept>

namespace kpz {

namespace {

GaussLegendre compute_gauss_legendre(int n) {
  GaussLegendre g;
  g.x.assign(n, 0.0);
  g.w.assign(n, 0.0);
  const int m = (n + 1) / 2;
  for (int i = 0; i < m; ++i) {
    double z = std::cos(kPi * (i + 0.75) / (n + 0.5));
    double pp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p1 = 1.0, p2 = 0.0;
      for (int j = 0; j < n; ++j) {
        const double p3 = p2;
        p2 = p1;
        p1 = ((2.0 * j + 1.0) * z * p2 - j * p3) / (j + 1);
      }
      pp = n * (z * p1 - p2) / (z * z - 1.0);
      const double z1 = z;
      z = z1 - p1 / pp;
      if (std::abs(z - z1) < 1e-15) break;
    }
    g.x[i] = -z;
    g.x[n - 1 - i] = z;
    g.w[i] = 2.0 / ((1.0 - z * z) * pp * pp);
    g.w[n - 1 - i] = g.w[i];
  }
  return g;
}

}  // namespace

const GaussLegendre& gauss_legendre(int n) {
  static std::mutex mu;
  static std::map<int, GaussLegendre> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(n);
  if (it == cache.end()) it = cache.emplace(n, compute_gauss_legendre(n)).first;
  return it->second;
}

std::vector<double> geometric_panels(double L, const PanelSpec& spec) {
  int panels = spec.panels;
  const double r = spec.ratio;
  if (spec.first_width > 0.0) {
    const double w0 = L * (r - 1.0) / (std::pow(r, panels) - 1.0);
    if (w0 > spec.first_width) {
      panels = static_cast<int>(std::ceil(std::log1p(L * (r - 1.0) / spec.first_width) / std::log(r)));
    }
  }
  const double w0 = (r == 1.0) ? L / panels : L * (r - 1.0) / (std::pow(r, panels) - 1.0);
  std::vector<double> edges(panels + 1, 0.0);
  double width = w0;
  for (int p = 0; p < panels; ++p) {
    edges[p + 1] = edges[p] + width;
    width *= r;
  }
  edges[panels] = L;
  return edges;
}

QuadratureRule ray_rule(cplx apex, double phi, double L, const PanelSpec& spec) {
  if (!(L > 0.0) || spec.nodes_per_panel < 1 || spec.panels < 1 || !(phi > 0.0 && phi < kPi))
    throw std::invalid_argument("ray_rule: degenerate parameters");
  QuadratureRule r;
  r.contour = Contour{apex, phi};
  r.length = L;
  const auto edges = geometric_panels(L, spec);
  const auto& g = gauss_legendre(spec.nodes_per_panel);
  const cplx up = std::polar(1.0, phi), down = std::polar(1.0, -phi);
  // incoming ray (from infinity to the apex) then outgoing ray
  for (int side : {-1, 1}) {
    const cplx dir = side < 0 ? down : up;
    for (std::size_t p = 0; p + 1 < edges.size(); ++p) {
      const double a = edges[p], b = edges[p + 1];
      const double half = 0.5 * (b - a), mid = 0.5 * (a + b);
      for (std::size_t k = 0; k < g.x.size(); ++k) {
        const double u = mid + half * g.x[k];
        r.nodes.push_back(apex + u * dir);
        r.weights.push_back(static_cast<double>(side) * half * g.w[k] * dir);
      }
    }
  }
  return r;
}

QuadratureRule ray_rule(cplx apex, double phi, int n_nodes, double L) {
  if (n_nodes < 4) throw std::invalid_argument("ray_rule: n_nodes must be at least 4");
  PanelSpec spec;
  spec.nodes_per_panel = n_nodes;
  return ray_rule(apex, phi, L, spec);
}

double auto_truncation(double c, double s, double peak) {
  if (!(c > 0.0)) throw std::invalid_argument("auto_truncation: no cubic decay, supply L explicitly");
  const double target = 16.0 * std::log(10.0) + std::log(std::max(peak, 1e-300));
  const double as = std::abs(s);
  // g(L) = c L^3/3 - |s| L - target is increasing once L > sqrt(|s|/c)
  double lo = std::sqrt(as / c), hi = std::max(1.0, 2.0 * lo);
  auto g = [&](double L) { return c * L * L * L / 3.0 - as * L - target; };
  while (g(hi) < 0.0) hi *= 2.0;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    (g(mid) < 0.0 ? lo : hi) = mid;
  }
  return hi;
}

cplx integrate1(const std::function<cplx(cplx)>& f, const QuadratureRule& r) {
  cplx sum = 0.0;
  double peak = 0.0;
  std::vector<double> mags(r.size());
  for (std::size_t k = 0; k < r.size(); ++k) {
    const cplx v = f(r.nodes[k]);
    mags[k] = std::abs(v);
    peak = std::max(peak, mags[k]);
    sum += r.weights[k] * v;
  }
  // the outermost node of each ray
  const std::size_t half = r.size() / 2;
  const double tail = std::max(mags[half - 1], mags[r.size() - 1]);
  if (peak > 0.0 && tail > 1e-12 * peak)
    throw std::runtime_error("integrate1: integrand not decayed at the truncation ends, increase L");
  return sum;
}

cplx integrate2(const std::function<cplx(cplx, cplx)>& f, const QuadratureRule& rz,
                const QuadratureRule& rw) {
  cplx sum = 0.0;
  for (std::size_t a = 0; a < rz.size(); ++a) {
    cplx row = 0.0;
    for (std::size_t b = 0; b < rw.size(); ++b) row += rw.weights[b] * f(rz.nodes[a], rw.nodes[b]);
    sum += rz.weights[a] * row;
  }
  return sum;
}

}  // namespace kpz
