#pragma once
#include <complex>
#include <functional>
#include <vector>

namespace kpz {

using cplx = std::complex<double>;

inline constexpr double kPi = 3.14159265358979323846;

// Gauss-Legendre nodes and weights on [-1, 1], ascending. Cached per order.
struct GaussLegendre {
  std::vector<double> x, w;
};
const GaussLegendre& gauss_legendre(int n);

// Two rays a + u e^{-i phi} (incoming) and a + u e^{+i phi} (outgoing), u >= 0.
struct Contour {
  cplx apex{0.0, 0.0};
  double phi = kPi / 3.0;
  cplx point(double u, int side) const { return apex + u * std::polar(1.0, side * phi); }
};

struct PanelSpec {
  int nodes_per_panel = 24;
  int panels = 8;
  double ratio = 1.7;
  // When positive, the first panel is at most this wide and panels are added as needed.
  double first_width = 0.0;
};

struct QuadratureRule {
  Contour contour;
  double length = 0.0;
  std::vector<cplx> nodes;
  std::vector<cplx> weights;  // orientation and direction factor included
  std::size_t size() const { return nodes.size(); }
};

// Composite Gauss-Legendre on [0, L] per ray, geometric panels.
QuadratureRule ray_rule(cplx apex, double phi, double L, const PanelSpec& spec = {});
QuadratureRule ray_rule(cplx apex, double phi, int n_nodes, double L);

// Panel edges of [0, L] with geometric widths.
std::vector<double> geometric_panels(double L, const PanelSpec& spec);

// Smallest L with exp(-c L^3/3 + |s| L) < 1e-16 * peak.
double auto_truncation(double c, double s, double peak = 1.0);

cplx integrate1(const std::function<cplx(cplx)>& f, const QuadratureRule& r);
cplx integrate2(const std::function<cplx(cplx, cplx)>& f, const QuadratureRule& rz,
                const QuadratureRule& rw);

}  // namespace kpz
