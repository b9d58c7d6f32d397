#include "kpz/hydro.hpp"

#include <cmath>
#include <stdexcept>

namespace kpz {

namespace {
void check_density(double rho) {
  if (!(rho >= 0.0 && rho <= 1.0)) throw std::invalid_argument("density outside [0,1]");
}
}  // namespace

double flux(double rho) {
  check_density(rho);
  if (rho <= 0.5) return 0.0;
  return (1 - rho) * (2 * rho - 1) / rho;
}

double drift(double rho) {
  check_density(rho);
  if (rho <= 0.5) return 0.0;
  return (1 - rho) * (2 * rho - 1) / (rho * rho);
}

double characteristic_speed(double rho) {
  check_density(rho);
  if (rho <= 0.5) return 0.0;
  return 1.0 / (rho * rho) - 2.0;
}

FrontConstants front_constants() {
  FrontConstants c;
  c.rho0 = 2.0 / 3.0;
  c.pi0 = characteristic_speed(c.rho0);
  // golden section on |drift'|, which is unimodal with a simple zero at the maximizer
  auto slope = [](double r) { return std::abs(2.0 / (r * r * r) - 3.0 / (r * r)); };
  double a = 0.5, b = 1.0;
  const double g = (std::sqrt(5.0) - 1) / 2;
  double x1 = b - g * (b - a), x2 = a + g * (b - a);
  double f1 = slope(x1), f2 = slope(x2);
  while (b - a > 1e-13) {
    if (f1 < f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - g * (b - a);
      f1 = slope(x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + g * (b - a);
      f2 = slope(x2);
    }
  }
  c.rho0_numeric = 0.5 * (a + b);
  c.pi0_numeric = characteristic_speed(c.rho0_numeric);
  return c;
}

double density_profile(double x) {
  if (x < -1.0) return 1.0;
  if (x > 0.25) return 0.0;
  return 1.0 / std::sqrt(2.0 + x);
}

double lln_position(double r) {
  if (!(r > 0.0 && r < 1.0)) throw std::invalid_argument("r must be in (0,1)");
  return (1 - 6 * r + r * r) / 4;
}

double kappa_of_pi(double pi) {
  if (!(pi >= -1.0 && pi <= 0.25)) throw std::invalid_argument("position outside [-1, 1/4]");
  return 3 - 2 * std::sqrt(2 + pi);
}

}  // namespace kpz
