#include "kpz/lpp.hpp"

#include <algorithm>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <stdexcept>

namespace kpz {

namespace detail {
double exp_draw(Rng& rng, double rate) {
  const double u = (rng() >> 11) * 0x1.0p-53;
  return -std::log1p(-u) / rate;
}
}  // namespace detail

WeightGrid sample_weights(int n_max, double alpha, std::uint64_t seed) {
  if (!(alpha > 0.0)) throw std::invalid_argument("alpha must be positive");
  if (n_max < 1) throw std::invalid_argument("n_max must be at least 1");
  WeightGrid g;
  g.alpha = alpha;
  g.w = Triangle(n_max);
  Rng rng(seed);
  for (int n = 1; n <= n_max; ++n)
    for (int m = 1; m <= n; ++m) g.w(n, m) = detail::exp_draw(rng, m == n ? alpha : 1.0);
  return g;
}

LppGrid passage_times(const WeightGrid& weights) {
  const int N = weights.w.n_max();
  LppGrid out;
  out.H = Triangle(N);
  const double nan = std::nan("");
  for (int n = 1; n <= N; ++n)
    for (int m = 1; m <= n; ++m) {
      const double w = weights.w(n, m);
      const double up = m < n ? out.H(n - 1, m) : 0.0;
      const double left = m > 1 ? out.H(n, m - 1) : 0.0;
      if (std::isnan(w) || std::isnan(up) || std::isnan(left))
        out.H(n, m) = nan;
      else
        out.H(n, m) = w + std::max(up, left);
    }
  return out;
}

std::vector<double> diagonal_passage_times(int n_max, double alpha, std::uint64_t seed) {
  if (!(alpha > 0.0)) throw std::invalid_argument("alpha must be positive");
  std::vector<double> d;
  d.reserve(n_max);
  stream_passage_times(n_max, alpha, seed,
                       [&](int n, const std::vector<double>& row) { d.push_back(row[n - 1]); });
  return d;
}

WeightGrid weights_from_waiting_times(const HalfLineTrajectory& traj) {
  // particle j (1-based) logs waiting times k = 1.., giving w(j+k-1, j)
  int n_max = 0;
  for (size_t j = 0; j < traj.waiting.size(); ++j)
    n_max = std::max(n_max, static_cast<int>(j + traj.waiting[j].size()));
  WeightGrid g;
  g.alpha = traj.alpha;
  g.w = Triangle(std::max(n_max, 1));
  for (size_t j = 0; j < traj.waiting.size(); ++j)
    for (size_t k = 0; k < traj.waiting[j].size(); ++k)
      g.w(static_cast<int>(j + k + 1), static_cast<int>(j + 1)) = traj.waiting[j][k];
  return g;
}

ArrivalReport arrival_identity_check(const HalfLineTrajectory& traj, const LppGrid& grid,
                                     double tol) {
  ArrivalReport rep;
  for (size_t j = 0; j < traj.arrival.size(); ++j) {
    const int y = static_cast<int>(j + 1);
    for (size_t s = 0; s < traj.arrival[j].size(); ++s) {
      const int n = static_cast<int>(s + 1);
      const int row = n + y - 1;
      ++rep.checked;
      const double h = grid.H.contains(row, y) ? grid.H(row, y) : std::nan("");
      const double err = std::abs(h - traj.arrival[j][s]);
      if (!(err <= tol)) {
        if (rep.violations++ == 0) {
          std::ostringstream m;
          m << "H(" << row << "," << y << ") = " << h << " but particle " << y
            << " reached site " << n << " at " << traj.arrival[j][s];
          rep.message = m.str();
        }
        rep.pass = false;
      }
      if (std::isfinite(err)) rep.max_error = std::max(rep.max_error, err);
    }
  }
  return rep;
}

long round_half_up(double v) { return static_cast<long>(std::floor(v + 0.5)); }

double rescale_diag(double h, int n, double alpha) {
  if (!(alpha > 0.0)) throw std::invalid_argument("alpha must be positive");
  if (n < 1) throw std::invalid_argument("n must be at least 1");
  if (alpha >= 0.5) return (h - 4.0 * n) / (std::cbrt(16.0) * std::cbrt(n));
  const double a1 = alpha * (1 - alpha);
  const double sigma = std::sqrt(1 - 2 * alpha) / a1;
  return (h - n / a1) / (sigma * std::sqrt(static_cast<double>(n)));
}

double rescale_offdiag(double h, int n, double kappa) {
  if (!(kappa > 0.0 && kappa < 1.0)) throw std::invalid_argument("kappa must be in (0,1)");
  const double r = 1 + std::sqrt(kappa);
  const double sigma = std::pow(r, 4.0 / 3.0) / std::pow(kappa, 1.0 / 6.0);
  return (h - r * r * n) / (sigma * std::cbrt(n));
}

std::pair<int, int> process_indices(int n, double eta) {
  if (n < 1) throw std::invalid_argument("n must be at least 1");
  if (!(eta >= 0.0)) throw std::invalid_argument("eta must be nonnegative");
  const double d = std::cbrt(4.0) * eta * std::pow(n, 2.0 / 3.0);
  const long a = round_half_up(n + d), b = round_half_up(n - d);
  if (b < 1 || a < b) throw std::invalid_argument("process indices out of range");
  return {static_cast<int>(a), static_cast<int>(b)};
}

double rescale_process_value(double h, int n, double eta) {
  const double xi = std::cbrt(4.0), c = std::cbrt(static_cast<double>(n));
  return (h - 4.0 * n + c * xi * xi * eta * eta) / (std::cbrt(16.0) * c);
}

double rescale_process(const LppGrid& grid, int n, double eta) {
  const auto [a, b] = process_indices(n, eta);
  if (!grid.H.contains(a, b)) throw std::invalid_argument("process indices outside the grid");
  return rescale_process_value(grid.H(a, b), n, eta);
}

void write_grid_csv(const std::string& path, const WeightGrid& w, const LppGrid& g) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << "n,m,w,H\n" << std::setprecision(12);
  for (int n = 1; n <= w.w.n_max(); ++n)
    for (int m = 1; m <= n; ++m) out << n << ',' << m << ',' << w.w(n, m) << ',' << g.H(n, m) << '\n';
}

}  // namespace kpz
