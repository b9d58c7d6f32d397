#pragma once
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "kpz/particles.hpp"

namespace kpz {

// Triangular array a(n, m), n >= m >= 1, row-major by n. Missing entries are NaN.
class Triangle {
 public:
  Triangle() = default;
  explicit Triangle(int n_max, double fill = std::nan(""))
      : n_max_(n_max), v_(static_cast<size_t>(n_max) * (n_max + 1) / 2, fill) {}
  int n_max() const { return n_max_; }
  bool contains(int n, int m) const { return m >= 1 && m <= n && n <= n_max_; }
  double& operator()(int n, int m) { return v_[index(n, m)]; }
  double operator()(int n, int m) const { return v_[index(n, m)]; }
  static size_t index(int n, int m) {
    return static_cast<size_t>(n) * (n - 1) / 2 + (m - 1);
  }

 private:
  int n_max_ = 0;
  std::vector<double> v_;
};

struct WeightGrid {
  Triangle w;
  double alpha = 1.0;
};

struct LppGrid {
  Triangle H;
};

// Rate alpha on the diagonal, rate 1 elsewhere; drawn row by row (n = 1, 2, ..., m = 1..n).
WeightGrid sample_weights(int n_max, double alpha, std::uint64_t seed);

// H(n,m) = w + max(H(n-1,m), H(n,m-1)), H(n,n) = w + H(n,n-1), H(n,0) = 0.
// Entries depending on a missing weight are missing.
LppGrid passage_times(const WeightGrid& weights);

// Same weights as sample_weights(n_max, alpha, seed), keeping one row at a time.
// Calls visit(n, row) with row[m-1] = H(n,m) after each row.
template <class Visit>
void stream_passage_times(int n_max, double alpha, std::uint64_t seed, Visit&& visit);

// H(n,n) for n = 1..n_max.
std::vector<double> diagonal_passage_times(int n_max, double alpha, std::uint64_t seed);

// w(i,j) = (i-j+1)-th waiting time of particle j; missing where not logged.
WeightGrid weights_from_waiting_times(const HalfLineTrajectory& traj);

struct ArrivalReport {
  bool pass = true;
  long checked = 0;
  long violations = 0;
  double max_error = 0.0;
  std::string message;
};

// H(n+y-1, y) against the arrival time of particle y at site n, for every logged pair.
ArrivalReport arrival_identity_check(const HalfLineTrajectory& traj, const LppGrid& grid,
                                     double tol = 1e-9);

// Rounds to nearest, ties up.
long round_half_up(double v);

double rescale_diag(double h_nn, int n, double alpha);
double rescale_offdiag(double h_nm, int n, double kappa);
// Index pair (n + xi eta n^{2/3}, n - xi eta n^{2/3}), xi = 2^{2/3}, rounded.
std::pair<int, int> process_indices(int n, double eta);
double rescale_process(const LppGrid& grid, int n, double eta);
double rescale_process_value(double h, int n, double eta);

// CSV with columns n,m,w,H.
void write_grid_csv(const std::string& path, const WeightGrid& w, const LppGrid& g);

// ---- implementation ----

namespace detail {
double exp_draw(Rng& rng, double rate);
}

template <class Visit>
void stream_passage_times(int n_max, double alpha, std::uint64_t seed, Visit&& visit) {
  Rng rng(seed);
  std::vector<double> prev, row;
  for (int n = 1; n <= n_max; ++n) {
    row.assign(n, 0.0);
    for (int m = 1; m <= n; ++m) {
      const double w = detail::exp_draw(rng, m == n ? alpha : 1.0);
      const double up = m < n ? prev[m - 1] : 0.0;
      const double left = m > 1 ? row[m - 2] : 0.0;
      row[m - 1] = w + std::max(up, left);
    }
    visit(n, static_cast<const std::vector<double>&>(row));
    prev.swap(row);
  }
}

}  // namespace kpz
