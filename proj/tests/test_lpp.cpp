#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>

#include "kpz/lpp.hpp"

using namespace kpz;

TEST_CASE("triangle indexing") {
  Triangle t(4);
  CHECK(t.contains(4, 4));
  CHECK_FALSE(t.contains(3, 4));
  CHECK_FALSE(t.contains(5, 1));
  CHECK_FALSE(t.contains(2, 0));
  CHECK(Triangle::index(1, 1) == 0);
  CHECK(Triangle::index(4, 4) == 9);
  CHECK(std::isnan(t(2, 1)));
}

TEST_CASE("passage times follow the recursion") {
  const auto w = sample_weights(30, 0.7, 3);
  const auto g = passage_times(w);
  for (int n = 1; n <= 30; ++n)
    for (int m = 1; m <= n; ++m) {
      const double up = m < n ? g.H(n - 1, m) : 0.0;
      const double left = m > 1 ? g.H(n, m - 1) : 0.0;
      CHECK(g.H(n, m) == w.w(n, m) + std::max(up, left));
    }
}

TEST_CASE("small grid by hand") {
  WeightGrid w;
  w.w = Triangle(2);
  w.w(1, 1) = 1.0;
  w.w(2, 1) = 2.0;
  w.w(2, 2) = 0.5;
  const auto g = passage_times(w);
  CHECK(g.H(1, 1) == 1.0);
  CHECK(g.H(2, 1) == 3.0);
  CHECK(g.H(2, 2) == 3.5);
  w.w(2, 1) = std::nan("");
  CHECK(std::isnan(passage_times(w).H(2, 2)));
}

TEST_CASE("streamed rows equal the stored grid") {
  const auto g = passage_times(sample_weights(40, 1.3, 17));
  int rows = 0;
  stream_passage_times(40, 1.3, 17, [&](int n, const std::vector<double>& row) {
    ++rows;
    for (int m = 1; m <= n; ++m) CHECK(row[m - 1] == g.H(n, m));
  });
  CHECK(rows == 40);
  const auto d = diagonal_passage_times(40, 1.3, 17);
  for (int n = 1; n <= 40; ++n) CHECK(d[n - 1] == g.H(n, n));
}

TEST_CASE("diagonal weights have rate alpha, bulk weights rate one") {
  const auto w = sample_weights(400, 0.5, 1);
  double diag = 0.0, bulk = 0.0;
  long nb = 0;
  for (int n = 1; n <= 400; ++n)
    for (int m = 1; m <= n; ++m) {
      if (m == n) diag += w.w(n, m);
      else {
        bulk += w.w(n, m);
        ++nb;
      }
    }
  CHECK(std::abs(diag / 400 - 2.0) < 0.3);
  CHECK(std::abs(bulk / nb - 1.0) < 0.01);
}

TEST_CASE("arrival identity on half-line TASEP") {
  for (std::uint64_t seed : {1, 2, 3}) {
    const auto tr = halfline_tasep_simulate(0.9, 80.0, seed, 400);
    const auto grid = passage_times(weights_from_waiting_times(tr));
    const auto rep = arrival_identity_check(tr, grid);
    CHECK(rep.pass);
    CHECK(rep.violations == 0);
    CHECK(rep.checked > 0);
    CHECK(rep.max_error <= 1e-9);
  }
}

TEST_CASE("arrival identity detects a corrupted waiting time") {
  auto tr = halfline_tasep_simulate(0.9, 40.0, 5, 200);
  REQUIRE(tr.injected() > 3);
  REQUIRE(tr.waiting[1].size() > 1);
  tr.waiting[1][1] += 0.5;
  const auto rep = arrival_identity_check(tr, passage_times(weights_from_waiting_times(tr)));
  CHECK_FALSE(rep.pass);
  CHECK(rep.violations > 0);
}

TEST_CASE("rounding and process indices") {
  CHECK(round_half_up(2.5) == 3);
  CHECK(round_half_up(-2.5) == -2);
  CHECK(round_half_up(2.49) == 2);
  const auto [a, b] = process_indices(1000, 0.5);
  // 2^{2/3} * 0.5 * 100 = 79.37
  CHECK(a == 1079);
  CHECK(b == 921);
  CHECK(process_indices(10, 0.0) == std::pair<int, int>{10, 10});
  CHECK_THROWS(process_indices(10, 5.0));
}

TEST_CASE("rescalings centre and scale as stated") {
  CHECK(rescale_diag(4.0 * 1000, 1000, 1.0) == doctest::Approx(0.0));
  CHECK(rescale_diag(4.0 * 1000 + std::cbrt(16.0) * 10, 1000, 0.7) == doctest::Approx(1.0));
  const double a1 = 0.25 * 0.75;
  CHECK(rescale_diag(100 / a1 + std::sqrt(0.5) / a1 * 10, 100, 0.25) == doctest::Approx(1.0));
  const double k = 0.25, r = 1.5;
  const double sig = std::pow(r, 4.0 / 3.0) / std::pow(k, 1.0 / 6.0);
  CHECK(rescale_offdiag(r * r * 1000 + sig * 10, 1000, k) == doctest::Approx(1.0));
  CHECK(rescale_process_value(4000.0 - std::cbrt(16.0) * 10 * 0.25, 1000, 0.5) ==
        doctest::Approx(0.0).epsilon(1e-12));
  CHECK_THROWS(rescale_offdiag(1.0, 10, 1.0));
}

TEST_CASE("subcritical diagonal passage time has the Gaussian scale") {
  const int n = 300, m = 400;
  double s = 0.0, s2 = 0.0;
  for (int r = 0; r < m; ++r) {
    const double v = rescale_diag(diagonal_passage_times(n, 0.25, derive_seed(4, r)).back(), n, 0.25);
    s += v;
    s2 += v * v;
  }
  const double mean = s / m, sd = std::sqrt(s2 / m - mean * mean);
  CHECK(std::abs(mean) < 0.25);
  CHECK(std::abs(sd - 1.0) < 0.15);
}

TEST_CASE("grid csv") {
  const auto path = std::filesystem::temp_directory_path() / "kpz_grid.csv";
  const auto w = sample_weights(3, 1.0, 2);
  write_grid_csv(path.string(), w, passage_times(w));
  std::ifstream f(path);
  std::string line;
  int lines = 0;
  std::getline(f, line);
  CHECK(line == "n,m,w,H");
  while (std::getline(f, line)) ++lines;
  CHECK(lines == 6);
  std::filesystem::remove(path);
}
