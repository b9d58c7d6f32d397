#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "kpz/fredholm.hpp"
#include "kpz/kernels.hpp"
#include "kpz/pfaffian.hpp"
#include "oracles.hpp"

using namespace kpz;

namespace {
Eigen::MatrixXd random_skew(int n, std::mt19937_64& g) {
  std::normal_distribution<double> z;
  Eigen::MatrixXd a(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) a(i, j) = z(g);
  return a - a.transpose();
}
}  // namespace

TEST_CASE("pfaffian squared equals determinant") {
  std::mt19937_64 g(5);
  for (int rep = 0; rep < 40; ++rep) {
    const int n = 2 * (1 + rep % 30);
    const Eigen::MatrixXd a = random_skew(n, g);
    const double pf = pfaffian(SkewMatrix(a));
    const double det = a.determinant();
    CHECK(std::abs(pf * pf - det) <= 1e-10 * std::abs(det));
  }
}

TEST_CASE("4x4 pfaffian closed form") {
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(4, 4);
  const double v[6] = {1.5, -2.0, 0.25, 3.0, -1.25, 0.5};
  a(0, 1) = v[0];
  a(0, 2) = v[1];
  a(0, 3) = v[2];
  a(1, 2) = v[3];
  a(1, 3) = v[4];
  a(2, 3) = v[5];
  a = a - a.transpose().eval();
  const double closed = v[0] * v[5] - v[1] * v[4] + v[2] * v[3];
  CHECK(std::abs(pfaffian(SkewMatrix(a)) - closed) < 1e-14);
}

TEST_CASE("pfaffian edge cases") {
  Eigen::MatrixXd j(2, 2);
  j << 0, 1, -1, 0;
  CHECK(pfaffian(SkewMatrix(j)) == doctest::Approx(1.0));
  CHECK_THROWS(pfaffian(SkewMatrix(Eigen::MatrixXd::Zero(3, 3))));
  CHECK(pfaffian(SkewMatrix(Eigen::MatrixXd::Zero(4, 4))) == 0.0);
  CHECK(pfaffian(pf_unit(5)) == doctest::Approx(1.0));
}

TEST_CASE("Fredholm determinant of the Airy kernel against an independent Nystrom") {
  ScalarKernel k = [](const std::vector<double>& a, const std::vector<double>& b) {
    return airy_kernel_matrix(a, b);
  };
  NystromSpec s;
  s.scale = 2.0;
  for (double h : {-3.0, -1.0, 0.0, 1.5}) CHECK(std::abs(fredholm_det(k, h, s) - oracle::f_gue(h)) < 1e-10);
}

TEST_CASE("Fredholm Pfaffian agrees with its truncated series") {
  GoeKernel goe;
  GseKernel gse;
  NystromSpec s;
  s.scale = 2.0;
  // at h = 2 the series terms decay fast enough for order 3
  CHECK(std::abs(fredholm_pf(goe, DomainDk{{2.0}}, s) - pf_series_oracle(goe, DomainDk{{2.0}}, 3, 16, 1.0)) < 1e-6);
  CHECK(std::abs(fredholm_pf(gse, DomainDk{{1.0}}, s) - pf_series_oracle(gse, DomainDk{{1.0}}, 3, 16, 1.0)) < 1e-6);
}

TEST_CASE("parallel and serial reference assembly coincide") {
  GseKernel gse;
  CrossKernel cross({0.5, {0.1, 0.4}});
  NystromSpec par, ref;
  par.nodes = ref.nodes = 16;
  ref.reference = true;
  const auto a = assemble_pf_matrix(gse, DomainDk{{-1.0}}, par);
  const auto b = assemble_pf_matrix(gse, DomainDk{{-1.0}}, ref);
  CHECK((a - b).cwiseAbs().maxCoeff() < 1e-12);
  const auto c = assemble_pf_matrix(cross, DomainDk{{0.0, 0.5}}, par);
  const auto d = assemble_pf_matrix(cross, DomainDk{{0.0, 0.5}}, ref);
  CHECK((c - d).cwiseAbs().maxCoeff() < 1e-10);
  CHECK((a + a.transpose()).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("assembled matrices are finite and decay at the map's far end") {
  GoeKernel goe;
  NystromSpec s;
  s.scale = 2.0;
  const auto a = assemble_pf_matrix(goe, DomainDk{{-2.0}}, s);
  CHECK(a.allFinite());
  const auto nodes = half_line_nodes(-2.0, s);
  CHECK(nodes.x.size() == static_cast<size_t>(s.nodes));
  CHECK(nodes.x.front() > -2.0);
}
