#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "kpz/harness.hpp"

using namespace kpz;
using nlohmann::json;

TEST_CASE("fluctuation scales, both forms") {
  CHECK(gaussian_scale(0.3, ScaleForm::kUnmatched) == doctest::Approx(0.4 / std::sqrt(0.21)));
  CHECK(gaussian_scale(0.3) == doctest::Approx(std::sqrt(0.4 * 0.21)));
  CHECK(bulk_scale(0.5, ScaleForm::kUnmatched) ==
        doctest::Approx(std::pow(1.5, 5.0 / 3.0) / std::cbrt(0.5) / std::cbrt(16.0)));
  CHECK(bulk_scale(0.5) == doctest::Approx(std::pow(0.75, 2.0 / 3.0) / std::cbrt(16.0)));
  // the two bulk forms differ by (1 - r)/(1 + r)
  CHECK(bulk_scale(0.5) / bulk_scale(0.5, ScaleForm::kUnmatched) == doctest::Approx(1.0 / 3.0));
  // small alpha: x_1 is nearly Poisson(alpha t), variance alpha t
  CHECK(gaussian_scale(1e-6) == doctest::Approx(1e-3).epsilon(1e-5));
  CHECK_THROWS(gaussian_scale(0.5));
  CHECK_THROWS(bulk_scale(1.0));
}

TEST_CASE("particle rescalings") {
  const double t = 1000.0;
  CHECK(rescale_ftasep_first(250.0, t, 1.0) == doctest::Approx(0.0));
  CHECK(rescale_ftasep_first(250.0 + 10 / std::cbrt(16.0), t, 0.6) == doctest::Approx(1.0));
  const double a1 = 0.3 * 0.7;
  CHECK(rescale_ftasep_first(t * a1 + gaussian_scale(0.3) * std::sqrt(t), t, 0.3) == doctest::Approx(1.0));
  CHECK(rescale_ftasep_first(t * a1 + gaussian_scale(0.3, ScaleForm::kUnmatched) * std::sqrt(t), t, 0.3,
                             ScaleForm::kUnmatched) == doctest::Approx(1.0));
  CHECK(bulk_index(2000.0, 0.5) == 1000);
  CHECK(bulk_index(1.0, 0.1) == 1);
  CHECK(rescale_ftasep_bulk(t * (1 - 3 + 0.25) / 4, t, 0.5) == doctest::Approx(0.0));
  CHECK(cross_index(1000.0, 0.5) == static_cast<int>(std::floor(std::cbrt(2.0) * 0.5 * 100)));
  // eta = 0 reduces to the alpha >= 1/2 first-particle scaling
  CHECK(rescale_ftasep_cross(260.0, t, 0.0) == doctest::Approx(rescale_ftasep_first(260.0, t, 1.0)));
  const double full = rescale_ftasep_cross(200.0, t, 0.5);
  const double lit = rescale_ftasep_cross(200.0, t, 0.5, true);
  CHECK(full - lit == doctest::Approx(-0.25 * 9.0 / 10.0));
  CHECK_THROWS(rescale_ftasep_first(1.0, 0.0, 1.0));
}

TEST_CASE("crossover boundary rates") {
  CHECK(crossover_alpha_ftasep(1000.0, 0.0) == 0.5);
  CHECK(crossover_alpha_ftasep(1000.0, 1.0) == doctest::Approx(0.5 + std::cbrt(16.0) / 20));
  CHECK(crossover_alpha_lpp(1000, 1.0) == doctest::Approx(0.5 + 1.0 / (std::cbrt(16.0) * 10)));
}

TEST_CASE("empirical cdf and KS distance") {
  const EmpiricalCdf e({3.0, 1.0, 2.0, 2.0});
  CHECK(e(2.0) == 0.75);
  CHECK(e.below(2.0) == 0.25);
  CHECK(e(0.0) == 0.0);
  CHECK(e(5.0) == 1.0);
  // uniform on [0, 4]: both one-sided limits are 1/4 off at every sample
  const double d = ks_distance(e, [](double x) { return std::clamp(x / 4, 0.0, 1.0); });
  CHECK(d == doctest::Approx(0.25));
  CHECK(ks_distance(e, [](double x) { return std::clamp(x / 8, 0.0, 1.0); }) == doctest::Approx(0.625));
  CHECK(ks_distance(e, e) == 0.0);
  CHECK(ks_distance(EmpiricalCdf({0.0}), EmpiricalCdf({1.0})) == 1.0);
  CHECK(negated({1.0, -2.0}) == std::vector<double>{-1.0, 2.0});
  CHECK_THROWS(EmpiricalCdf({}));
}

TEST_CASE("config parsing") {
  const auto ok = json::parse(R"({"tag":"thm1.1","alpha":1,"t":50,"replicates":10,"seed":3})");
  const auto c = parse_config(ok);
  CHECK(c.tag == "thm1.1");
  CHECK(*c.t == 50.0);
  CHECK(c.seed == 3);
  auto bad = [](const char* s) { return json::parse(s); };
  CHECK_THROWS_AS(parse_config(bad(R"({"tag":"nope","replicates":1,"seed":1})")), ConfigError);
  CHECK_THROWS_AS(parse_config(bad(R"({"tag":"thm1.1","replicates":1,"seed":1})")), ConfigError);
  CHECK_THROWS_AS(parse_config(bad(R"({"tag":"thm1.1","t":5,"replicates":0,"seed":1})")), ConfigError);
  CHECK_THROWS_AS(parse_config(bad(R"({"tag":"thm1.1","t":5,"replicates":1,"seed":-1})")), ConfigError);
  CHECK_THROWS_AS(parse_config(bad(R"({"tag":"thm1.1","t":5,"replicates":1,"seed":1,"bogus":2})")), ConfigError);
  CHECK_THROWS_AS(parse_config(bad(R"({"tag":"thm1.9","n":2.5,"replicates":1,"seed":1})")), ConfigError);
  CHECK_THROWS_AS(parse_config(bad(R"({"tag":"thm1.2","r":0.2,"alpha":0.3,"t":5,"replicates":1,"seed":1})")),
                  ConfigError);
  CHECK_THROWS_AS(parse_config(bad(R"({"tag":"thm1.12","alpha":1,"n":50,"replicates":1,"seed":1})")),
                  ConfigError);
  CHECK_THROWS_AS(parse_config(bad("[1,2]")), ConfigError);
}

TEST_CASE("experiments are deterministic and report their parameters") {
  const auto c = parse_config(json::parse(R"({"tag":"thm1.1","alpha":1,"t":60,"replicates":40,"seed":9,"nodes":16})"));
  const auto a = run_experiment(c), b = run_experiment(c);
  CHECK(a.report.dump() == b.report.dump());
  CHECK(a.rows == b.rows);
  CHECK(a.columns == std::vector<std::string>{"chi_first"});
  CHECK(a.rows.size() == 40);
  CHECK(a.report["params"]["t"] == 60.0);
  CHECK(a.report["seed"] == 9);
  CHECK(a.report.contains("comparisons"));
  CHECK_FALSE(a.report.contains("runtime"));
  const auto x = ftasep_first_samples(1.0, 60.0, 40, 9);
  for (int r = 0; r < 40; ++r) CHECK(x[r] == a.rows[r][0]);
}

TEST_CASE("experiment output files") {
  auto c = parse_config(json::parse(R"({"tag":"couplings","replicates":2,"seed":4})"));
  c.out = (std::filesystem::temp_directory_path() / "kpz_harness_out").string();
  const auto r = run_experiment(c);
  CHECK(r.pass);
  write_experiment(c, r);
  std::ifstream rep(std::filesystem::path(c.out) / "report.json");
  const auto j = json::parse(rep);
  CHECK(j["pass"] == true);
  std::ifstream csv(std::filesystem::path(c.out) / "samples.csv");
  std::string header;
  std::getline(csv, header);
  CHECK(header.rfind("replicate,", 0) == 0);
  std::filesystem::remove_all(c.out);
}

TEST_CASE("stationary flux estimate is near j(2/3)") {
  const double f = stationary_flux_estimate(0.5, 3000, 100.0, 1);
  CHECK(std::abs(f - 1.0 / 6.0) < 0.02);
}

TEST_CASE("random-matrix edge law, small sample") {
  const double p = gue_edge_mc(0.0, 4000, 3);
  CHECK(std::abs(p - 0.96937) < 0.015);
}
