#include <sys/wait.h>

#include <algorithm>
#include <cstdarg>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iterator>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "kpz/distributions.hpp"
#include "kpz/harness.hpp"
#include "kpz/lpp.hpp"
#include "kpz/particles.hpp"
#include "kpz/pfaffian.hpp"
#include "oracles.hpp"

using namespace kpz;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = true;
  std::vector<std::string> details;
  void check(bool ok, const std::string& what) {
    pass = pass && ok;
    details.push_back(std::string(ok ? "ok   " : "FAIL ") + what);
  }
};

std::string fmt(const char* f, ...) __attribute__((format(printf, 1, 2)));
std::string fmt(const char* f, ...) {
  char buf[512];
  va_list ap;
  va_start(ap, f);
  std::vsnprintf(buf, sizeof buf, f, ap);
  va_end(ap);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

Outcome coupling() {
  Outcome o;
  const auto t0 = std::chrono::steady_clock::now();
  long events = 0, bad = 0;
  for (int r = 0; r < 50; ++r) {
    FtasepOptions opt;
    opt.max_events = 10000;
    const auto tr = ftasep_simulate(1.0, step_state(4000), 1e9, derive_seed(101, r), 4000, opt);
    const auto rep = verify_coupling(tr);
    events += rep.events_checked;
    bad += !rep.pass || rep.events_checked != 10000;
  }
  const double dt = seconds_since(t0);
  o.check(bad == 0, fmt("50 seeds, %ld events, %ld failing runs", events, bad));
  o.check(dt < 30.0, fmt("runtime %.2f s < 30 s", dt));
  return o;
}

Outcome arrival_identity() {
  Outcome o;
  const auto t0 = std::chrono::steady_clock::now();
  long pairs = 0, violations = 0;
  int min_injected = 1 << 30;
  double max_err = 0.0;
  for (int r = 0; r < 10; ++r) {
    const auto tr = halfline_tasep_simulate(1.0, 300.0, derive_seed(202, r), 1000);
    const auto rep = arrival_identity_check(tr, passage_times(weights_from_waiting_times(tr)), 1e-9);
    pairs += rep.checked;
    violations += rep.violations;
    max_err = std::max(max_err, rep.max_error);
    min_injected = std::min(min_injected, tr.injected());
  }
  const double dt = seconds_since(t0);
  o.check(min_injected >= 50, fmt("fewest injected particles in a run: %d", min_injected));
  o.check(violations == 0 && pairs > 0,
          fmt("%ld (n,y) pairs, %ld violations, max error %.2e", pairs, violations, max_err));
  o.check(dt < 10.0, fmt("runtime %.2f s < 10 s", dt));
  return o;
}

Outcome finite_n_law() {
  Outcome o;
  const auto t0 = std::chrono::steady_clock::now();
  double worst = 0.0;
  for (double al : {0.6, 1.0, 1.5})
    for (double h : {0.5, 1.0, 2.0, 4.0}) {
      ExpKernelParams p;
      p.alpha = al;
      p.n = {1};
      p.m = {1};
      worst = std::max(worst, std::abs(finite_n_lpp_cdf({h}, p) - (1 - std::exp(-al * h))));
    }
  o.check(worst < 1e-6, fmt("n=m=1 exponential law, max error %.2e < 1e-6", worst));
  worst = 0.0;
  for (double al : {0.6, 1.0, 1.5})
    for (double h : {1.0, 3.0, 6.0}) {
      ExpKernelParams p;
      p.alpha = al;
      p.n = {2};
      p.m = {2};
      worst = std::max(worst, std::abs(finite_n_lpp_cdf({h}, p) - oracle::hypoexp_2_2(al, h)));
    }
  o.check(worst < 1e-5, fmt("n=m=2 hypoexponential law, max error %.2e < 1e-5", worst));
  const long m = 1000000;
  const std::vector<double> hs = {12.0, 16.0, 20.0};
  std::vector<long> below(hs.size(), 0);
  for (long r = 0; r < m; ++r) {
    const double h44 = diagonal_passage_times(4, 1.0, derive_seed(303, r)).back();
    for (size_t k = 0; k < hs.size(); ++k) below[k] += h44 < hs[k];
  }
  ExpKernelParams p;
  p.alpha = 1.0;
  p.n = {4};
  p.m = {4};
  for (size_t k = 0; k < hs.size(); ++k) {
    const double mc = static_cast<double>(below[k]) / m;
    const double se = std::sqrt(mc * (1 - mc) / m);
    const double pf = finite_n_lpp_cdf({hs[k]}, p);
    o.check(std::abs(pf - mc) < 3 * se,
            fmt("n=m=4 h=%g: Pfaffian %.6f, MC %.6f, |diff| = %.2f standard errors", hs[k], pf, mc,
                std::abs(pf - mc) / se));
  }
  const double dt = seconds_since(t0);
  o.check(dt < 300.0, fmt("runtime %.1f s < 300 s", dt));
  return o;
}

Outcome pfaffian_algebra() {
  Outcome o;
  std::mt19937_64 g(404);
  std::normal_distribution<double> z;
  std::uniform_int_distribution<int> half(1, 30);
  double worst = 0.0;
  for (int k = 0; k < 100; ++k) {
    const int n = 2 * half(g);
    Eigen::MatrixXd a(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) a(i, j) = z(g);
    a = (a - a.transpose()).eval();
    const double pf = pfaffian(SkewMatrix(a)), det = a.determinant();
    worst = std::max(worst, std::abs(pf * pf - det) / std::abs(det));
  }
  o.check(worst < 1e-10, fmt("100 random skew matrices, dimensions 2..60: max |Pf^2 - det|/|det| = %.2e", worst));
  double w4 = 0.0;
  for (int k = 0; k < 100; ++k) {
    double v[6];
    for (double& x : v) x = z(g);
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(4, 4);
    a(0, 1) = v[0];
    a(0, 2) = v[1];
    a(0, 3) = v[2];
    a(1, 2) = v[3];
    a(1, 3) = v[4];
    a(2, 3) = v[5];
    a = (a - a.transpose()).eval();
    w4 = std::max(w4, std::abs(pfaffian(SkewMatrix(a)) - (v[0] * v[5] - v[1] * v[4] + v[2] * v[3])));
  }
  o.check(w4 < 1e-14, fmt("4x4 closed form a12 a34 - a13 a24 + a14 a23: max error %.2e", w4));
  return o;
}

Outcome quadrature_stability() {
  Outcome o;
  const auto t0 = std::chrono::steady_clock::now();
  const NystromSpec base = default_spec();
  NystromSpec dbl = base;
  dbl.nodes *= 2;
  dbl.panels *= 2;
  const QuadOptions q2 = QuadOptions{}.refined();
  const double gue = f_gue(0.0, base), goe = f_goe(0.0, base), gse = f_gse(0.0, base);
  const double gue2 = fredholm_det(
      [&](const std::vector<double>& a, const std::vector<double>& b) { return airy_kernel_matrix(a, b, q2); },
      0.0, dbl);
  const double goe2 = fredholm_pf(GoeKernel(q2), DomainDk{{0.0}}, dbl);
  const double gse2 = fredholm_pf(GseKernel(q2), DomainDk{{0.0}}, dbl);
  o.check(std::abs(gue - gue2) < 1e-7, fmt("F_GUE(0) = %.12f, change under doubling %.1e", gue, std::abs(gue - gue2)));
  o.check(std::abs(goe - goe2) < 1e-7, fmt("F_GOE(0) = %.12f, change under doubling %.1e", goe, std::abs(goe - goe2)));
  o.check(std::abs(gse - gse2) < 1e-7, fmt("F_GSE(0) = %.12f, change under doubling %.1e", gse, std::abs(gse - gse2)));
  std::vector<double> grid;
  for (int i = 0; i <= 36; ++i) grid.push_back(-6.0 + 0.25 * i);
  for (auto h : {CdfHandle::gue(), CdfHandle::goe(), CdfHandle::gse()}) {
    const auto f = h.tabulate(grid);
    bool mono = true;
    for (size_t i = 1; i < f.size(); ++i) mono = mono && f[i] >= f[i - 1];
    const double top = h(8.0);
    o.check(mono, fmt("%s monotone on [-6, 3] step 0.25", family_name(h.family()).c_str()));
    o.check(std::abs(1 - top) < 1e-6, fmt("%s(8) = 1 - %.1e", family_name(h.family()).c_str(), 1 - top));
  }
  const double boost_det = oracle::f_gue(0.0);
  o.check(std::abs(gue - boost_det) < 1e-9,
          fmt("F_GUE(0) against an independent Boost-Airy Nystrom: %.12f", boost_det));
  const double mc = gue_edge_mc(0.0, 350000, 505);
  o.check(std::abs(gue - mc) < 1e-3,
          fmt("F_GUE(0) against the random-matrix edge (tridiagonal GUE, N = 1e6, 3.5e5 samples): %.4f, "
              "|diff| = %.1e < 1e-3", mc, std::abs(gue - mc)));
  const double dt = seconds_since(t0);
  o.check(dt < 120.0, fmt("runtime %.1f s < 120 s", dt));
  return o;
}

Outcome crossover_degenerations() {
  Outcome o;
  for (double h : {-1.0, 0.0, 1.0}) {
    const double gse = f_gse(h), goe = f_goe(h);
    const double c8 = cross_cdf({h}, 8.0, {0.0});
    const double c0 = cross_cdf({h}, 0.0, {0.0});
    const double su = su_cdf({h}, {0.05});
    o.check(std::abs(c8 - gse) < 1e-3, fmt("h=%+g: |cross(varpi=8, eta=0) - F_GSE| = %.2e < 1e-3", h, std::abs(c8 - gse)));
    o.check(std::abs(c0 - goe) < 1e-3, fmt("h=%+g: |cross(varpi=0, eta=0) - F_GOE| = %.2e < 1e-3", h, std::abs(c0 - goe)));
    o.check(std::abs(su - gse) < 2e-3, fmt("h=%+g: |su(eta=0.05) - F_GSE| = %.2e < 2e-3", h, std::abs(su - gse)));
  }
  return o;
}

ExperimentResult experiment(const std::string& cfg) {
  return run_experiment(parse_config(json::parse(cfg)));
}

double comparison_ks(const ExperimentResult& r, const std::string& family) {
  for (const auto& c : r.report["comparisons"])
    if (c["family"] == family) return c["ks"].get<double>();
  return 1.0;
}

Outcome asymptotic_statistics() {
  Outcome o;
  const auto t0 = std::chrono::steady_clock::now();
  struct Case {
    double alpha;
    const char* family;
  };
  std::vector<double> first_alpha_one;
  for (Case c : {Case{1.0, "gse"}, Case{0.5, "goe"}, Case{0.3, "gaussian"}}) {
    const auto r = experiment(fmt(R"({"tag":"thm1.3","alpha":%g,"t":2000,"replicates":2000,"seed":7})", c.alpha));
    const double ks = comparison_ks(r, c.family);
    o.check(ks < 0.08, fmt("FTASEP first particle, alpha=%g, t=2000, M=2000: KS to %s = %.4f < 0.08", c.alpha,
                           c.family, ks));
    const std::string best = r.report["best_family"];
    o.check(best == c.family, fmt("alpha=%g: minimum-KS family %s (gaussian %.3f, goe %.3f, gse %.3f), predicted %s",
                                  c.alpha, best.c_str(), comparison_ks(r, "gaussian"), comparison_ks(r, "goe"),
                                  comparison_ks(r, "gse"), c.family));
    if (c.alpha == 1.0)
      for (const auto& row : r.rows) first_alpha_one.push_back(row[0]);
  }
  {
    const auto r = experiment(R"({"tag":"thm1.2","alpha":1,"r":0.5,"t":2000,"replicates":2000,"seed":7})");
    const double ks = comparison_ks(r, "gue");
    o.check(ks < 0.08, fmt("FTASEP particle rt, r=0.5, t=2000, M=2000: KS to gue = %.4f < 0.08", ks));
  }
  {
    const auto r = experiment(R"({"tag":"thm1.9","alpha":1,"n":500,"replicates":2000,"seed":7})");
    const double ks = comparison_ks(r, "gse");
    o.check(ks < 0.08, fmt("LPP diagonal, alpha=1, n=500, M=2000: KS to gse = %.4f < 0.08", ks));
  }
  {
    const auto r = experiment(R"({"tag":"thm1.10","alpha":1,"kappa":0.25,"n":500,"replicates":2000,"seed":7})");
    const double ks = comparison_ks(r, "gue");
    o.check(ks < 0.08, fmt("LPP off-diagonal, kappa=1/4, alpha=1, n=500, M=2000: KS to gue = %.4f < 0.08", ks));
  }
  {
    // orientation tripwire: P(X <= x) against F(x) instead of P(X >= x) against F(-x)
    const auto f = TabulatedCdf::from(CdfHandle::gse(), -9.0, 6.0, 0.1);
    const double ks_flip = ks_distance(EmpiricalCdf(first_alpha_one), [&](double x) { return f(x); });
    o.check(ks_flip >= 0.3, fmt("deliberately flipped orientation, alpha=1: KS %.3f >= 0.3", ks_flip));
  }
  const double dt = seconds_since(t0);
  o.check(dt < 1200.0, fmt("runtime %.0f s < 1200 s", dt));
  return o;
}

Outcome hydrodynamics() {
  Outcome o;
  const auto d = experiment(R"({"tag":"density","alpha":1,"t":2000,"replicates":200,"seed":11})");
  for (const auto& c : d.report["checks"]) {
    if (c["check"] == "density_sup_error")
      o.check(c["pass"], fmt("density sup-error on [-0.9, 0.2] at t=2000, M=200: %.4f < 0.03", c["value"].get<double>()));
    else if (c["particle"].get<int>() > 1)
      o.check(c["pass"], fmt("x_%d(t)/t = %.4f vs %.4f, within 0.01", c["particle"].get<int>(),
                             c["value"].get<double>(), c["target"].get<double>()));
  }
  const auto f = experiment(R"({"tag":"flux","alpha":1,"p":0.5,"t":400,"replicates":8,"seed":12})");
  const auto& c = f.report["checks"][0];
  o.check(c["pass"], fmt("stationary flux at p=1/2: %.5f vs 1/6, relative error %.4f < 0.02", c["value"].get<double>(),
                         c["relative_error"].get<double>()));
  return o;
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  return std::string(std::istreambuf_iterator<char>(f), {});
}

Outcome determinism(const std::string& cli) {
  Outcome o;
  if (cli.empty()) {
    o.check(false, "no CLI path given");
    return o;
  }
  const fs::path root = fs::temp_directory_path() / "kpz_acceptance_determinism";
  fs::remove_all(root);
  fs::create_directories(root);
  struct Cmd {
    std::string name, sub, config;
  };
  const std::vector<Cmd> cmds = {
      {"simulate_ftasep", "simulate", R"({"model":"ftasep","alpha":0.7,"t":60,"seed":3})"},
      {"simulate_halfline", "simulate", R"({"model":"halfline","alpha":0.8,"t":60,"seed":3})"},
      {"lpp", "lpp", R"({"n":40,"alpha":0.6,"seed":3})"},
      {"cdf", "cdf", R"({"family":"goe","lo":-4,"hi":2,"step":0.5})"},
      {"verify", "verify", "{}"},
      {"experiment_first", "experiment", R"({"tag":"thm1.3","alpha":0.5,"t":100,"replicates":60,"seed":3,"nodes":16})"},
      {"experiment_lpp", "experiment", R"({"tag":"thm1.11","alpha":1,"varpi":0.5,"eta":[0.1],"n":60,"replicates":60,"seed":3,"nodes":16})"},
  };
  for (const auto& c : cmds) {
    const fs::path cfg = root / (c.name + ".json");
    std::ofstream(cfg) << c.config;
    std::vector<std::string> files;
    bool same = true, ran = true;
    std::vector<fs::path> outs;
    for (int run = 0; run < 2; ++run) {
      const fs::path out = root / (c.name + "_" + std::to_string(run));
      outs.push_back(out);
      const std::string line = "\"" + cli + "\" " + c.sub + " --config \"" + cfg.string() + "\" --seed 5 --out \"" +
                               out.string() + "\" > /dev/null 2>&1";
      const int rc = std::system(line.c_str());
      ran = ran && WIFEXITED(rc) && WEXITSTATUS(rc) <= 1;
    }
    for (const auto& e : fs::directory_iterator(outs[0])) {
      files.push_back(e.path().filename().string());
      same = same && fs::exists(outs[1] / e.path().filename()) &&
             slurp(e.path()) == slurp(outs[1] / e.path().filename());
    }
    std::sort(files.begin(), files.end());
    std::string list;
    for (const auto& f : files) list += (list.empty() ? "" : ", ") + f;
    o.check(ran && same && !files.empty(), fmt("kpz %s (%s): %s byte-identical on rerun", c.sub.c_str(),
                                               c.name.c_str(), list.c_str()));
  }
  fs::remove_all(root);
  return o;
}

}  // namespace

int main(int argc, char** argv) {
  const std::string cli = argc > 1 ? argv[1] : "";
  struct Item {
    int id;
    const char* name;
    std::function<Outcome()> run;
  };
  const std::vector<Item> items = {
      {1, "exact coupling FTASEP -> half-line TASEP", coupling},
      {2, "arrival identity", arrival_identity},
      {3, "exact finite-n law", finite_n_law},
      {4, "Pfaffian algebra", pfaffian_algebra},
      {5, "quadrature stability", quadrature_stability},
      {6, "crossover degenerations", crossover_degenerations},
      {7, "asymptotic statistics", asymptotic_statistics},
      {8, "hydrodynamics", hydrodynamics},
      {9, "determinism", [&] { return determinism(cli); }},
  };
  std::vector<int> only;
  for (int i = 2; i < argc; ++i) only.push_back(std::atoi(argv[i]));
  bool all = true;
  std::vector<std::string> summary;
  for (const auto& it : items) {
    if (!only.empty() && std::find(only.begin(), only.end(), it.id) == only.end()) continue;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = it.run();
    } catch (const std::exception& e) {
      o.check(false, std::string("exception: ") + e.what());
    }
    const double dt = seconds_since(t0);
    all = all && o.pass;
    const std::string line =
        fmt("criterion %d %s: %s (%.1f s)", it.id, o.pass ? "PASS" : "FAIL", it.name, dt);
    std::printf("%s\n", line.c_str());
    for (const auto& d : o.details) std::printf("    %s\n", d.c_str());
    std::fflush(stdout);
    summary.push_back(line);
  }
  std::printf("\nsummary\n");
  for (const auto& s : summary) std::printf("%s\n", s.c_str());
  return all ? 0 : 1;
}
