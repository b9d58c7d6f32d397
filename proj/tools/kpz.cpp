#include <CLI11.hpp>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <random>

#include "kpz/distributions.hpp"
#include "kpz/export.hpp"
#include "kpz/harness.hpp"
#include "kpz/lpp.hpp"
#include "kpz/particles.hpp"
#include "kpz/pfaffian.hpp"

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

struct Common {
  std::string config, out = ".";
  std::optional<std::uint64_t> seed;
  std::optional<int> nodes;
  bool verify_mode = false;
};

json load_config(const std::string& path) {
  if (path.empty()) return json::object();
  std::ifstream f(path);
  if (!f) throw kpz::ConfigError("cannot open config " + path);
  try {
    return json::parse(f);
  } catch (const json::exception& e) {
    throw kpz::ConfigError(std::string("invalid JSON: ") + e.what());
  }
}

template <class T>
T get_or(const json& j, const char* k, T def) {
  if (!j.contains(k)) return def;
  try {
    return j[k].get<T>();
  } catch (const json::exception&) {
    throw kpz::ConfigError(std::string("bad value for '") + k + "'");
  }
}

void write_json(const fs::path& p, const json& j) {
  std::ofstream f(p);
  if (!f) throw std::runtime_error("cannot write " + p.string());
  f << j.dump(2) << '\n';
}

int cmd_simulate(const Common& c) {
  const json cfg = load_config(c.config);
  const std::string model = get_or<std::string>(cfg, "model", "ftasep");
  const double alpha = get_or<double>(cfg, "alpha", 1.0);
  const double t = get_or<double>(cfg, "t", 100.0);
  const std::uint64_t seed = c.seed.value_or(get_or<std::uint64_t>(cfg, "seed", 1));
  if (!(alpha > 0.0) || !(t > 0.0)) throw kpz::ConfigError("alpha and t must be positive");
  fs::create_directories(c.out);
  json rep;
  rep["model"] = model;
  rep["alpha"] = alpha;
  rep["t"] = t;
  rep["seed"] = seed;
  bool pass = true;
  if (model == "ftasep") {
    const int n = get_or<int>(cfg, "n_particles", static_cast<int>(std::ceil(2 * t)) + 1);
    const double p = get_or<double>(cfg, "p", 0.0);
    const kpz::ParticleState init =
        p > 0.0 ? kpz::stationary_gap_init(p, n + 1, kpz::derive_seed(seed, 0))
                : kpz::step_state(n, alpha);
    const auto tr = kpz::ftasep_simulate(alpha, init, t, seed, n);
    kpz::write_trajectory_csv((fs::path(c.out) / "trajectory.csv").string(), tr.events);
    std::ofstream f(fs::path(c.out) / "final_state.csv");
    f << "particle,position\n";
    for (int i = 0; i < tr.final_state.size(); ++i) f << i + 1 << ',' << tr.final_state.x[i] << '\n';
    const auto cr = kpz::verify_coupling(tr);
    pass = cr.pass;
    rep["n_particles"] = n;
    rep["events"] = tr.event_count;
    rep["x1"] = tr.final_state.x[0];
    rep["coupling_pass"] = cr.pass;
    if (!cr.pass) rep["coupling_message"] = cr.message;
  } else if (model == "halfline") {
    const int x_max = get_or<int>(cfg, "x_max", static_cast<int>(std::ceil(2 * t)) + 10);
    const auto tr = kpz::halfline_tasep_simulate(alpha, t, seed, x_max);
    kpz::write_trajectory_csv((fs::path(c.out) / "trajectory.csv").string(), tr.events);
    const auto grid = kpz::passage_times(kpz::weights_from_waiting_times(tr));
    const auto ar = kpz::arrival_identity_check(tr, grid);
    pass = ar.pass && !tr.truncated;
    rep["x_max"] = x_max;
    rep["events"] = tr.events.size();
    rep["injected"] = tr.injected();
    rep["truncated"] = tr.truncated;
    rep["arrival_identity_pass"] = ar.pass;
    rep["arrival_pairs_checked"] = ar.checked;
  } else {
    throw kpz::ConfigError("model must be ftasep or halfline");
  }
  rep["pass"] = pass;
  write_json(fs::path(c.out) / "report.json", rep);
  return pass ? 0 : 1;
}

int cmd_lpp(const Common& c) {
  const json cfg = load_config(c.config);
  const int n = get_or<int>(cfg, "n", 10);
  const double alpha = get_or<double>(cfg, "alpha", 1.0);
  const std::uint64_t seed = c.seed.value_or(get_or<std::uint64_t>(cfg, "seed", 1));
  if (n < 1 || !(alpha > 0.0)) throw kpz::ConfigError("need n >= 1 and alpha > 0");
  fs::create_directories(c.out);
  const auto w = kpz::sample_weights(n, alpha, seed);
  const auto g = kpz::passage_times(w);
  kpz::write_grid_csv((fs::path(c.out) / "grid.csv").string(), w, g);
  json rep;
  rep["n"] = n;
  rep["alpha"] = alpha;
  rep["seed"] = seed;
  rep["H_nn"] = g.H(n, n);
  rep["chi_diag"] = kpz::rescale_diag(g.H(n, n), n, alpha);
  rep["pass"] = true;
  write_json(fs::path(c.out) / "report.json", rep);
  return 0;
}

int cmd_cdf(const Common& c) {
  const json cfg = load_config(c.config);
  const std::string fam = get_or<std::string>(cfg, "family", "gue");
  const double lo = get_or<double>(cfg, "lo", -6.0), hi = get_or<double>(cfg, "hi", 3.0);
  const double step = get_or<double>(cfg, "step", 0.25);
  if (!(step > 0.0) || !(hi >= lo)) throw kpz::ConfigError("need lo <= hi and step > 0");
  kpz::NystromSpec s = kpz::default_spec(2.0, c.verify_mode);
  if (c.nodes) s.nodes = *c.nodes;
  const std::vector<double> eta = get_or<std::vector<double>>(cfg, "eta", {0.0});
  kpz::CdfHandle h = kpz::CdfHandle::gaussian();
  if (fam == "gaussian") {
  } else if (fam == "gue") {
    h = kpz::CdfHandle::gue(s);
  } else if (fam == "goe") {
    h = kpz::CdfHandle::goe(s);
  } else if (fam == "gse") {
    h = kpz::CdfHandle::gse(s);
  } else if (fam == "cross") {
    h = kpz::CdfHandle::cross(get_or<double>(cfg, "varpi", 0.0), {eta.at(0)}, s);
  } else if (fam == "su") {
    if (!(eta.at(0) > 0.0)) throw kpz::ConfigError("su needs eta > 0");
    h = kpz::CdfHandle::su({eta.at(0)}, s);
  } else if (fam == "finite_n") {
    kpz::ExpKernelParams p;
    p.alpha = get_or<double>(cfg, "alpha", 1.0);
    p.n = {get_or<int>(cfg, "n", 1)};
    p.m = {get_or<int>(cfg, "m", p.n[0])};
    try {
      p.validate();
    } catch (const std::invalid_argument& e) {
      throw kpz::ConfigError(e.what());
    }
    s.scale = kpz::finite_n_map_scale(p);
    h = kpz::CdfHandle::finite_n(p, s);
  } else {
    throw kpz::ConfigError("unknown family " + fam);
  }
  std::vector<double> xs;
  const int m = static_cast<int>(std::lround((hi - lo) / step));
  for (int i = 0; i <= m; ++i) xs.push_back(lo + i * step);
  const auto fs_ = h.tabulate(xs);
  fs::create_directories(c.out);
  kpz::write_cdf_table((fs::path(c.out) / "cdf.csv").string(), xs, fs_);
  bool monotone = true;
  for (size_t i = 1; i < fs_.size(); ++i) monotone = monotone && fs_[i] >= fs_[i - 1] - 1e-9;
  json rep;
  rep["family"] = fam;
  rep["nodes"] = s.nodes;
  rep["points"] = xs.size();
  rep["monotone"] = monotone;
  rep["pass"] = monotone;
  write_json(fs::path(c.out) / "report.json", rep);
  return monotone ? 0 : 1;
}

int cmd_verify(const Common& c) {
  const std::uint64_t seed = c.seed.value_or(1);
  json checks = json::array();
  bool all = true;
  auto add = [&](const std::string& name, bool ok, json extra) {
    extra["check"] = name;
    extra["pass"] = ok;
    checks.push_back(extra);
    all = all && ok;
  };
  {
    long events = 0;
    bool ok = true;
    for (int r = 0; r < 50; ++r) {
      kpz::FtasepOptions o;
      o.max_events = 10000;
      const auto tr = kpz::ftasep_simulate(1.0, kpz::step_state(4000), 1e9,
                                           kpz::derive_seed(seed, r), 4000, o);
      const auto rep = kpz::verify_coupling(tr);
      ok = ok && rep.pass;
      events += rep.events_checked;
    }
    add("coupling", ok, {{"events", events}});
  }
  {
    bool ok = true;
    long pairs = 0;
    for (int r = 0; r < 10; ++r) {
      const auto tr = kpz::halfline_tasep_simulate(1.0, 300.0, kpz::derive_seed(seed + 1, r), 1000);
      const auto a = kpz::arrival_identity_check(
          tr, kpz::passage_times(kpz::weights_from_waiting_times(tr)));
      ok = ok && a.pass && tr.injected() >= 50;
      pairs += a.checked;
    }
    add("arrival_identity", ok, {{"pairs", pairs}});
  }
  {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> z;
    double worst = 0.0;
    for (int k = 0; k < 100; ++k) {
      const int dim = 2 * (1 + k % 30);
      Eigen::MatrixXd a(dim, dim);
      for (int i = 0; i < dim; ++i)
        for (int j = 0; j < dim; ++j) a(i, j) = z(rng);
      a = (a - a.transpose()).eval();
      const double pf = kpz::pfaffian(a), det = a.determinant();
      worst = std::max(worst, std::abs(pf * pf - det) / std::max(std::abs(det), 1e-300));
    }
    add("pfaffian_squared", worst < 1e-10, {{"max_relative_error", worst}});
  }
  {
    kpz::NystromSpec s = kpz::default_spec(2.0, c.verify_mode);
    if (c.nodes) s.nodes = *c.nodes;
    double worst = 0.0;
    for (double al : {0.6, 1.0, 1.5})
      for (double h : {0.5, 1.0, 2.0, 4.0}) {
        kpz::ExpKernelParams p;
        p.alpha = al;
        p.n = {1};
        p.m = {1};
        s.scale = kpz::finite_n_map_scale(p);
        worst = std::max(worst, std::abs(kpz::finite_n_lpp_cdf({h}, p, s) - (1 - std::exp(-al * h))));
      }
    add("finite_n_exponential", worst < 1e-6, {{"max_error", worst}});
  }
  {
    kpz::NystromSpec s = kpz::default_spec(2.0, c.verify_mode);
    if (c.nodes) s.nodes = *c.nodes;
    const kpz::NystromSpec d = s.refined();
    const double e1 = std::abs(kpz::f_gue(0, s) - kpz::f_gue(0, d));
    const double e2 = std::abs(kpz::f_goe(0, s) - kpz::f_goe(0, d));
    const double e3 = std::abs(kpz::f_gse(0, s) - kpz::f_gse(0, d));
    add("quadrature_doubling", std::max({e1, e2, e3}) < 1e-7,
        {{"gue", e1}, {"goe", e2}, {"gse", e3}});
  }
  fs::create_directories(c.out);
  json rep;
  rep["seed"] = seed;
  rep["checks"] = checks;
  rep["pass"] = all;
  write_json(fs::path(c.out) / "report.json", rep);
  return all ? 0 : 1;
}

int cmd_experiment(const Common& c) {
  if (c.config.empty()) throw kpz::ConfigError("experiment needs --config");
  json cfg = load_config(c.config);
  if (c.seed) cfg["seed"] = *c.seed;
  if (c.nodes) cfg["nodes"] = *c.nodes;
  if (c.verify_mode) cfg["verify_mode"] = true;
  kpz::ExperimentConfig ec = kpz::parse_config(cfg);
  ec.out = c.out;
  const auto res = kpz::run_experiment(ec);
  kpz::write_experiment(ec, res);
  std::cout << ec.tag << ": " << (res.pass ? "pass" : "FAIL") << '\n';
  return res.pass ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"FTASEP, half-space LPP and Fredholm Pfaffian toolkit"};
  app.require_subcommand(1);
  Common c;
  auto add_common = [&](CLI::App* s) {
    s->add_option("--config", c.config, "JSON config file");
    s->add_option("--seed", c.seed, "master seed");
    s->add_option("--out", c.out, "output directory");
    s->add_option("--nodes", c.nodes, "Nystrom nodes per component");
    s->add_flag("--verify-mode", c.verify_mode, "96 nodes per component");
  };
  auto* sim = app.add_subcommand("simulate", "simulate FTASEP or half-line TASEP");
  auto* lpp = app.add_subcommand("lpp", "sample a half-space LPP grid");
  auto* cdf = app.add_subcommand("cdf", "tabulate a distribution function");
  auto* ver = app.add_subcommand("verify", "run the exact self-checks");
  auto* exp = app.add_subcommand("experiment", "run a statistical experiment");
  for (auto* s : {sim, lpp, cdf, ver, exp}) add_common(s);
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }
  const auto t0 = std::chrono::steady_clock::now();
  int code = 0;
  try {
    if (*sim) code = cmd_simulate(c);
    else if (*lpp) code = cmd_lpp(c);
    else if (*cdf) code = cmd_cdf(c);
    else if (*ver) code = cmd_verify(c);
    else code = cmd_experiment(c);
  } catch (const kpz::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "invalid input: " << e.what() << '\n';
    return 2;
  }
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  std::cerr << "runtime " << secs << " s\n";
  return code;
}
