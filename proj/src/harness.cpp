#include "kpz/harness.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <random>
#include <sstream>

#include "kpz/hydro.hpp"
#include "kpz/lpp.hpp"
#include "kpz/particles.hpp"

namespace kpz {

using nlohmann::json;

namespace {
const double kC43 = std::cbrt(16.0);  // 2^{4/3}

void require_time(double t) {
  if (!(t > 0.0)) throw std::invalid_argument("t must be positive");
}
}  // namespace

// ---- rescalings ----

double gaussian_scale(double alpha, ScaleForm form) {
  if (!(alpha > 0.0 && alpha < 0.5)) throw std::invalid_argument("alpha must be in (0,1/2)");
  const double a1 = alpha * (1 - alpha);
  if (form == ScaleForm::kUnmatched) return (1 - 2 * alpha) / std::sqrt(a1);
  return std::sqrt((1 - 2 * alpha) * a1);
}

double bulk_scale(double r, ScaleForm form) {
  if (!(r > 0.0 && r < 1.0)) throw std::invalid_argument("r must be in (0,1)");
  if (form == ScaleForm::kUnmatched) return std::pow(1 + r, 5.0 / 3.0) / std::cbrt(1 - r) / kC43;
  return std::pow(1 - r * r, 2.0 / 3.0) / kC43;
}

double rescale_ftasep_first(double x1, double t, double alpha, ScaleForm form) {
  require_time(t);
  if (!(alpha > 0.0)) throw std::invalid_argument("alpha must be positive");
  if (alpha >= 0.5) return (x1 - t / 4) / (std::cbrt(t) / kC43);
  return (x1 - t * alpha * (1 - alpha)) / (gaussian_scale(alpha, form) * std::sqrt(t));
}

int bulk_index(double t, double r) {
  return std::max(1, static_cast<int>(std::floor(r * t)));
}

double rescale_ftasep_bulk(double x, double t, double r, ScaleForm form) {
  require_time(t);
  const double s = bulk_scale(r, form);
  return (x - t * (1 - 6 * r + r * r) / 4) / (s * std::cbrt(t));
}

int cross_index(double t, double eta) {
  return std::max(1, static_cast<int>(std::floor(std::cbrt(2.0) * eta * std::pow(t, 2.0 / 3.0))));
}

double rescale_ftasep_cross(double x, double t, double eta, bool literal) {
  require_time(t);
  if (!(eta >= 0.0)) throw std::invalid_argument("eta must be nonnegative");
  const double c = std::cbrt(t);
  const double quad = eta * eta / kC43 * (literal ? 1.0 : c);
  return (x - t / 4 + eta * 1.5 * std::cbrt(2.0) * c * c - quad) / (c / kC43);
}

double crossover_alpha_ftasep(double t, double varpi) {
  require_time(t);
  return (1 + kC43 * varpi / std::cbrt(t)) / 2;
}

double crossover_alpha_lpp(int n, double varpi) {
  return (1 + 2 * varpi / (kC43 * std::cbrt(static_cast<double>(n)))) / 2;
}

// ---- empirical distributions ----

EmpiricalCdf::EmpiricalCdf(std::vector<double> samples) : s_(std::move(samples)) {
  if (s_.empty()) throw std::invalid_argument("empty sample set");
  std::sort(s_.begin(), s_.end());
}

double EmpiricalCdf::operator()(double x) const {
  return static_cast<double>(std::upper_bound(s_.begin(), s_.end(), x) - s_.begin()) / s_.size();
}

double EmpiricalCdf::below(double x) const {
  return static_cast<double>(std::lower_bound(s_.begin(), s_.end(), x) - s_.begin()) / s_.size();
}

EmpiricalCdf empirical_cdf(std::vector<double> samples) { return EmpiricalCdf(std::move(samples)); }

double ks_distance(const EmpiricalCdf& e, const std::function<double(double)>& f) {
  double d = 0.0;
  const auto& s = e.samples();
  for (size_t i = 0; i < s.size(); ++i) {
    if (i > 0 && s[i] == s[i - 1]) continue;
    const double fx = f(s[i]);
    d = std::max({d, std::abs(e(s[i]) - fx), std::abs(e.below(s[i]) - fx)});
  }
  return d;
}

double ks_distance(const EmpiricalCdf& a, const EmpiricalCdf& b) {
  double d = 0.0;
  for (const auto* e : {&a, &b})
    for (double x : e->samples()) {
      d = std::max(d, std::abs(a(x) - b(x)));
      d = std::max(d, std::abs(a.below(x) - b.below(x)));
    }
  return d;
}

std::vector<double> negated(const std::vector<double>& v) {
  std::vector<double> out(v.size());
  std::transform(v.begin(), v.end(), out.begin(), [](double x) { return -x; });
  return out;
}

// ---- config ----

namespace {

const std::vector<std::string> kTags = {"thm1.1",  "thm1.2",  "thm1.3",  "thm1.4",
                                        "thm1.5",  "thm1.9",  "thm1.10", "thm1.11",
                                        "thm1.12", "density", "flux",    "couplings"};

bool ftasep_tag(const std::string& t) {
  return t == "thm1.1" || t == "thm1.2" || t == "thm1.3" || t == "thm1.4" || t == "thm1.5" ||
         t == "density" || t == "flux";
}
ScaleForm scale_form(const ExperimentConfig& c) {
  return c.unmatched_scale ? ScaleForm::kUnmatched : ScaleForm::kLppMatched;
}

bool lpp_tag(const std::string& t) {
  return t == "thm1.9" || t == "thm1.10" || t == "thm1.11" || t == "thm1.12";
}

}  // namespace

ExperimentConfig parse_config(const json& j) {
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  static const std::vector<std::string> known = {
      "tag",   "alpha", "r",     "kappa",      "varpi",            "eta",
      "t",     "n",     "replicates", "seed",  "p",                "nodes",
      "literal_eta_term", "flip_orientation", "verify_mode", "unmatched_scale"};
  for (auto it = j.begin(); it != j.end(); ++it)
    if (std::find(known.begin(), known.end(), it.key()) == known.end())
      throw ConfigError("unknown config key '" + it.key() + "'");
  ExperimentConfig c;
  try {
    if (!j.contains("tag") || !j["tag"].is_string()) throw ConfigError("missing string 'tag'");
    c.tag = j["tag"].get<std::string>();
    auto num = [&](const char* k) -> std::optional<double> {
      if (!j.contains(k)) return std::nullopt;
      if (!j[k].is_number()) throw ConfigError(std::string("'") + k + "' must be a number");
      return j[k].get<double>();
    };
    if (auto a = num("alpha")) c.alpha = *a;
    c.r = num("r");
    c.kappa = num("kappa");
    c.varpi = num("varpi");
    c.p = num("p");
    c.t = num("t");
    if (j.contains("n")) {
      if (!j["n"].is_number_integer()) throw ConfigError("'n' must be an integer");
      c.n = j["n"].get<int>();
    }
    if (j.contains("eta")) {
      if (!j["eta"].is_array()) throw ConfigError("'eta' must be an array");
      for (const auto& e : j["eta"]) {
        if (!e.is_number()) throw ConfigError("'eta' entries must be numbers");
        c.eta.push_back(e.get<double>());
      }
    }
    if (!j.contains("replicates") || !j["replicates"].is_number_integer())
      throw ConfigError("missing integer 'replicates'");
    c.replicates = j["replicates"].get<int>();
    if (!j.contains("seed") || !j["seed"].is_number_integer() ||
        (j["seed"].is_number_integer() && !j["seed"].is_number_unsigned() &&
         j["seed"].get<long long>() < 0))
      throw ConfigError("missing nonnegative integer 'seed'");
    c.seed = j["seed"].get<std::uint64_t>();
    if (j.contains("nodes")) {
      if (!j["nodes"].is_number_integer()) throw ConfigError("'nodes' must be an integer");
      c.nodes = j["nodes"].get<int>();
    }
    if (j.contains("literal_eta_term")) c.literal_eta_term = j["literal_eta_term"].get<bool>();
    if (j.contains("flip_orientation")) c.flip_orientation = j["flip_orientation"].get<bool>();
    if (j.contains("unmatched_scale")) c.unmatched_scale = j["unmatched_scale"].get<bool>();
    if (j.contains("verify_mode")) c.verify_mode = j["verify_mode"].get<bool>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("malformed config: ") + e.what());
  }
  validate_config(c);
  return c;
}

void validate_config(const ExperimentConfig& c) {
  if (std::find(kTags.begin(), kTags.end(), c.tag) == kTags.end())
    throw ConfigError("unknown tag '" + c.tag + "'");
  if (c.replicates < 1) throw ConfigError("replicates must be at least 1");
  if (!(c.alpha > 0.0)) throw ConfigError("alpha must be positive");
  if (c.nodes < 4) throw ConfigError("nodes must be at least 4");
  if (ftasep_tag(c.tag) && !(c.t && *c.t > 0.0)) throw ConfigError("'t' > 0 required");
  if (lpp_tag(c.tag) && !(c.n && *c.n >= 1)) throw ConfigError("integer 'n' >= 1 required");
  auto eta_ok = [&](bool strict_positive) {
    if (c.eta.empty()) throw ConfigError("'eta' list required");
    for (size_t i = 0; i < c.eta.size(); ++i) {
      if (!(c.eta[i] >= 0.0) || (strict_positive && !(c.eta[i] > 0.0)))
        throw ConfigError(strict_positive ? "eta must be strictly positive"
                                          : "eta must be nonnegative");
      if (i > 0 && !(c.eta[i] > c.eta[i - 1])) throw ConfigError("eta must be increasing");
    }
  };
  if (c.tag == "thm1.1" && c.alpha != 1.0)
    throw ConfigError("thm1.1 is the alpha = 1 process; use thm1.3 for other rates");
  if (c.tag == "thm1.2") {
    if (!(c.r && *c.r > 0.0 && *c.r < 1.0)) throw ConfigError("thm1.2 needs r in (0,1)");
    if (!(c.alpha > (1 - *c.r) / 2))
      throw ConfigError("thm1.2 requires alpha > (1-r)/2");
  }
  if (c.tag == "thm1.4" || c.tag == "thm1.11") {
    if (!c.varpi) throw ConfigError(c.tag + " needs varpi");
    eta_ok(false);
    const double a = c.tag == "thm1.4" ? crossover_alpha_ftasep(*c.t, *c.varpi)
                                       : crossover_alpha_lpp(*c.n, *c.varpi);
    if (!(a > 0.0)) throw ConfigError("varpi too negative: the boundary rate is not positive");
  }
  if (c.tag == "thm1.5") {
    if (c.alpha != 1.0) throw ConfigError("thm1.5 is the alpha = 1 process");
    eta_ok(true);
  }
  if (c.tag == "thm1.12") {
    if (!(c.alpha > 0.5)) throw ConfigError("thm1.12 needs alpha > 1/2");
    eta_ok(true);
  }
  if (c.tag == "thm1.10") {
    if (!(c.kappa && *c.kappa > 0.0 && *c.kappa < 1.0))
      throw ConfigError("thm1.10 needs kappa in (0,1)");
    const double s = std::sqrt(*c.kappa);
    if (!(c.alpha > s / (1 + s))) throw ConfigError("thm1.10 needs alpha > sqrt(kappa)/(1+sqrt(kappa))");
  }
  if (c.tag == "thm1.11" || c.tag == "thm1.12") {
    for (double e : c.eta) {
      try {
        process_indices(*c.n, e);
      } catch (const std::invalid_argument&) {
        throw ConfigError("eta too large for n: process indices out of range");
      }
    }
  }
  if (c.tag == "flux" && c.p && !(*c.p >= 0.0 && *c.p <= 1.0))
    throw ConfigError("p must be in [0,1]");
  if (c.tag == "density" && c.r && !(*c.r > 0.0 && *c.r < 1.0))
    throw ConfigError("r must be in (0,1)");
}

// ---- simulation helpers ----

namespace {

int tracked_particles(double t, int max_index) {
  return static_cast<int>(std::ceil(2 * t)) + max_index + 1;
}

// Final positions of the given particles (1-based) after FTASEP(alpha) from step data.
std::vector<std::vector<long>> ftasep_positions(double alpha, double t, int replicates,
                                                std::uint64_t seed,
                                                const std::vector<int>& indices) {
  const int max_index = *std::max_element(indices.begin(), indices.end());
  const int n = tracked_particles(t, max_index);
  const ParticleState init = step_state(n, alpha);
  std::vector<std::vector<long>> out(replicates, std::vector<long>(indices.size()));
  FtasepOptions opt;
  opt.record = false;
#pragma omp parallel for schedule(dynamic)
  for (int r = 0; r < replicates; ++r) {
    const auto tr = ftasep_simulate(alpha, init, t, derive_seed(seed, r), n, opt);
    for (size_t k = 0; k < indices.size(); ++k) out[r][k] = tr.final_state.x[indices[k] - 1];
  }
  return out;
}

// Uniform offsets in [-1/2, 1/2) spreading lattice positions over their unit cell.
double lattice_jitter(std::uint64_t seed, int replicate, int observable) {
  Rng rng(derive_seed(derive_seed(seed, replicate), 0x6a09e667f3bcc909ULL + observable));
  return (rng() >> 11) * 0x1.0p-53 - 0.5;
}

NystromSpec table_spec(const ExperimentConfig& c) {
  NystromSpec s;
  s.nodes = c.verify_mode ? 96 : c.nodes;
  s.scale = 2.0;
  return s;
}

std::function<double(double)> tabulated(const CdfHandle& h) {
  if (h.family() == Family::kGaussian) return [](double x) { return gaussian_cdf(x); };
  auto t = std::make_shared<TabulatedCdf>(TabulatedCdf::from(h, -9.0, 6.0, 0.1));
  return [t](double x) { return (*t)(x); };
}

std::string eta_label(double e) {
  std::ostringstream s;
  s << e;
  return s.str();
}

struct Comparison {
  std::string observable, family;
  double ks = 0.0, threshold = 0.0;
  bool gated = true;
  json to_json() const {
    json j;
    j["observable"] = observable;
    j["family"] = family;
    j["ks"] = ks;
    if (gated) {
      j["threshold"] = threshold;
      j["pass"] = ks < threshold;
    }
    return j;
  }
};

// KS between P(X >= x) and F(-x) (reversed) or between P(X <= x) and F(x).
double ks_oriented(const std::vector<double>& x, const std::function<double(double)>& f,
                   bool reversed) {
  return ks_distance(EmpiricalCdf(reversed ? negated(x) : x), f);
}

CdfHandle family_handle(Family f, const NystromSpec& s) {
  switch (f) {
    case Family::kGaussian: return CdfHandle::gaussian();
    case Family::kGue: return CdfHandle::gue(s);
    case Family::kGoe: return CdfHandle::goe(s);
    default: return CdfHandle::gse(s);
  }
}

Family predicted_family(double alpha) {
  if (alpha > 0.5) return Family::kGse;
  if (alpha == 0.5) return Family::kGoe;
  return Family::kGaussian;
}

json base_report(const ExperimentConfig& c) {
  json j;
  json p;
  p["tag"] = c.tag;
  p["alpha"] = c.alpha;
  if (c.r) p["r"] = *c.r;
  if (c.kappa) p["kappa"] = *c.kappa;
  if (c.varpi) p["varpi"] = *c.varpi;
  if (c.p) p["p"] = *c.p;
  if (!c.eta.empty()) p["eta"] = c.eta;
  if (c.t) p["t"] = *c.t;
  if (c.n) p["n"] = *c.n;
  p["replicates"] = c.replicates;
  p["nodes"] = c.verify_mode ? 96 : c.nodes;
  if (c.literal_eta_term) p["literal_eta_term"] = true;
  if (c.flip_orientation) p["flip_orientation"] = true;
  if (c.unmatched_scale) p["unmatched_scale"] = true;
  j["params"] = p;
  j["seed"] = c.seed;
  return j;
}

void finish(ExperimentResult& res, const std::vector<Comparison>& cmp) {
  json arr = json::array();
  bool pass = true;
  for (const auto& c : cmp) {
    arr.push_back(c.to_json());
    if (c.gated) pass = pass && c.ks < c.threshold;
  }
  res.report["comparisons"] = arr;
  res.pass = pass;
}

void set_columns(ExperimentResult& res, std::vector<std::string> cols,
                 const std::vector<std::vector<double>>& per_column) {
  res.columns = std::move(cols);
  const size_t m = per_column.empty() ? 0 : per_column[0].size();
  res.rows.assign(m, std::vector<double>(per_column.size()));
  for (size_t i = 0; i < m; ++i)
    for (size_t k = 0; k < per_column.size(); ++k) res.rows[i][k] = per_column[k][i];
}

const char* kCalibration =
    "KS thresholds are finite-size calibration constants for the stated t, n and M, not "
    "limit-law claims";

// ---- tags ----

ExperimentResult run_first_particle(const ExperimentConfig& c) {
  ExperimentResult res;
  res.report = base_report(c);
  const double t = *c.t;
  const auto pos = ftasep_positions(c.alpha, t, c.replicates, c.seed, {1});
  std::vector<double> x(c.replicates);
  for (int r = 0; r < c.replicates; ++r)
    x[r] = rescale_ftasep_first(pos[r][0] + lattice_jitter(c.seed, r, 0), t, c.alpha, scale_form(c));
  const NystromSpec s = table_spec(c);
  const bool reversed = !c.flip_orientation;
  std::vector<Comparison> cmp;
  const Family pred = c.tag == "thm1.1" ? Family::kGse : predicted_family(c.alpha);
  std::vector<Family> fams = {pred};
  if (c.tag == "thm1.3") fams = {Family::kGaussian, Family::kGoe, Family::kGse};
  std::string best;
  double best_ks = 2.0;
  for (Family f : fams) {
    Comparison k;
    k.observable = "chi_first";
    k.family = family_name(f);
    k.ks = ks_oriented(x, tabulated(family_handle(f, s)), reversed);
    k.threshold = 0.08;
    k.gated = f == pred;
    if (k.ks < best_ks) {
      best_ks = k.ks;
      best = k.family;
    }
    cmp.push_back(k);
  }
  finish(res, cmp);
  if (c.tag == "thm1.3") {
    res.report["best_family"] = best;
    res.report["predicted_family"] = family_name(pred);
    res.report["best_matches_prediction"] = best == family_name(pred);
    res.pass = res.pass && best == family_name(pred);
  }
  double mean = 0.0;
  for (int r = 0; r < c.replicates; ++r) mean += static_cast<double>(pos[r][0]) / t;
  res.report["mean_x1_over_t"] = mean / c.replicates;
  res.report["orientation"] = reversed ? "P(X >= x) vs F(-x)" : "P(X <= x) vs F(x)";
  res.report["lattice_jitter"] = "uniform [-1/2,1/2) added to integer positions";
  res.report["note"] = kCalibration;
  set_columns(res, {"chi_first"}, {x});
  return res;
}

ExperimentResult run_bulk(const ExperimentConfig& c) {
  ExperimentResult res;
  res.report = base_report(c);
  const double t = *c.t, r = *c.r;
  const int idx = bulk_index(t, r);
  const auto pos = ftasep_positions(c.alpha, t, c.replicates, c.seed, {idx});
  std::vector<double> x(c.replicates);
  for (int k = 0; k < c.replicates; ++k)
    x[k] = rescale_ftasep_bulk(pos[k][0] + lattice_jitter(c.seed, k, 0), t, r, scale_form(c));
  Comparison k;
  k.observable = "chi_bulk";
  k.family = "gue";
  k.ks = ks_oriented(x, tabulated(CdfHandle::gue(table_spec(c))), !c.flip_orientation);
  k.threshold = 0.08;
  finish(res, {k});
  res.report["particle_index"] = idx;
  res.report["note"] = kCalibration;
  set_columns(res, {"chi_bulk"}, {x});
  return res;
}

ExperimentResult run_ftasep_cross(const ExperimentConfig& c) {
  ExperimentResult res;
  res.report = base_report(c);
  const double t = *c.t;
  const double alpha = c.tag == "thm1.4" ? crossover_alpha_ftasep(t, *c.varpi) : 1.0;
  std::vector<int> idx;
  for (double e : c.eta) idx.push_back(cross_index(t, e));
  const auto pos = ftasep_positions(alpha, t, c.replicates, c.seed, idx);
  std::vector<std::vector<double>> cols(c.eta.size(), std::vector<double>(c.replicates));
  std::vector<std::string> names;
  std::vector<Comparison> cmp;
  const NystromSpec s = table_spec(c);
  for (size_t k = 0; k < c.eta.size(); ++k) {
    for (int r = 0; r < c.replicates; ++r)
      cols[k][r] = rescale_ftasep_cross(pos[r][k] + lattice_jitter(c.seed, r, static_cast<int>(k)),
                                        t, c.eta[k], c.literal_eta_term);
    names.push_back("x_eta_" + eta_label(c.eta[k]));
    const CdfHandle h = c.tag == "thm1.4" ? CdfHandle::cross(*c.varpi, {c.eta[k]}, s)
                                          : CdfHandle::su({c.eta[k]}, s);
    Comparison q;
    q.observable = names.back();
    q.family = family_name(h.family());
    q.ks = ks_oriented(cols[k], tabulated(h), !c.flip_orientation);
    q.threshold = 0.1;
    cmp.push_back(q);
  }
  finish(res, cmp);
  res.report["alpha_used"] = alpha;
  res.report["particle_indices"] = idx;
  res.report["note"] = kCalibration;
  set_columns(res, names, cols);
  return res;
}

ExperimentResult run_lpp(const ExperimentConfig& c) {
  ExperimentResult res;
  res.report = base_report(c);
  const int n = *c.n;
  const NystromSpec s = table_spec(c);
  std::vector<Comparison> cmp;
  std::vector<std::string> names;
  std::vector<std::vector<double>> cols;

  if (c.tag == "thm1.9" || c.tag == "thm1.10") {
    const bool diag = c.tag == "thm1.9";
    const int m = diag ? n : std::max(1, static_cast<int>(std::floor(*c.kappa * n)));
    std::vector<double> x(c.replicates);
#pragma omp parallel for schedule(dynamic)
    for (int r = 0; r < c.replicates; ++r) {
      double h = 0.0;
      stream_passage_times(n, c.alpha, derive_seed(c.seed, r),
                           [&](int row, const std::vector<double>& v) {
                             if (row == n) h = v[m - 1];
                           });
      x[r] = diag ? rescale_diag(h, n, c.alpha) : rescale_offdiag(h, n, *c.kappa);
    }
    names.push_back(diag ? "chi_diag" : "chi_offdiag");
    cols.push_back(x);
    const Family pred = diag ? predicted_family(c.alpha) : Family::kGue;
    std::vector<Family> fams = {pred};
    if (diag) fams = {Family::kGaussian, Family::kGoe, Family::kGse};
    std::string best;
    double best_ks = 2.0;
    for (Family f : fams) {
      Comparison q;
      q.observable = names.back();
      q.family = family_name(f);
      q.ks = ks_oriented(x, tabulated(family_handle(f, s)), c.flip_orientation);
      q.threshold = 0.08;
      q.gated = f == pred;
      if (q.ks < best_ks) {
        best_ks = q.ks;
        best = q.family;
      }
      cmp.push_back(q);
    }
    if (diag) {
      res.report["best_family"] = best;
      res.report["predicted_family"] = family_name(pred);
    }
    if (!diag) res.report["m"] = m;
  } else {
    const double alpha = c.tag == "thm1.11" ? crossover_alpha_lpp(n, *c.varpi) : c.alpha;
    std::vector<std::pair<int, int>> ij;
    int n_max = 1;
    for (double e : c.eta) {
      ij.push_back(process_indices(n, e));
      n_max = std::max(n_max, ij.back().first);
    }
    cols.assign(c.eta.size(), std::vector<double>(c.replicates));
#pragma omp parallel for schedule(dynamic)
    for (int r = 0; r < c.replicates; ++r) {
      stream_passage_times(n_max, alpha, derive_seed(c.seed, r),
                           [&](int row, const std::vector<double>& v) {
                             for (size_t k = 0; k < ij.size(); ++k)
                               if (ij[k].first == row)
                                 cols[k][r] = rescale_process_value(v[ij[k].second - 1], n,
                                                                    c.eta[k]);
                           });
    }
    json pairs = json::array();
    for (size_t k = 0; k < c.eta.size(); ++k) {
      names.push_back("h_eta_" + eta_label(c.eta[k]));
      pairs.push_back({ij[k].first, ij[k].second});
      const CdfHandle h = c.tag == "thm1.11" ? CdfHandle::cross(*c.varpi, {c.eta[k]}, s)
                                             : CdfHandle::su({c.eta[k]}, s);
      Comparison q;
      q.observable = names.back();
      q.family = family_name(h.family());
      q.ks = ks_oriented(cols[k], tabulated(h), c.flip_orientation);
      q.threshold = 0.1;
      cmp.push_back(q);
    }
    res.report["alpha_used"] = alpha;
    res.report["indices"] = pairs;
  }
  finish(res, cmp);
  res.report["orientation"] = c.flip_orientation ? "P(H_n >= h) vs F(h)" : "P(H_n < h) vs F(h)";
  res.report["note"] = kCalibration;
  set_columns(res, names, cols);
  return res;
}

ExperimentResult run_density(const ExperimentConfig& c) {
  ExperimentResult res;
  res.report = base_report(c);
  const double t = *c.t;
  std::vector<double> rs = c.r ? std::vector<double>{*c.r} : std::vector<double>{0.1, 0.5};
  std::vector<int> idx = {1};
  for (double r : rs) idx.push_back(bulk_index(t, r));
  const int n = tracked_particles(t, *std::max_element(idx.begin(), idx.end()));
  const ParticleState init = step_state(n, c.alpha);
  std::vector<double> grid;
  for (int i = 0; i <= 22; ++i) grid.push_back(-0.9 + 0.05 * i);
  const long width = std::lround(std::pow(t, 2.0 / 3.0));
  std::vector<std::vector<double>> dens(c.replicates, std::vector<double>(grid.size()));
  std::vector<std::vector<double>> pos(c.replicates, std::vector<double>(idx.size()));
  FtasepOptions opt;
  opt.record = false;
#pragma omp parallel for schedule(dynamic)
  for (int r = 0; r < c.replicates; ++r) {
    const auto tr = ftasep_simulate(c.alpha, init, t, derive_seed(c.seed, r), n, opt);
    const auto& x = tr.final_state.x;  // decreasing
    for (size_t g = 0; g < grid.size(); ++g) {
      const long lo = static_cast<long>(std::floor(grid[g] * t)) - width / 2;
      const long hi = lo + width;  // [lo, hi)
      // count of positions in [lo, hi) in a decreasing sequence
      const auto a = std::lower_bound(x.begin(), x.end(), hi - 1, std::greater<long>());
      const auto b = std::lower_bound(x.begin(), x.end(), lo - 1, std::greater<long>());
      dens[r][g] = static_cast<double>(b - a) / width;
    }
    for (size_t k = 0; k < idx.size(); ++k) pos[r][k] = x[idx[k] - 1] / t;
  }
  std::vector<double> emp(grid.size(), 0.0), prof(grid.size());
  double sup = 0.0;
  for (size_t g = 0; g < grid.size(); ++g) {
    for (int r = 0; r < c.replicates; ++r) emp[g] += dens[r][g];
    emp[g] /= c.replicates;
    prof[g] = density_profile(grid[g]);
    sup = std::max(sup, std::abs(emp[g] - prof[g]));
  }
  json checks = json::array();
  bool pass = sup < 0.03;
  checks.push_back({{"check", "density_sup_error"}, {"value", sup}, {"threshold", 0.03},
                    {"pass", sup < 0.03}});
  for (size_t k = 0; k < idx.size(); ++k) {
    double mean = 0.0;
    for (int r = 0; r < c.replicates; ++r) mean += pos[r][k];
    mean /= c.replicates;
    const double target = k == 0 ? 0.25 : lln_position(rs[k - 1]);
    const double err = std::abs(mean - target);
    pass = pass && err < 0.01;
    checks.push_back({{"check", "position_over_t"},
                      {"particle", idx[k]},
                      {"value", mean},
                      {"target", target},
                      {"threshold", 0.01},
                      {"pass", err < 0.01}});
  }
  res.report["checks"] = checks;
  res.report["window"] = width;
  res.pass = pass;
  set_columns(res, {"x", "density_empirical", "density_profile"}, {grid, emp, prof});
  return res;
}

ExperimentResult run_flux(const ExperimentConfig& c) {
  ExperimentResult res;
  res.report = base_report(c);
  const double p = c.p.value_or(0.5), t = *c.t;
  const int n = static_cast<int>(std::ceil(30 * t)) + 2;
  std::vector<double> est(c.replicates);
#pragma omp parallel for schedule(dynamic)
  for (int r = 0; r < c.replicates; ++r)
    est[r] = stationary_flux_estimate(p, n, t, derive_seed(c.seed, r));
  double mean = 0.0;
  for (double e : est) mean += e;
  mean /= c.replicates;
  const double target = flux(1.0 / (1.0 + p));
  const double rel = target > 0 ? std::abs(mean - target) / target : std::abs(mean);
  res.pass = target > 0 ? rel < 0.02 : std::abs(mean) < 1e-12;
  res.report["checks"] = json::array(
      {{{"check", "stationary_flux"}, {"value", mean}, {"target", target},
        {"relative_error", rel}, {"threshold", 0.02}, {"pass", res.pass}}});
  set_columns(res, {"flux_estimate"}, {est});
  return res;
}

ExperimentResult run_couplings(const ExperimentConfig& c) {
  ExperimentResult res;
  res.report = base_report(c);
  const long events = 10000;
  std::vector<double> idx(c.replicates), ok(c.replicates), checked(c.replicates),
      inj(c.replicates), arr_ok(c.replicates), arr_checked(c.replicates);
  std::vector<std::string> msg(c.replicates);
#pragma omp parallel for schedule(dynamic)
  for (int r = 0; r < c.replicates; ++r) {
    const std::uint64_t s = derive_seed(c.seed, r);
    FtasepOptions opt;
    opt.max_events = events;
    // 1e4 events happen before t ~ 400; 4000 particles keep the frozen one out of reach
    const int np = 4000;
    const auto tr = ftasep_simulate(c.alpha, step_state(np, c.alpha),
                                    std::numeric_limits<double>::infinity(), s, np, opt);
    const auto rep = verify_coupling(tr);
    idx[r] = r;
    ok[r] = rep.pass && tr.event_count == events;
    checked[r] = static_cast<double>(rep.events_checked);
    if (!rep.pass) msg[r] = rep.message;
    // half-line run long enough for at least 50 injections
    HalfLineTrajectory h;
    for (double hz = 200.0 / c.alpha;; hz *= 1.5) {
      h = halfline_tasep_simulate(c.alpha, hz, derive_seed(s, 1), 4000);
      if (h.injected() >= 50) break;
    }
    const auto grid = passage_times(weights_from_waiting_times(h));
    const auto a = arrival_identity_check(h, grid);
    inj[r] = h.injected();
    arr_ok[r] = a.pass && !h.truncated;
    arr_checked[r] = static_cast<double>(a.checked);
    if (!a.pass && msg[r].empty()) msg[r] = a.message;
  }
  bool pass = true;
  long total = 0, total_arr = 0;
  json fails = json::array();
  for (int r = 0; r < c.replicates; ++r) {
    pass = pass && ok[r] && arr_ok[r];
    total += static_cast<long>(checked[r]);
    total_arr += static_cast<long>(arr_checked[r]);
    if (!msg[r].empty()) fails.push_back({{"replicate", r}, {"message", msg[r]}});
  }
  res.pass = pass;
  res.report["checks"] = json::array(
      {{{"check", "coupling"}, {"events_checked", total}, {"pass", pass}},
       {{"check", "arrival_identity"}, {"pairs_checked", total_arr}, {"pass", pass}}});
  res.report["failures"] = fails;
  set_columns(res, {"replicate", "coupling_pass", "events_checked", "injected", "arrival_pass",
                    "pairs_checked"},
              {idx, ok, checked, inj, arr_ok, arr_checked});
  return res;
}

}  // namespace

std::vector<double> ftasep_first_samples(double alpha, double t, int replicates,
                                         std::uint64_t seed, ScaleForm form) {
  const auto pos = ftasep_positions(alpha, t, replicates, seed, {1});
  std::vector<double> x(replicates);
  for (int r = 0; r < replicates; ++r)
    x[r] = rescale_ftasep_first(pos[r][0] + lattice_jitter(seed, r, 0), t, alpha, form);
  return x;
}

double stationary_flux_estimate(double p, int n_particles, double t, std::uint64_t seed) {
  const ParticleState init = stationary_gap_init(p, n_particles + 1, derive_seed(seed, 0));
  FtasepOptions opt;
  opt.record = false;
  const auto tr = ftasep_simulate(1.0, init, t, derive_seed(seed, 1), n_particles, opt);
  // central window of a third of the occupied span
  const long top = init.x.front(), bottom = init.x[n_particles - 1];
  const long span = top - bottom;
  const long lo = bottom + span / 3, hi = bottom + 2 * span / 3;
  double crossings = 0.0;
  for (int i = 0; i < n_particles; ++i) {
    const long a = std::max(init.x[i], lo), b = std::min(tr.final_state.x[i], hi);
    if (b > a) crossings += static_cast<double>(b - a);
  }
  return crossings / (t * static_cast<double>(hi - lo));
}

double gue_edge_mc(double s, long samples, std::uint64_t seed, long n, int block) {
  if (block <= 0) block = static_cast<int>(std::min<long>(n, std::lround(10 * std::cbrt(n))));
  const double theta = 2 * std::sqrt(static_cast<double>(n)) + s / std::pow(n, 1.0 / 6.0);
  long below = 0;
#pragma omp parallel for schedule(static) reduction(+ : below)
  for (long k = 0; k < samples; ++k) {
    Rng rng(derive_seed(seed, static_cast<std::uint64_t>(k)));
    std::normal_distribution<double> z;
    // T = tridiag(a_i ~ N(0,1), b_i^2 ~ Gamma(n - i, 1)); all pivots negative <=> lambda_max < theta
    double d = z(rng) - theta;
    bool all_negative = d < 0;
    for (int i = 1; i < block && all_negative; ++i) {
      std::gamma_distribution<double> g(static_cast<double>(n - i), 1.0);
      const double b2 = g(rng);
      d = z(rng) - theta - b2 / d;
      all_negative = d < 0;
    }
    if (all_negative) ++below;
  }
  return static_cast<double>(below) / samples;
}

ExperimentResult run_experiment(const ExperimentConfig& c) {
  validate_config(c);
  const std::string& t = c.tag;
  if (t == "thm1.1" || t == "thm1.3") return run_first_particle(c);
  if (t == "thm1.2") return run_bulk(c);
  if (t == "thm1.4" || t == "thm1.5") return run_ftasep_cross(c);
  if (lpp_tag(t)) return run_lpp(c);
  if (t == "density") return run_density(c);
  if (t == "flux") return run_flux(c);
  return run_couplings(c);
}

void write_experiment(const ExperimentConfig& c, const ExperimentResult& r) {
  if (c.out.empty()) return;
  std::filesystem::create_directories(c.out);
  {
    std::ofstream f(std::filesystem::path(c.out) / "samples.csv");
    if (!f) throw std::runtime_error("cannot write samples.csv");
    for (size_t k = 0; k < r.columns.size(); ++k) f << (k ? "," : "") << r.columns[k];
    f << '\n' << std::setprecision(12);
    for (const auto& row : r.rows) {
      for (size_t k = 0; k < row.size(); ++k) f << (k ? "," : "") << row[k];
      f << '\n';
    }
  }
  json rep = r.report;
  rep["pass"] = r.pass;
  std::ofstream f(std::filesystem::path(c.out) / "report.json");
  if (!f) throw std::runtime_error("cannot write report.json");
  f << rep.dump(2) << '\n';
}

}  // namespace kpz
