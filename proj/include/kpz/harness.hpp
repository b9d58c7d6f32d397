#pragma once
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "kpz/distributions.hpp"
#include "kpz/fredholm.hpp"

namespace kpz {

// ---- rescalings of particle positions ----

// Fluctuation scale of the Gaussian (alpha < 1/2) and bulk rescalings.
// kLppMatched: sqrt((1-2a) a (1-a)) and 2^{-4/3} (1-r^2)^{2/3}, which match the LPP limits.
// kUnmatched: (1-2a)/sqrt(a(1-a)) and 2^{-4/3} (1+r)^{5/3} (1-r)^{-1/3}.
enum class ScaleForm { kLppMatched, kUnmatched };
double gaussian_scale(double alpha, ScaleForm form = ScaleForm::kLppMatched);
double bulk_scale(double r, ScaleForm form = ScaleForm::kLppMatched);

// (x1 - t/4) / (2^{-4/3} t^{1/3}) for alpha >= 1/2, Gaussian scaling below.
double rescale_ftasep_first(double x1, double t, double alpha,
                            ScaleForm form = ScaleForm::kLppMatched);
// Particle floor(r t) (at least 1).
int bulk_index(double t, double r);
double rescale_ftasep_bulk(double x, double t, double r, ScaleForm form = ScaleForm::kLppMatched);
// Particle floor(2^{1/3} eta t^{2/3}) (at least 1).
int cross_index(double t, double eta);
// literal = true drops the t^{1/3} factor of the eta^2 term.
double rescale_ftasep_cross(double x, double t, double eta, bool literal = false);
// (1 + 2^{4/3} varpi t^{-1/3}) / 2.
double crossover_alpha_ftasep(double t, double varpi);
// (1 + 2 sigma^{-1} varpi n^{-1/3}) / 2, sigma = 2^{4/3}.
double crossover_alpha_lpp(int n, double varpi);

// ---- empirical distributions ----

class EmpiricalCdf {
 public:
  explicit EmpiricalCdf(std::vector<double> samples);
  double operator()(double x) const;  // #{samples <= x} / M
  double below(double x) const;       // #{samples < x} / M
  size_t size() const { return s_.size(); }
  const std::vector<double>& samples() const { return s_; }

 private:
  std::vector<double> s_;
};

EmpiricalCdf empirical_cdf(std::vector<double> samples);
// Sup distance evaluated at the sample points, both one-sided limits.
double ks_distance(const EmpiricalCdf& e, const std::function<double(double)>& f);
double ks_distance(const EmpiricalCdf& a, const EmpiricalCdf& b);
// -x for every sample: turns P(X >= x) into the distribution function of -X at -x.
std::vector<double> negated(const std::vector<double>& v);

// ---- experiments ----

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ExperimentConfig {
  std::string tag;
  double alpha = 1.0;
  std::optional<double> r, kappa, varpi, p;
  std::vector<double> eta;
  std::optional<double> t;
  std::optional<int> n;
  int replicates = 0;
  std::uint64_t seed = 0;
  std::string out;           // output directory; empty = no files
  int nodes = 32;            // Nystrom nodes for the tabulated limit laws
  bool verify_mode = false;  // 96 nodes
  bool literal_eta_term = false;
  bool flip_orientation = false;  // compares P(X >= x) with F(x) instead of F(-x)
  bool unmatched_scale = false;     // ScaleForm::kUnmatched for the Gaussian and bulk tags
};

// Parses and validates the JSON config; throws ConfigError.
ExperimentConfig parse_config(const nlohmann::json& j);
void validate_config(const ExperimentConfig& c);

struct ExperimentResult {
  nlohmann::json report;
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
  bool pass = false;
};

ExperimentResult run_experiment(const ExperimentConfig& c);
// Writes samples.csv and report.json into c.out.
void write_experiment(const ExperimentConfig& c, const ExperimentResult& r);

// Rescaled first-particle samples of FTASEP(alpha) at time t, one per replicate.
std::vector<double> ftasep_first_samples(double alpha, double t, int replicates,
                                         std::uint64_t seed,
                                         ScaleForm form = ScaleForm::kLppMatched);

// Stationary flux at gap probability p, estimated from particle displacements in a central window.
double stationary_flux_estimate(double p, int n_particles, double t, std::uint64_t seed);

// Largest-eigenvalue law of GUE at the soft edge, P(lambda_max <= 2 sqrt(N) + N^{-1/6} s),
// by Sturm counts on the top block of the tridiagonal beta = 2 model.
double gue_edge_mc(double s, long samples, std::uint64_t seed, long n = 1000000, int block = 0);

}  // namespace kpz
