#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "landscape/disorder.hpp"
#include "landscape/grid.hpp"
#include "landscape/percolation.hpp"
#include "landscape/solver.hpp"
#include "landscape/statistics.hpp"

namespace landscape::cli {

// Every subcommand the runner accepts.
const std::vector<std::string>& subcommands();
bool is_subcommand(const std::string& name);

// Law serialized as {kind, q} / {kind} / {kind, values, probs}.
struct LawSpec {
  std::string kind = "bernoulli";
  double q = 0.5;
  std::vector<double> values;
  std::vector<double> probs;

  DisorderLaw build() const;
  friend bool operator==(const LawSpec&, const LawSpec&) = default;
};

// Flat experiment description. Fields unused by a subcommand keep defaults.
struct ExperimentConfig {
  std::string experiment = "green-decay";
  int d = 1;
  int L = 128;
  int m = 20;
  std::string bc = "dirichlet";
  LawSpec law;
  std::vector<double> lambda{1.0};
  std::vector<double> eta{1e-6};
  std::vector<double> p{1.0};
  int N_samples = 200;
  std::uint64_t master_seed = 1;
  std::string output_dir = "out";
  int workers = 1;
  int margin = 5;
  int bootstrap_resamples = 200;
  std::string binning = "linear";
  double solver_tol = 1e-12;
  int solver_max_iter = 0;
  std::string preconditioner = "automatic";
  // green-decay / lambda-scaling / vertical-derivative fit window
  double fit_r_min = 5.0;
  double fit_r_max = 40.0;
  // covariance
  std::vector<int> separations{3, 30};
  std::string separation_sampling = "axis";
  std::vector<std::string> observables{"u", "inv_u", "grad_log_u"};
  // vertical-derivative
  std::vector<int> z_offsets;
  // agmon-check
  std::vector<double> agmon_mu_factors{0.0, 0.1};  // mu = factor * sqrt(lambda)
  double agmon_cutoff_inner = 1.0;
  double agmon_cutoff_outer = 7.0;
  // percolation
  double gamma = 0.0;  // 0: upper quartile of the law
  int k = 0;           // 0: choose_k
  int coarse_cells = 16;
  std::vector<int> radii{8, 16, 32};
  double c_probe = 0.0;
  int n_min = 2;
  int n_max = 10;
  // Named tolerance overrides; see known_tolerances().
  std::map<std::string, double> tolerances;

  friend bool operator==(const ExperimentConfig&, const ExperimentConfig&) = default;

  Boundary boundary() const;
  SolverOptions solver() const;
  // Tolerance by name, falling back to its default.
  double tolerance(const std::string& name) const;

  // Field-level validation for `subcommand`; throws ValidationError.
  void validate(const std::string& subcommand) const;

  ExperimentParams experiment_params() const;
};

// Default value of every recognized tolerance key.
const std::map<std::string, double>& known_tolerances();

// YAML parse; unknown keys and ill-typed values throw ValidationError.
ExperimentConfig parse_config(const std::string& yaml_text);
ExperimentConfig load_config(const std::string& path);
// YAML emission with 17 significant digits; parse_config(to_yaml(c)) == c.
std::string to_yaml(const ExperimentConfig& c);

}  // namespace landscape::cli
