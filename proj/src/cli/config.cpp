#include "landscape/cli/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>

#include <fmt/format.h>
#include <yaml-cpp/yaml.h>

#include "landscape/errors.hpp"

namespace landscape::cli {

const std::vector<std::string>& subcommands() {
  static const std::vector<std::string> names{
      "solve-landscape", "green-decay",    "lambda-scaling", "covariance", "vertical-derivative",
      "eta-convergence", "energy-check",   "agmon-check",    "rank-one-check", "fpp-kesten",
      "cluster-tail",    "anchor-1d",      "selftest"};
  return names;
}

bool is_subcommand(const std::string& name) {
  const auto& s = subcommands();
  return std::find(s.begin(), s.end(), name) != s.end();
}

DisorderLaw LawSpec::build() const {
  DisorderLaw law = [&] {
    if (kind == "bernoulli") return DisorderLaw::bernoulli(q);
    if (kind == "uniform01") return DisorderLaw::uniform01();
    if (kind == "discrete_atoms") return DisorderLaw::discrete_atoms(values, probs);
    throw ValidationError("field 'law.kind': unknown law '" + kind + "'");
  }();
  try {
    law.validate();
  } catch (const ValidationError& e) {
    throw ValidationError(std::string("field 'law': ") + e.what());
  }
  return law;
}

const std::map<std::string, double>& known_tolerances() {
  static const std::map<std::string, double> t{
      {"r_squared_min", 0.9},        // green-decay fit quality
      {"domination_factor", 2.0},    // multiples of solver_tol
      {"rank_one_rel", 1e-6},
      {"symmetry_rel", 1e-8},
      {"oracle_rel", 1e-8},
      {"representation_rel", 1e-8},
      {"eta_ratio_lo", 5.0},
      {"eta_ratio_hi", 20.0},
      {"energy_sigma", 3.0},
      {"cov_ratio", 0.1},
      {"cov_sigma", 3.0},
      {"small_lambda_ratio_lo", 1.4},
      {"small_lambda_ratio_hi", 2.8},
      {"large_lambda_ratio_lo", 0.7},
      {"large_lambda_ratio_hi", 1.4},
      {"reference_rate", 0.0},       // vertical-derivative: compare to this rate when > 0
      {"reference_factor", 2.0},
  };
  return t;
}

Boundary ExperimentConfig::boundary() const {
  try {
    return boundary_from_string(bc);
  } catch (const ValidationError&) {
    throw ValidationError("field 'bc': expected dirichlet or periodic, got '" + bc + "'");
  }
}

SolverOptions ExperimentConfig::solver() const {
  SolverOptions o;
  o.tol = solver_tol;
  o.max_iter = solver_max_iter;
  if (preconditioner == "automatic")
    o.preconditioner = Preconditioner::automatic;
  else if (preconditioner == "line")
    o.preconditioner = Preconditioner::line;
  else if (preconditioner == "multigrid")
    o.preconditioner = Preconditioner::multigrid;
  else if (preconditioner == "jacobi")
    o.preconditioner = Preconditioner::jacobi;
  else
    throw ValidationError("field 'preconditioner': expected automatic, line, multigrid or jacobi");
  o.execution = Execution::parallel;
  return o;
}

double ExperimentConfig::tolerance(const std::string& name) const {
  const auto& known = known_tolerances();
  const auto def = known.find(name);
  if (def == known.end()) throw ValidationError("unknown tolerance '" + name + "'");
  const auto it = tolerances.find(name);
  return it == tolerances.end() ? def->second : it->second;
}

ExperimentParams ExperimentConfig::experiment_params() const {
  ExperimentParams p;
  p.dim = d;
  p.cells = L;
  p.mesh = m;
  p.bc = boundary();
  p.law = law.build();
  p.lambda = lambda.front();
  p.eta = eta.front();
  p.p = this->p.front();
  p.samples = N_samples;
  p.seed = master_seed;
  p.workers = workers;
  p.margin = margin;
  p.bootstrap_resamples = bootstrap_resamples;
  p.binning = binning == "dyadic" ? Binning::dyadic : Binning::linear;
  p.solver = solver();
  return p;
}

namespace {

[[noreturn]] void field_error(const std::string& field, const std::string& msg) {
  throw ValidationError(fmt::format("field '{}': {}", field, msg));
}

template <class T>
void require_nonempty(const std::string& field, const std::vector<T>& v) {
  if (v.empty()) field_error(field, "list must not be empty");
}

}  // namespace

void ExperimentConfig::validate(const std::string& subcommand) const {
  if (!is_subcommand(subcommand)) throw ValidationError("unknown subcommand '" + subcommand + "'");
  if (d < 1 || d > 3) field_error("d", "must be 1, 2 or 3");
  if (L < 4) field_error("L", "must be >= 4");
  if (m < 1) field_error("m", "must be >= 1");
  (void)boundary();
  (void)law.build();
  (void)solver();
  if (N_samples < 1) field_error("N_samples", "must be >= 1");
  if (workers < 1) field_error("workers", "must be >= 1");
  if (output_dir.empty()) field_error("output_dir", "must not be empty");
  if (bootstrap_resamples < 0) field_error("bootstrap_resamples", "must be >= 0");
  if (binning != "linear" && binning != "dyadic") field_error("binning", "expected linear or dyadic");
  if (!(solver_tol > 0.0 && solver_tol < 1.0)) field_error("solver_tol", "must lie in (0, 1)");
  if (solver_max_iter < 0) field_error("solver_max_iter", "must be >= 0");
  require_nonempty("lambda", lambda);
  require_nonempty("eta", eta);
  require_nonempty("p", p);
  for (double x : lambda)
    if (!(x >= 0.0 && std::isfinite(x))) field_error("lambda", "values must be finite and >= 0");
  for (double x : eta)
    if (!(x >= 0.0 && std::isfinite(x))) field_error("eta", "values must be finite and >= 0");
  for (double x : p)
    if (!(x >= 1.0)) field_error("p", "moment orders must be >= 1");
  if (margin < 0 || 2 * margin >= L) field_error("margin", "must satisfy 0 <= 2 margin < L");
  for (const auto& [name, value] : tolerances) {
    if (!known_tolerances().count(name)) field_error("tolerances." + name, "unknown tolerance");
    if (!std::isfinite(value)) field_error("tolerances." + name, "must be finite");
  }
  for (const auto& o : observables) {
    try {
      (void)observable_from_string(o);
    } catch (const ValidationError&) {
      field_error("observables", "unknown observable '" + o + "'");
    }
  }

  const bool needs_mesh = subcommand != "fpp-kesten" && subcommand != "cluster-tail" && subcommand != "anchor-1d";
  if (needs_mesh && subcommand != "selftest") {
    if (m < kMinBumpMesh) field_error("m", fmt::format("must be >= {} to resolve the bump", kMinBumpMesh));
    if (boundary() == Boundary::periodic)
      for (double x : eta)
        if (!(x > 0.0)) field_error("eta", "periodic runs need eta > 0");
    try {
      (void)Grid(d, L, m, boundary());
    } catch (const ValidationError& e) {
      field_error("L", e.what());
    }
  }

  if (subcommand == "green-decay" || subcommand == "covariance" || subcommand == "vertical-derivative" ||
      subcommand == "lambda-scaling") {
    if (boundary() == Boundary::dirichlet && margin < 5) field_error("margin", "Dirichlet windows need margin >= 5");
    if (!(fit_r_min < fit_r_max)) field_error("fit_r_min", "must be < fit_r_max");
  }
  if (subcommand == "lambda-scaling")
    for (double x : lambda)
      if (!(x > 0.0)) field_error("lambda", "lambda-scaling needs lambda > 0");
  if (subcommand == "covariance") {
    require_nonempty("separations", separations);
    if (separation_sampling != "axis" && separation_sampling != "shell")
      field_error("separation_sampling", "expected axis or shell");
    require_nonempty("observables", observables);
  }
  if (subcommand == "vertical-derivative") {
    require_nonempty("z_offsets", z_offsets);
    for (std::size_t i = 1; i < z_offsets.size(); ++i)
      if (z_offsets[i] <= z_offsets[i - 1]) field_error("z_offsets", "must be strictly increasing");
  }
  if (subcommand == "eta-convergence") {
    if (eta.size() < 3) field_error("eta", "eta-convergence needs at least three values");
    for (std::size_t i = 1; i < eta.size(); ++i)
      if (!(eta[i] < eta[i - 1])) field_error("eta", "values must be strictly decreasing");
  }
  if (subcommand == "energy-check" && boundary() != Boundary::periodic)
    field_error("bc", "energy-check requires periodic boundary conditions");
  if (subcommand == "agmon-check") {
    require_nonempty("agmon_mu_factors", agmon_mu_factors);
    for (double f : agmon_mu_factors)
      if (!(f >= 0.0)) field_error("agmon_mu_factors", "must be >= 0");
    if (agmon_cutoff_inner < 0.5) field_error("agmon_cutoff_inner", "must be >= 1/2");
    if (agmon_cutoff_outer < agmon_cutoff_inner) field_error("agmon_cutoff_outer", "must be >= agmon_cutoff_inner");
    if (!(agmon_cutoff_outer < L / 2)) field_error("agmon_cutoff_outer", "must be < L/2");
  }
  if (subcommand == "fpp-kesten" || subcommand == "cluster-tail") {
    if (coarse_cells < 4) field_error("coarse_cells", "must be >= 4");
    if (k < 0) field_error("k", "must be >= 0");
    if (gamma < 0.0) field_error("gamma", "must be >= 0 (0 selects the upper quartile)");
  }
  if (subcommand == "fpp-kesten") {
    require_nonempty("radii", radii);
    for (std::size_t i = 1; i < radii.size(); ++i)
      if (radii[i] <= radii[i - 1]) field_error("radii", "must be increasing");
    if (c_probe != 0.0 && !(c_probe > 0.0 && c_probe < 1.0)) field_error("c_probe", "must lie in (0, 1)");
  }
  if (subcommand == "cluster-tail" && (n_min < 0 || n_max <= n_min)) field_error("n_min", "need 0 <= n_min < n_max");
  if (subcommand == "anchor-1d") {
    if (d != 1) field_error("d", "anchor-1d needs d = 1");
    if (gamma < 0.0) field_error("gamma", "must be >= 0 (0 selects the upper quartile)");
  }
}

// ---------------------------------------------------------------------------
// YAML

namespace {

template <class T>
T scalar(const YAML::Node& n, const std::string& field) {
  if (!n.IsScalar()) field_error(field, "expected a scalar");
  try {
    return n.as<T>();
  } catch (const YAML::Exception&) {
    field_error(field, "cannot parse '" + n.Scalar() + "'");
  }
}

// Accepts a sequence or a single scalar.
template <class T>
std::vector<T> list(const YAML::Node& n, const std::string& field) {
  std::vector<T> out;
  if (n.IsScalar()) {
    out.push_back(scalar<T>(n, field));
  } else if (n.IsSequence()) {
    for (const auto& item : n) out.push_back(scalar<T>(item, field));
  } else if (!n.IsNull()) {
    field_error(field, "expected a list");
  }
  return out;
}

std::string num(double x) { return fmt::format("{:.17g}", x); }

std::string quoted(const std::string& s) {
  YAML::Emitter e;
  e << YAML::DoubleQuoted << s;
  return e.c_str();
}

template <class T>
std::string seq(const std::vector<T>& v) {
  std::string s = "[";
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) s += ", ";
    if constexpr (std::is_floating_point_v<T>)
      s += num(v[i]);
    else if constexpr (std::is_same_v<T, std::string>)
      s += quoted(v[i]);
    else
      s += fmt::format("{}", v[i]);
  }
  return s + "]";
}

struct Field {
  std::function<void(const YAML::Node&, ExperimentConfig&)> read;
  std::function<std::string(const ExperimentConfig&)> write;  // YAML value text
};

#define LS_SCALAR(name, type)                                                                   \
  {                                                                                            \
    #name, Field {                                                                             \
      [](const YAML::Node& n, ExperimentConfig& c) { c.name = scalar<type>(n, #name); },       \
          [](const ExperimentConfig& c) -> std::string {                                       \
            if constexpr (std::is_floating_point_v<type>)                                      \
              return num(c.name);                                                              \
            else                                                                               \
              return fmt::format("{}", c.name);                                                \
          }                                                                                    \
    }                                                                                          \
  }

#define LS_LIST(name, type)                                                                    \
  {                                                                                            \
    #name, Field {                                                                             \
      [](const YAML::Node& n, ExperimentConfig& c) { c.name = list<type>(n, #name); },         \
          [](const ExperimentConfig& c) -> std::string { return seq(c.name); }                 \
    }                                                                                          \
  }


const std::vector<std::pair<std::string, Field>>& fields() {
  static const std::vector<std::pair<std::string, Field>> f{
      {"experiment", Field{[](const YAML::Node& n, ExperimentConfig& c) { c.experiment = scalar<std::string>(n, "experiment"); },
                           [](const ExperimentConfig& c) { return quoted(c.experiment); }}},
      LS_SCALAR(d, int),
      LS_SCALAR(L, int),
      LS_SCALAR(m, int),
      {"bc", Field{[](const YAML::Node& n, ExperimentConfig& c) { c.bc = scalar<std::string>(n, "bc"); },
                   [](const ExperimentConfig& c) { return quoted(c.bc); }}},
      {"law", Field{[](const YAML::Node& n, ExperimentConfig& c) {
                      if (!n.IsMap()) field_error("law", "expected a map with key 'kind'");
                      LawSpec s;
                      s.kind.clear();
                      for (const auto& kv : n) {
                        const auto key = kv.first.as<std::string>();
                        if (key == "kind")
                          s.kind = scalar<std::string>(kv.second, "law.kind");
                        else if (key == "q")
                          s.q = scalar<double>(kv.second, "law.q");
                        else if (key == "values")
                          s.values = list<double>(kv.second, "law.values");
                        else if (key == "probs")
                          s.probs = list<double>(kv.second, "law.probs");
                        else
                          field_error("law." + key, "unknown key");
                      }
                      if (s.kind.empty()) field_error("law.kind", "missing");
                      c.law = s;
                    },
                    [](const ExperimentConfig& c) {
                      return fmt::format("{{kind: {}, q: {}, values: {}, probs: {}}}", quoted(c.law.kind), num(c.law.q),
                                         seq(c.law.values), seq(c.law.probs));
                    }}},
      LS_LIST(lambda, double),
      LS_LIST(eta, double),
      LS_LIST(p, double),
      LS_SCALAR(N_samples, int),
      LS_SCALAR(master_seed, std::uint64_t),
      {"output_dir", Field{[](const YAML::Node& n, ExperimentConfig& c) { c.output_dir = scalar<std::string>(n, "output_dir"); },
                           [](const ExperimentConfig& c) { return quoted(c.output_dir); }}},
      LS_SCALAR(workers, int),
      LS_SCALAR(margin, int),
      LS_SCALAR(bootstrap_resamples, int),
      {"binning", Field{[](const YAML::Node& n, ExperimentConfig& c) { c.binning = scalar<std::string>(n, "binning"); },
                        [](const ExperimentConfig& c) { return quoted(c.binning); }}},
      LS_SCALAR(solver_tol, double),
      LS_SCALAR(solver_max_iter, int),
      {"preconditioner",
       Field{[](const YAML::Node& n, ExperimentConfig& c) { c.preconditioner = scalar<std::string>(n, "preconditioner"); },
             [](const ExperimentConfig& c) { return quoted(c.preconditioner); }}},
      LS_SCALAR(fit_r_min, double),
      LS_SCALAR(fit_r_max, double),
      LS_LIST(separations, int),
      {"separation_sampling",
       Field{[](const YAML::Node& n, ExperimentConfig& c) {
               c.separation_sampling = scalar<std::string>(n, "separation_sampling");
             },
             [](const ExperimentConfig& c) { return quoted(c.separation_sampling); }}},
      LS_LIST(observables, std::string),
      LS_LIST(z_offsets, int),
      LS_LIST(agmon_mu_factors, double),
      LS_SCALAR(agmon_cutoff_inner, double),
      LS_SCALAR(agmon_cutoff_outer, double),
      LS_SCALAR(gamma, double),
      LS_SCALAR(k, int),
      LS_SCALAR(coarse_cells, int),
      LS_LIST(radii, int),
      LS_SCALAR(c_probe, double),
      LS_SCALAR(n_min, int),
      LS_SCALAR(n_max, int),
      {"tolerances", Field{[](const YAML::Node& n, ExperimentConfig& c) {
                             if (n.IsNull()) return;
                             if (!n.IsMap()) field_error("tolerances", "expected a map");
                             c.tolerances.clear();
                             for (const auto& kv : n) {
                               const auto key = kv.first.as<std::string>();
                               if (!known_tolerances().count(key)) field_error("tolerances." + key, "unknown tolerance");
                               c.tolerances[key] = scalar<double>(kv.second, "tolerances." + key);
                             }
                           },
                           [](const ExperimentConfig& c) {
                             std::string s = "{";
                             bool first = true;
                             for (const auto& [k, v] : c.tolerances) {
                               s += fmt::format("{}{}: {}", first ? "" : ", ", k, num(v));
                               first = false;
                             }
                             return s + "}";
                           }}},
  };
  return f;
}

#undef LS_SCALAR
#undef LS_LIST

}  // namespace

ExperimentConfig parse_config(const std::string& yaml_text) {
  YAML::Node root;
  try {
    root = YAML::Load(yaml_text);
  } catch (const YAML::Exception& e) {
    throw ValidationError(std::string("config is not valid YAML: ") + e.what());
  }
  ExperimentConfig c;
  if (root.IsNull()) return c;
  if (!root.IsMap()) throw ValidationError("config must be a key-value map");
  std::set<std::string> seen;
  for (const auto& kv : root) {
    const auto key = kv.first.as<std::string>();
    const auto& table = fields();
    const auto it = std::find_if(table.begin(), table.end(), [&](const auto& f) { return f.first == key; });
    if (it == table.end()) field_error(key, "unknown key");
    if (!seen.insert(key).second) field_error(key, "duplicate key");
    it->second.read(kv.second, c);
  }
  return c;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot read config file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string to_yaml(const ExperimentConfig& c) {
  std::string out;
  for (const auto& [name, field] : fields()) out += name + ": " + field.write(c) + "\n";
  return out;
}

}  // namespace landscape::cli
