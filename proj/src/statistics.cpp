#include "landscape/statistics.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include <fmt/format.h>

#include "landscape/errors.hpp"
#include "landscape/green.hpp"
#include "landscape/landscape.hpp"
#include "landscape/sampling.hpp"

namespace landscape {

std::string to_string(Observable o) {
  switch (o) {
    case Observable::u:
      return "u";
    case Observable::inv_u:
      return "inv_u";
    case Observable::grad_log_u:
      return "grad_log_u";
  }
  return "?";
}

Observable observable_from_string(const std::string& name) {
  if (name == "u") return Observable::u;
  if (name == "inv_u") return Observable::inv_u;
  if (name == "grad_log_u") return Observable::grad_log_u;
  throw ValidationError("unknown observable '" + name + "'");
}

void ExperimentParams::validate() const {
  law.validate();
  (void)grid();
  if (cells < 4) throw ValidationError("experiments need L >= 4 cells per side");
  if (samples < 1) throw ValidationError("N_samples must be >= 1");
  if (workers < 1) throw ValidationError("workers must be >= 1");
  if (!(p >= 1.0)) throw ValidationError("moment order p must be >= 1");
  if (!(lambda >= 0.0)) throw ValidationError("lambda must be >= 0");
  if (!(eta >= 0.0)) throw ValidationError("eta must be >= 0");
  if (bc == Boundary::periodic && !(eta > 0.0)) throw ValidationError("periodic runs need eta > 0");
  if (margin < 0 || 2 * margin >= cells) throw ValidationError("margin leaves no interior cells");
  if (bootstrap_resamples < 0) throw ValidationError("bootstrap_resamples must be >= 0");
}

namespace {

void require_margin(const ExperimentParams& params) {
  if (params.bc == Boundary::dirichlet && params.margin < 5)
    throw ValidationError("Dirichlet windows must exclude a boundary margin of at least 5 cells");
}

HamiltonianSpec sample_hamiltonian(const ExperimentParams& params, const Grid& grid, std::uint64_t s) {
  const OmegaField omega = sample_omega(params.law, grid.cell_box(), params.seed, s);
  return HamiltonianSpec(assemble_potential(omega, BumpProfile{}, grid), params.lambda, params.eta);
}

// Within-sample kernels run single-threaded when samples run concurrently.
SolverOptions sample_solver(const ExperimentParams& params) {
  SolverOptions o = params.solver;
  if (params.workers > 1) o.execution = Execution::serial;
  return o;
}

std::uint64_t bootstrap_seed(const ExperimentParams& params) { return splitmix64(params.seed ^ 0xb007ULL); }

}  // namespace

DecayFit fit_exponential_decay(const MomentCurve& curve, double r_min, double r_max, double floor) {
  if (!(r_min < r_max)) throw ValidationError("fit window needs r_min < r_max");
  std::vector<double> x, y, sigma;
  for (std::size_t i = 0; i < curve.distances.size(); ++i) {
    const double r = curve.distances[i];
    const double v = curve.values[i];
    if (r < r_min || r > r_max || !(v > floor) || !(v > 0.0)) continue;
    x.push_back(r);
    y.push_back(std::log(v));
    sigma.push_back(i < curve.ci.size() ? curve.ci[i] / v : 0.0);
  }
  if (x.size() < 4)
    throw ValidationError(fmt::format("too few usable bins for a decay fit ({} < 4)", x.size()));
  double smallest = 0.0;
  for (double s : sigma)
    if (s > 0.0 && (smallest == 0.0 || s < smallest)) smallest = s;
  std::vector<double> w(x.size(), 1.0);
  if (smallest > 0.0)
    for (std::size_t i = 0; i < x.size(); ++i) {
      const double s = std::max(sigma[i], smallest);
      w[i] = 1.0 / (s * s);
    }
  double sw = 0.0, sx = 0.0, sy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sw += w[i];
    sx += w[i] * x[i];
    sy += w[i] * y[i];
  }
  const double xm = sx / sw, ym = sy / sw;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += w[i] * (x[i] - xm) * (x[i] - xm);
    sxy += w[i] * (x[i] - xm) * (y[i] - ym);
    syy += w[i] * (y[i] - ym) * (y[i] - ym);
  }
  const double slope = sxy / sxx;
  const double intercept = ym - slope * xm;
  double ss_res = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double e = y[i] - (intercept + slope * x[i]);
    ss_res += w[i] * e * e;
  }
  const double r2 = syy > 0.0 ? std::clamp(1.0 - ss_res / syy, 0.0, 1.0) : 1.0;
  const auto n = static_cast<double>(x.size());
  const double stderr_slope = std::sqrt(std::max(ss_res, 0.0) / (n - 2.0) / sxx);
  return {-slope, intercept, r_min, r_max, r2, static_cast<int>(x.size()), stderr_slope};
}

GreenDecayResult green_decay_experiment(const ExperimentParams& params) {
  params.validate();
  require_margin(params);
  const Grid grid = params.grid();
  const Box cells = grid.cell_box();
  const Index3 center = grid.center_cell();
  const std::size_t source = grid.center_node();

  // Window cells grouped into distance bins.
  std::map<int, std::vector<std::size_t>> groups;
  std::map<int, double> bin_distance_sum;
  for (const auto& z : interior_cells(grid, params.margin)) {
    const int r = linf_distance(z, center, grid.dim());
    int key = r;
    if (params.binning == Binning::dyadic) key = r == 0 ? 0 : 1 + static_cast<int>(std::floor(std::log2(r)));
    groups[key].push_back(cells.linear(z));
    bin_distance_sum[key] += r;
  }
  std::vector<std::vector<std::size_t>> bins;
  MomentCurve curve;
  curve.p = params.p;
  for (auto& [key, members] : groups) {
    curve.distances.push_back(bin_distance_sum[key] / static_cast<double>(members.size()));
    bins.push_back(std::move(members));
  }

  const SolverOptions opts = sample_solver(params);
  const double p = params.p;
  std::function<std::vector<double>(std::uint64_t)> task = [&](std::uint64_t s) {
    const HamiltonianSpec H = sample_hamiltonian(params, grid, s);
    const GreenColumn G = green_column(H, source, opts);
    const auto masses = cell_masses(G.field);
    std::vector<double> row(bins.size());
    for (std::size_t b = 0; b < bins.size(); ++b) {
      double acc = 0.0;
      for (auto c : bins[b]) acc += std::pow(std::max(masses[c], 0.0), p);
      row[b] = acc / static_cast<double>(bins[b].size());
    }
    return row;
  };

  GreenDecayResult result;
  auto rows = run_samples(params.samples, params.workers, task, result.log);
  for (std::size_t s = 0; s < rows.size(); ++s)
    if (rows[s]) {
      result.per_sample.push_back(std::move(*rows[s]));
      result.used_samples.push_back(s);
    }

  const std::size_t n = result.per_sample.size();
  for (std::size_t b = 0; b < bins.size(); ++b) {
    auto stat = [&](std::span<const std::size_t> idx) {
      double m = 0.0;
      for (auto i : idx) m += result.per_sample[i][b];
      return std::pow(m / static_cast<double>(idx.size()), 1.0 / p);
    };
    const auto bs = bootstrap(n, stat, bootstrap_seed(params), params.bootstrap_resamples);
    curve.values.push_back(bs.estimate);
    curve.ci.push_back(bs.ci);
  }
  result.curve = std::move(curve);
  return result;
}

std::vector<LambdaRow> lambda_scaling_curve(const ExperimentParams& base,
                                            const std::vector<double>& lambdas,
                                            const FitWindow& window) {
  if (lambdas.empty()) throw ValidationError("lambda list is empty");
  std::vector<LambdaRow> rows;
  for (double lambda : lambdas) {
    if (!(lambda > 0.0)) throw ValidationError("lambda-scaling needs lambda > 0");
    ExperimentParams params = base;
    params.lambda = lambda;
    params.eta = std::min(1e-6, lambda * 1e-3);
    auto result = green_decay_experiment(params);
    const double vmax = *std::max_element(result.curve.values.begin(), result.curve.values.end());
    const DecayFit fit =
        fit_exponential_decay(result.curve, window.r_min, window.r_max, window.floor_rel * vmax);
    const double scaled = lambda <= 1.0 ? fit.rate / std::sqrt(lambda) : fit.rate;
    rows.push_back({lambda, params.eta, std::move(result), fit, scaled});
  }
  return rows;
}

std::string to_string(SeparationSampling s) { return s == SeparationSampling::axis ? "axis" : "shell"; }

SeparationSampling separation_sampling_from_string(const std::string& name) {
  if (name == "axis") return SeparationSampling::axis;
  if (name == "shell") return SeparationSampling::shell;
  throw ValidationError("unknown separation sampling '" + name + "'");
}

CovarianceResult covariance_experiment(const ExperimentParams& params,
                                       const std::vector<Observable>& observables,
                                       const std::vector<int>& separations, SeparationSampling sampling) {
  params.validate();
  require_margin(params);
  if (observables.empty() || separations.empty())
    throw ValidationError("covariance needs observables and separations");
  const Grid grid = params.grid();
  const Index3 center = grid.center_cell();
  const std::size_t x_node = grid.center_node();
  const int dim = grid.dim();
  auto inside = [&](const Index3& y) {
    for (int a = 0; a < dim; ++a)
      if (y[a] < params.margin || y[a] >= grid.cells() - params.margin) return false;
    return true;
  };
  // y nodes per separation, in cell-box order for shells.
  std::vector<std::vector<std::size_t>> y_nodes;
  for (int s : separations) {
    std::vector<std::size_t> nodes;
    if (s < 0) throw ValidationError(fmt::format("separation {} is negative", s));
    if (sampling == SeparationSampling::axis) {
      Index3 y = center;
      y[0] += s;
      if (!inside(y))
        throw ValidationError(fmt::format("separation {} leaves the {}-cell interior window", s, params.margin));
      nodes.push_back(grid.cell_center_node(y));
    } else {
      const Box cells = grid.cell_box();
      for (std::size_t c = 0; c < cells.size(); ++c) {
        const Index3 y = cells.site(c);
        if (linf_distance(y, center, dim) != s) continue;
        if (!inside(y))
          throw ValidationError(fmt::format("shell {} leaves the {}-cell interior window", s, params.margin));
        nodes.push_back(grid.cell_center_node(y));
      }
    }
    y_nodes.push_back(std::move(nodes));
  }

  // Column layout: per observable (and axis), x value followed by the y values.
  CovarianceResult result;
  struct Block {
    Observable obs;
    int axis;
    std::size_t offset;
    std::vector<std::vector<std::size_t>> y_columns;  // per separation
  };
  std::vector<Block> blocks;
  for (Observable o : observables) {
    const int axes = o == Observable::grad_log_u ? dim : 1;
    for (int a = 0; a < axes; ++a) {
      Block b{o, a, result.columns.size(), {}};
      const std::string base = o == Observable::grad_log_u ? fmt::format("grad_log_u_{}", a) : to_string(o);
      result.columns.push_back(base + "_x");
      for (std::size_t k = 0; k < separations.size(); ++k) {
        std::vector<std::size_t> cols;
        for (std::size_t j = 0; j < y_nodes[k].size(); ++j) {
          cols.push_back(result.columns.size());
          result.columns.push_back(sampling == SeparationSampling::axis
                                       ? fmt::format("{}_y{}", base, separations[k])
                                       : fmt::format("{}_y{}_{}", base, separations[k], j));
        }
        b.y_columns.push_back(std::move(cols));
      }
      blocks.push_back(std::move(b));
    }
  }

  const SolverOptions opts = sample_solver(params);
  std::function<std::vector<double>(std::uint64_t)> task = [&](std::uint64_t s) {
    const LandscapeSolution sol = solve_landscape(sample_hamiltonian(params, grid, s), opts);
    const DerivedFields derived = derived_fields(sol);
    std::vector<double> row;
    row.reserve(result.columns.size());
    for (const auto& b : blocks) {
      const ScalarField& f = b.obs == Observable::u       ? sol.u
                             : b.obs == Observable::inv_u ? derived.inv_u
                                                          : derived.grad_log_u[static_cast<std::size_t>(b.axis)];
      row.push_back(f[x_node]);
      for (const auto& nodes : y_nodes)
        for (auto y : nodes) row.push_back(f[y]);
    }
    return row;
  };
  auto rows = run_samples(params.samples, params.workers, task, result.log);
  for (auto& r : rows)
    if (r) result.per_sample.push_back(std::move(*r));

  const auto& data = result.per_sample;
  auto cov = [&](std::span<const std::size_t> idx, std::size_t cx, std::size_t cy) {
    if (idx.size() < 2) return 0.0;
    double mx = 0.0, my = 0.0;
    for (auto i : idx) {
      mx += data[i][cx];
      my += data[i][cy];
    }
    mx /= static_cast<double>(idx.size());
    my /= static_cast<double>(idx.size());
    double c = 0.0;
    for (auto i : idx) c += (data[i][cx] - mx) * (data[i][cy] - my);
    return c / static_cast<double>(idx.size() - 1);
  };
  auto shell_cov = [&](std::span<const std::size_t> idx, const Block& b, std::size_t k) {
    double total = 0.0;
    for (auto col : b.y_columns[k]) total += cov(idx, b.offset, col);
    return total / static_cast<double>(b.y_columns[k].size());
  };

  for (Observable o : observables) {
    for (std::size_t k = 0; k < separations.size(); ++k) {
      auto stat = [&](std::span<const std::size_t> idx) {
        if (o != Observable::grad_log_u) {
          const auto& b = *std::find_if(blocks.begin(), blocks.end(), [&](const Block& bl) { return bl.obs == o; });
          return shell_cov(idx, b, k);
        }
        double worst = 0.0;
        for (const auto& b : blocks)
          if (b.obs == o) worst = std::max(worst, std::abs(shell_cov(idx, b, k)));
        return worst;
      };
      const auto bs = bootstrap(data.size(), stat, bootstrap_seed(params), params.bootstrap_resamples);
      result.points.push_back({static_cast<double>(separations[k]), bs.estimate, bs.ci, bs.stderr_, o});
    }
  }
  return result;
}

VerticalDerivativeResult vertical_derivative_decay(const ExperimentParams& params,
                                                   const std::vector<int>& z_offsets) {
  params.validate();
  require_margin(params);
  if (z_offsets.empty()) throw ValidationError("no z offsets");
  for (std::size_t i = 1; i < z_offsets.size(); ++i)
    if (!(z_offsets[i] > z_offsets[i - 1])) throw ValidationError("z offsets must be strictly increasing");
  const Grid grid = params.grid();
  const Index3 center = grid.center_cell();
  const std::size_t x_node = grid.center_node();
  std::vector<Index3> sites;
  for (int r : z_offsets) {
    Index3 z = center;
    z[0] += r;
    if (r < 0 || !grid.cell_box().contains(z)) throw ValidationError(fmt::format("offset {} leaves the box", r));
    sites.push_back(z);
  }

  const SolverOptions opts = sample_solver(params);
  const ScalarField ones(grid, 1.0);
  std::function<std::vector<double>(std::uint64_t)> task = [&](std::uint64_t s) {
    const OmegaField omega = sample_omega(params.law, grid.cell_box(), params.seed, s);
    const HamiltonianSpec H(assemble_potential(omega, BumpProfile{}, grid), params.lambda, params.eta);
    const LandscapeSolution sol = solve_landscape(H, opts);
    std::vector<double> row(sites.size(), 0.0);
    for (std::size_t k = 0; k < sites.size(); ++k) {
      const OmegaField resampled = resample_site(omega, sites[k], static_cast<std::uint64_t>(z_offsets[k]));
      if (resampled.at(sites[k]) == omega.at(sites[k])) continue;
      const HamiltonianSpec Hz = H.with_potential(assemble_potential(resampled, BumpProfile{}, grid));
      const auto uz = cg_solve_detailed(Hz, ones, opts, &sol.u).solution;
      row[k] = sol.u[x_node] - uz[x_node];
    }
    return row;
  };

  VerticalDerivativeResult result;
  auto rows = run_samples(params.samples, params.workers, task, result.log);
  for (auto& r : rows)
    if (r) result.per_sample.push_back(std::move(*r));

  result.curve.p = 2.0;
  for (std::size_t k = 0; k < sites.size(); ++k) {
    auto stat = [&](std::span<const std::size_t> idx) {
      double m = 0.0;
      for (auto i : idx) m += result.per_sample[i][k] * result.per_sample[i][k];
      return std::sqrt(m / static_cast<double>(idx.size()));
    };
    const auto bs = bootstrap(result.per_sample.size(), stat, bootstrap_seed(params), params.bootstrap_resamples);
    result.curve.distances.push_back(z_offsets[k]);
    result.curve.values.push_back(bs.estimate);
    result.curve.ci.push_back(bs.ci);
  }
  return result;
}

}  // namespace landscape
