#pragma once

#include <cstdint>
#include <exception>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "landscape/disorder.hpp"
#include "landscape/errors.hpp"
#include "landscape/grid.hpp"
#include "landscape/solver.hpp"

namespace landscape {

struct DecayFit {
  double rate;           // -slope of log(value) against distance
  double log_prefactor;  // intercept
  double r_min;
  double r_max;
  double r_squared;
  int n_points;
  double rate_stderr;    // residual-based standard error of the slope
};

struct MomentCurve {
  std::vector<double> distances;  // strictly increasing bin centers, cell units
  std::vector<double> values;     // E[X^p]^{1/p} per bin
  std::vector<double> ci;         // 95% half-widths
  double p = 1.0;
};

enum class Observable { u, inv_u, grad_log_u };
std::string to_string(Observable o);
Observable observable_from_string(const std::string& name);

struct CovariancePoint {
  double separation;
  double cov;  // for grad_log_u: max over axes of |cov(component a, component a)|
  double ci;
  double stderr_;
  Observable observable;
};

enum class Binning { linear, dyadic };

// Shared Monte Carlo parameters. Sample s uses omega = sample_omega(law, box, seed, s).
struct ExperimentParams {
  int dim = 1;
  int cells = 128;
  int mesh = 20;
  Boundary bc = Boundary::dirichlet;
  DisorderLaw law = DisorderLaw::bernoulli(0.5);
  double lambda = 1.0;
  double eta = 1e-6;
  double p = 1.0;
  int samples = 200;
  std::uint64_t seed = 1;
  int workers = 1;
  int margin = 5;  // boundary cells excluded from every window
  int bootstrap_resamples = 200;
  Binning binning = Binning::linear;
  SolverOptions solver{1e-12, 0, Preconditioner::automatic, Execution::parallel};

  Grid grid() const { return Grid(dim, cells, mesh, bc); }
  void validate() const;
};

// Weighted least squares of log(value) on distance over bins with
// r_min <= r <= r_max and value > floor. Weights 1/(ci/value)^2, with zero
// half-widths clamped to the smallest positive one.
DecayFit fit_exponential_decay(const MomentCurve& curve, double r_min, double r_max, double floor);

// Fraction of samples a run may lose to solver failures before it is an error.
inline constexpr double kMaxSkipFraction = 0.05;

struct SampleLog {
  std::vector<std::uint64_t> skipped;  // sample indices lost to solver failures
};

// Runs task(s) for s in [0, n) on `workers` threads and returns results in
// sample order. SolverError skips the sample; any other exception is rethrown.
template <class R>
std::vector<std::optional<R>> run_samples(int n, int workers,
                                          const std::function<R(std::uint64_t)>& task,
                                          SampleLog& log) {
  std::vector<std::optional<R>> out(static_cast<std::size_t>(n));
  std::vector<std::exception_ptr> failures(static_cast<std::size_t>(n));
  std::vector<char> skipped(static_cast<std::size_t>(n), 0);
#pragma omp parallel for num_threads(workers > 0 ? workers : 1) schedule(dynamic, 1)
  for (int s = 0; s < n; ++s) {
    try {
      out[static_cast<std::size_t>(s)] = task(static_cast<std::uint64_t>(s));
    } catch (const SolverError&) {
      skipped[static_cast<std::size_t>(s)] = 1;
    } catch (...) {
      failures[static_cast<std::size_t>(s)] = std::current_exception();
    }
  }
  for (const auto& f : failures)
    if (f) std::rethrow_exception(f);
  for (int s = 0; s < n; ++s)
    if (skipped[static_cast<std::size_t>(s)]) log.skipped.push_back(static_cast<std::uint64_t>(s));
  if (static_cast<double>(log.skipped.size()) > kMaxSkipFraction * n)
    throw SolverError("more than 5% of the samples failed to solve", {});
  return out;
}

struct GreenDecayResult {
  MomentCurve curve;
  std::vector<std::vector<double>> per_sample;  // [sample][bin] mean of mass^p
  std::vector<std::uint64_t> used_samples;
  SampleLog log;
};

GreenDecayResult green_decay_experiment(const ExperimentParams& params);

struct LambdaRow {
  double lambda;
  double eta;
  GreenDecayResult result;
  DecayFit fit;
  double scaled_rate;  // rate / sqrt(lambda) for lambda <= 1, rate otherwise
};

struct FitWindow {
  double r_min = 5.0;
  double r_max = 40.0;
  double floor_rel = 1e-10;  // bins below floor_rel * max(value) are dropped
};

std::vector<LambdaRow> lambda_scaling_curve(const ExperimentParams& base,
                                            const std::vector<double>& lambdas,
                                            const FitWindow& window = {});

struct CovarianceResult {
  std::vector<CovariancePoint> points;              // observable-major, then separation
  std::vector<std::vector<double>> per_sample;      // [sample][column] raw observables
  std::vector<std::string> columns;
  SampleLog log;
};

// axis: y = x + s e_0. shell: every cell y with |y - x|_inf = s, covariances
// averaged over the shell.
enum class SeparationSampling { axis, shell };
std::string to_string(SeparationSampling s);
SeparationSampling separation_sampling_from_string(const std::string& name);

// x at the center node; y at cell centers s cells away for each separation s.
CovarianceResult covariance_experiment(const ExperimentParams& params,
                                       const std::vector<Observable>& observables,
                                       const std::vector<int>& separations,
                                       SeparationSampling sampling = SeparationSampling::axis);

struct VerticalDerivativeResult {
  MomentCurve curve;  // E[|delta_z u(x)|^2]^{1/2} against |z - x|
  std::vector<std::vector<double>> per_sample;  // [sample][offset] delta_z u(x)
  SampleLog log;
};

// delta_z u(x) = u(x) - u^z(x) with omega^z resampled at z = x_cell + r e_0.
VerticalDerivativeResult vertical_derivative_decay(const ExperimentParams& params,
                                                   const std::vector<int>& z_offsets);

}  // namespace landscape
