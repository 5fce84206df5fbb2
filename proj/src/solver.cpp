#include "landscape/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>

#include <Eigen/Dense>
#include <fmt/format.h>

#include "landscape/errors.hpp"
#include "landscape/kernels.hpp"
#include "landscape/multigrid.hpp"

namespace landscape {

namespace {

void require_same_grid(const HamiltonianSpec& H, const ScalarField& f) {
  if (!(H.grid == f.grid)) throw ValidationError("field and operator live on different grids");
}

// Dispatch table so the solver body is written once for both kernel sets.
struct Kernels {
  decltype(&kernels::omp::apply) apply;
  decltype(&kernels::omp::dot) dot;
  decltype(&kernels::omp::axpy) axpy;
  decltype(&kernels::omp::xpby) xpby;
  decltype(&kernels::omp::jacobi) jacobi;
  decltype(&kernels::omp::factor_lines) factor_lines;
  decltype(&kernels::omp::line_solve) line_solve;
};

constexpr Kernels kSerial{kernels::serial::apply,  kernels::serial::dot,
                          kernels::serial::axpy,   kernels::serial::xpby,
                          kernels::serial::jacobi, kernels::serial::factor_lines,
                          kernels::serial::line_solve};
constexpr Kernels kParallel{kernels::omp::apply,  kernels::omp::dot,
                            kernels::omp::axpy,   kernels::omp::xpby,
                            kernels::omp::jacobi, kernels::omp::factor_lines,
                            kernels::omp::line_solve};

}  // namespace

ScalarField apply_hamiltonian(const HamiltonianSpec& H, const ScalarField& f, Execution exec) {
  require_same_grid(H, f);
  const auto stencil = kernels::Stencil::of(H.grid);
  const auto shift = H.shift();
  ScalarField out(H.grid);
  (exec == Execution::serial ? kSerial : kParallel).apply(stencil, shift, f.values, out.values);
  return out;
}

SolveResult cg_solve_detailed(const HamiltonianSpec& H, const ScalarField& rhs,
                              const SolverOptions& opts, const ScalarField* guess) {
  require_same_grid(H, rhs);
  if (guess) require_same_grid(H, *guess);
  if (!(opts.tol > 0.0)) throw ValidationError("solver tolerance must be positive");
  const Kernels& k = opts.execution == Execution::serial ? kSerial : kParallel;
  const auto stencil = kernels::Stencil::of(H.grid);
  const auto shift = H.shift();
  const std::size_t n = H.grid.node_count();
  const int max_iter = opts.max_iter > 0 ? opts.max_iter : 20 * H.grid.side() * H.grid.dim();

  SolveResult result{guess ? *guess : ScalarField(H.grid), 0, 0.0, {}};
  auto& x = result.solution.values;

  const double bnorm = std::sqrt(k.dot(rhs.values, rhs.values));
  if (bnorm == 0.0) {
    std::fill(x.begin(), x.end(), 0.0);
    return result;
  }

  Preconditioner pc = opts.preconditioner;
  if (pc == Preconditioner::automatic) pc = H.grid.dim() == 1 ? Preconditioner::line : Preconditioner::multigrid;
  kernels::LineFactor factor;
  std::optional<kernels::Multigrid> mg;
  if (pc == Preconditioner::line) factor = k.factor_lines(stencil, shift);
  if (pc == Preconditioner::multigrid) mg.emplace(stencil, shift, opts.execution == Execution::parallel);
  auto precondition = [&](std::span<const double> r, std::span<double> z) {
    switch (pc) {
      case Preconditioner::line:
        k.line_solve(stencil, factor, r, z);
        break;
      case Preconditioner::multigrid:
        mg->apply(r, z);
        break;
      default:
        k.jacobi(stencil, shift, r, z);
    }
  };

  // Rounding floor of the relative residual: 16 eps (|A| |x| + |b|) / |b|.
  double max_shift = 0.0;
  for (double v : shift) max_shift = std::max(max_shift, std::abs(v));
  const double norm_a = 4.0 * H.grid.dim() * stencil.inv_h2 + max_shift;
  auto attainable = [&] {
    const double xnorm = std::sqrt(k.dot(x, x));
    return 16.0 * std::numeric_limits<double>::epsilon() * (norm_a * xnorm + bnorm) / bnorm;
  };
  auto converged = [&](double rel) { return rel <= opts.tol || rel <= attainable(); };

  std::vector<double> r(n), z(n), p(n), q(n);
  auto true_residual = [&] {
    k.apply(stencil, shift, x, q);
    for (std::size_t i = 0; i < n; ++i) r[i] = rhs.values[i] - q[i];
    return std::sqrt(k.dot(r, r)) / bnorm;
  };

  // Restarts guard against drift between the recursive and the true residual.
  constexpr int kMaxRestarts = 3;
  int total_iter = 0;
  for (int restart = 0; restart <= kMaxRestarts; ++restart) {
    double rel = true_residual();
    result.residual_history.push_back(rel);
    if (converged(rel)) {
      result.iterations = total_iter;
      result.relative_residual = rel;
      return result;
    }
    precondition(r, z);
    std::copy(z.begin(), z.end(), p.begin());
    double rz = k.dot(r, z);
    while (total_iter < max_iter) {
      k.apply(stencil, shift, p, q);
      const double pq = k.dot(p, q);
      if (!(pq > 0.0)) break;  // breakdown: operator not SPD on this direction
      const double alpha = rz / pq;
      k.axpy(alpha, p, x);
      k.axpy(-alpha, q, r);
      ++total_iter;
      rel = std::sqrt(k.dot(r, r)) / bnorm;
      result.residual_history.push_back(rel);
      if (rel <= opts.tol || (rel <= 1e-8 && converged(rel))) break;
      precondition(r, z);
      const double rz_next = k.dot(r, z);
      k.xpby(z, rz_next / rz, p);
      rz = rz_next;
    }
    if (total_iter >= max_iter) break;
    if (!converged(rel)) break;
  }
  const double final_rel = true_residual();
  if (converged(final_rel)) {
    result.iterations = total_iter;
    result.relative_residual = final_rel;
    return result;
  }
  throw SolverError(fmt::format("conjugate gradients did not reach tol {:g} in {} iterations "
                                "(relative residual {:g})",
                                opts.tol, total_iter, final_rel),
                    std::move(result.residual_history));
}

std::vector<double> assemble_dense(const HamiltonianSpec& H) {
  const Grid& g = H.grid;
  const std::size_t n = g.node_count();
  if (n > kDenseNodeLimit)
    throw ValidationError(fmt::format("dense assembly limited to {} nodes", kDenseNodeLimit));
  const double w = 1.0 / (g.spacing() * g.spacing());
  std::vector<double> a(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const Index3 c = g.node_coords(i);
    a[i * n + i] += 2.0 * g.dim() * w + H.lambda * H.potential[i] + H.eta;
    for (int ax = 0; ax < g.dim(); ++ax) {
      for (int step : {-1, 1}) {
        Index3 nb = c;
        nb[ax] += step;
        if (nb[ax] < 0 || nb[ax] >= g.side()) {
          if (g.bc() == Boundary::dirichlet) continue;
          nb[ax] = (nb[ax] + g.side()) % g.side();
        }
        a[i * n + g.node_index(nb)] -= w;
      }
    }
  }
  return a;
}

ScalarField dense_solve_oracle(const HamiltonianSpec& H, const ScalarField& rhs) {
  require_same_grid(H, rhs);
  const std::size_t n = H.grid.node_count();
  const auto dense = assemble_dense(H);
  Eigen::MatrixXd a(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) a(i, j) = dense[i * n + j];
  Eigen::Map<const Eigen::VectorXd> b(rhs.values.data(), static_cast<Eigen::Index>(n));
  Eigen::LLT<Eigen::MatrixXd> llt(a);
  if (llt.info() != Eigen::Success) throw SolverError("dense factorization failed: matrix is not SPD", {});
  // Singular-but-PSD matrices can pass LLT with a vanishing pivot.
  const Eigen::VectorXd diag = llt.matrixL().toDenseMatrix().diagonal();
  if (diag.minCoeff() <= 1e-12 * diag.maxCoeff())
    throw SolverError("dense factorization failed: matrix is numerically singular", {});
  Eigen::VectorXd x = llt.solve(b);
  return ScalarField(H.grid, std::vector<double>(x.data(), x.data() + n));
}

}  // namespace landscape
