#pragma once

#include <optional>
#include <vector>

#include "landscape/grid.hpp"

namespace landscape {

// automatic: line for d = 1 (an exact inverse under Dirichlet conditions),
// multigrid otherwise.
enum class Preconditioner { jacobi, line, multigrid, automatic };
enum class Execution { serial, parallel };

struct SolverOptions {
  double tol = 1e-9;       // relative residual ||Af - b|| / ||b||
  int max_iter = 0;        // 0: 20 * side * dim
  Preconditioner preconditioner = Preconditioner::automatic;
  Execution execution = Execution::parallel;
};

struct SolveResult {
  ScalarField solution;
  int iterations = 0;
  double relative_residual = 0.0;
  std::vector<double> residual_history;
};

// (A f)(x) = h^-2 sum_{y ~ x} (f(x) - f(y)) + (lambda V(x) + eta) f(x).
ScalarField apply_hamiltonian(const HamiltonianSpec& H, const ScalarField& f,
                              Execution exec = Execution::parallel);

// Preconditioned conjugate gradients. Stops when the relative residual is
// below tol or below its rounding floor 16 eps (|A| |x| + |b|) / |b|. Throws
// SolverError carrying the residual history when max_iter is exhausted.
SolveResult cg_solve_detailed(const HamiltonianSpec& H, const ScalarField& rhs,
                              const SolverOptions& opts = {},
                              const ScalarField* initial_guess = nullptr);

inline ScalarField cg_solve(const HamiltonianSpec& H, const ScalarField& rhs,
                            const SolverOptions& opts = {}) {
  return cg_solve_detailed(H, rhs, opts).solution;
}

// Dense factorization of the assembled matrix. Test oracle only.
inline constexpr std::size_t kDenseNodeLimit = 10000;
ScalarField dense_solve_oracle(const HamiltonianSpec& H, const ScalarField& rhs);

// Dense matrix of the operator assembled entry by entry from the stencil
// definition (row-major, node_count^2 entries).
std::vector<double> assemble_dense(const HamiltonianSpec& H);

}  // namespace landscape
