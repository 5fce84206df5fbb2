#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "landscape/grid.hpp"

namespace landscape::kernels {

// Geometry of the (2d+1)-point stencil, independent of the potential.
struct Stencil {
  int dim;
  int side;  // nodes per axis
  Boundary bc;
  double inv_h2;

  static Stencil of(const Grid& grid) noexcept;
  std::size_t size() const noexcept;
  std::size_t lines() const noexcept { return size() / static_cast<std::size_t>(side); }
};

// Thomas factorization of the tridiagonal block of the operator along each
// axis-0 line (wrap-around couplings dropped). Exact inverse for d = 1
// Dirichlet problems; a line-Jacobi preconditioner otherwise.
struct LineFactor {
  std::vector<double> upper;      // modified super-diagonal c'_i
  std::vector<double> inv_pivot;  // 1 / (b_i - a_i c'_{i-1})
};

// Reductions sum fixed blocks of kBlock elements left to right, then add the
// block partials in order. Both kernel sets share this order, so a solve gives
// the same bits whichever set runs it and however many threads it uses.
inline constexpr std::size_t kBlock = 4096;

// Serial reference implementations; the ground truth the parallel kernels are
// tested against.
namespace serial {
void apply(const Stencil& s, std::span<const double> shift, std::span<const double> in,
           std::span<double> out);
double dot(std::span<const double> a, std::span<const double> b);
void axpy(double alpha, std::span<const double> x, std::span<double> y);
void xpby(std::span<const double> x, double beta, std::span<double> y);  // y = x + beta y
void jacobi(const Stencil& s, std::span<const double> shift, std::span<const double> r,
            std::span<double> z);
LineFactor factor_lines(const Stencil& s, std::span<const double> shift);
void line_solve(const Stencil& s, const LineFactor& f, std::span<const double> r,
                std::span<double> z);
}  // namespace serial

// OpenMP kernels, bit-identical to the serial ones.
namespace omp {

void apply(const Stencil& s, std::span<const double> shift, std::span<const double> in,
           std::span<double> out);
double dot(std::span<const double> a, std::span<const double> b);
void axpy(double alpha, std::span<const double> x, std::span<double> y);
void xpby(std::span<const double> x, double beta, std::span<double> y);
void jacobi(const Stencil& s, std::span<const double> shift, std::span<const double> r,
            std::span<double> z);
LineFactor factor_lines(const Stencil& s, std::span<const double> shift);
void line_solve(const Stencil& s, const LineFactor& f, std::span<const double> r,
                std::span<double> z);
}  // namespace omp

}  // namespace landscape::kernels
