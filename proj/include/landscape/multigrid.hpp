#pragma once

#include <memory>
#include <span>
#include <vector>

#include "landscape/kernels.hpp"

namespace landscape::kernels {

// Geometric multigrid V-cycle used as a CG preconditioner for d >= 2.
// Pairs of nodes are merged per axis (cell-centered coarsening), transfers are
// tensor-product linear interpolation P and restriction P^T / 2^d, the coarse
// operators are rediscretized with averaged shifts, and smoothing is damped
// Jacobi. The cycle is a symmetric positive definite map.
class Multigrid {
 public:
  Multigrid(const Stencil& s, std::span<const double> shift, bool parallel);
  ~Multigrid();
  Multigrid(Multigrid&&) noexcept;
  Multigrid& operator=(Multigrid&&) noexcept;

  // z = B r for one V-cycle B.
  void apply(std::span<const double> r, std::span<double> z);

  int levels() const noexcept;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace landscape::kernels
