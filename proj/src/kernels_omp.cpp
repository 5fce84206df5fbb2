#include <algorithm>
#include <cstdint>

#include "landscape/kernels.hpp"

namespace landscape::kernels::omp {

namespace {

// Below this many nodes a parallel region costs more than it saves.
constexpr std::size_t kParallelThreshold = 16384;

inline bool worth_it(std::size_t n) noexcept { return n >= kParallelThreshold; }

}  // namespace

void apply(const Stencil& s, std::span<const double> shift, std::span<const double> in,
           std::span<double> out) {
  const auto len = static_cast<std::size_t>(s.side);
  const auto lines = static_cast<std::int64_t>(s.lines());
  const bool periodic = s.bc == Boundary::periodic;
  const double diag0 = 2.0 * s.dim * s.inv_h2;
  const double w = s.inv_h2;
  const std::size_t plane = len * len;

#pragma omp parallel for if (worth_it(s.size())) schedule(static)
  for (std::int64_t l = 0; l < lines; ++l) {
    const std::size_t o = static_cast<std::size_t>(l) * len;
    const auto c1 = static_cast<std::size_t>(l) % len;
    const auto c2 = static_cast<std::size_t>(l) / len;
    for (std::size_t k = 0; k < len; ++k) {
      const std::size_t i = o + k;
      double acc = (diag0 + shift[i]) * in[i];
      // axis 0
      if (k > 0)
        acc -= w * in[i - 1];
      else if (periodic)
        acc -= w * in[i + len - 1];
      if (k + 1 < len)
        acc -= w * in[i + 1];
      else if (periodic)
        acc -= w * in[i + 1 - len];
      if (s.dim >= 2) {
        if (c1 > 0)
          acc -= w * in[i - len];
        else if (periodic)
          acc -= w * in[i + plane - len];
        if (c1 + 1 < len)
          acc -= w * in[i + len];
        else if (periodic)
          acc -= w * in[i + len - plane];
      }
      if (s.dim == 3) {
        const std::size_t vol = plane * len;
        if (c2 > 0)
          acc -= w * in[i - plane];
        else if (periodic)
          acc -= w * in[i + vol - plane];
        if (c2 + 1 < len)
          acc -= w * in[i + plane];
        else if (periodic)
          acc -= w * in[i + plane - vol];
      }
      out[i] = acc;
    }
  }
}

double dot(std::span<const double> a, std::span<const double> b) {
  const std::size_t n = a.size();
  const std::size_t blocks = (n + kBlock - 1) / kBlock;
  std::vector<double> partial(blocks, 0.0);
#pragma omp parallel for if (worth_it(n)) schedule(static)
  for (std::int64_t blk = 0; blk < static_cast<std::int64_t>(blocks); ++blk) {
    const std::size_t lo = static_cast<std::size_t>(blk) * kBlock;
    const std::size_t hi = std::min(n, lo + kBlock);
    double sum = 0.0;
    for (std::size_t i = lo; i < hi; ++i) sum += a[i] * b[i];
    partial[static_cast<std::size_t>(blk)] = sum;
  }
  double total = 0.0;
  for (double p : partial) total += p;
  return total;
}

void axpy(double alpha, std::span<const double> x, std::span<double> y) {
  const auto n = static_cast<std::int64_t>(x.size());
#pragma omp parallel for if (worth_it(x.size())) schedule(static)
  for (std::int64_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

void xpby(std::span<const double> x, double beta, std::span<double> y) {
  const auto n = static_cast<std::int64_t>(x.size());
#pragma omp parallel for if (worth_it(x.size())) schedule(static)
  for (std::int64_t i = 0; i < n; ++i) y[i] = x[i] + beta * y[i];
}

void jacobi(const Stencil& s, std::span<const double> shift, std::span<const double> r,
            std::span<double> z) {
  const double base = 2.0 * s.dim * s.inv_h2;
  const auto n = static_cast<std::int64_t>(r.size());
#pragma omp parallel for if (worth_it(r.size())) schedule(static)
  for (std::int64_t i = 0; i < n; ++i) z[i] = r[i] / (base + shift[i]);
}

LineFactor factor_lines(const Stencil& s, std::span<const double> shift) {
  const std::size_t n = s.size();
  const auto len = static_cast<std::size_t>(s.side);
  const double base = 2.0 * s.dim * s.inv_h2;
  const double off = -s.inv_h2;
  LineFactor f{std::vector<double>(n), std::vector<double>(n)};
  const auto lines = static_cast<std::int64_t>(n / len);
#pragma omp parallel for if (worth_it(n)) schedule(static)
  for (std::int64_t line = 0; line < lines; ++line) {
    const std::size_t o = static_cast<std::size_t>(line) * len;
    double prev_upper = 0.0;
    for (std::size_t k = 0; k < len; ++k) {
      const double pivot = base + shift[o + k] - (k > 0 ? off * prev_upper : 0.0);
      f.inv_pivot[o + k] = 1.0 / pivot;
      prev_upper = (k + 1 < len) ? off / pivot : 0.0;
      f.upper[o + k] = prev_upper;
    }
  }
  return f;
}

void line_solve(const Stencil& s, const LineFactor& f, std::span<const double> r,
                std::span<double> z) {
  const std::size_t n = s.size();
  const auto len = static_cast<std::size_t>(s.side);
  const double off = -s.inv_h2;
  const auto lines = static_cast<std::int64_t>(n / len);
#pragma omp parallel for if (worth_it(n)) schedule(static)
  for (std::int64_t line = 0; line < lines; ++line) {
    const std::size_t o = static_cast<std::size_t>(line) * len;
    z[o] = r[o] * f.inv_pivot[o];
    for (std::size_t k = 1; k < len; ++k)
      z[o + k] = (r[o + k] - off * z[o + k - 1]) * f.inv_pivot[o + k];
    for (std::size_t k = len - 1; k-- > 0;) z[o + k] -= f.upper[o + k] * z[o + k + 1];
  }
}

}  // namespace landscape::kernels::omp
