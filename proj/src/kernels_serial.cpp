#include <algorithm>

#include "landscape/kernels.hpp"

namespace landscape::kernels {

Stencil Stencil::of(const Grid& grid) noexcept {
  const double h = grid.spacing();
  return {grid.dim(), grid.side(), grid.bc(), 1.0 / (h * h)};
}

std::size_t Stencil::size() const noexcept {
  std::size_t n = 1;
  for (int a = 0; a < dim; ++a) n *= static_cast<std::size_t>(side);
  return n;
}

namespace serial {

void apply(const Stencil& s, std::span<const double> shift, std::span<const double> in,
           std::span<double> out) {
  const std::size_t n = s.size();
  const bool periodic = s.bc == Boundary::periodic;
  for (std::size_t i = 0; i < n; ++i) {
    double acc = (2.0 * s.dim * s.inv_h2 + shift[i]) * in[i];
    std::size_t stride = 1;
    std::size_t rest = i;
    for (int a = 0; a < s.dim; ++a) {
      const auto c = static_cast<int>(rest % static_cast<std::size_t>(s.side));
      rest /= static_cast<std::size_t>(s.side);
      const std::size_t span = stride * static_cast<std::size_t>(s.side);
      if (c > 0)
        acc -= s.inv_h2 * in[i - stride];
      else if (periodic)
        acc -= s.inv_h2 * in[i + span - stride];
      if (c < s.side - 1)
        acc -= s.inv_h2 * in[i + stride];
      else if (periodic)
        acc -= s.inv_h2 * in[i + stride - span];
      stride = span;
    }
    out[i] = acc;
  }
}

double dot(std::span<const double> a, std::span<const double> b) {
  double total = 0.0;
  for (std::size_t lo = 0; lo < a.size(); lo += kBlock) {
    const std::size_t hi = std::min(a.size(), lo + kBlock);
    double sum = 0.0;
    for (std::size_t i = lo; i < hi; ++i) sum += a[i] * b[i];
    total += sum;
  }
  return total;
}

void axpy(double alpha, std::span<const double> x, std::span<double> y) {
  for (std::size_t i = 0; i < x.size(); ++i) y[i] += alpha * x[i];
}

void xpby(std::span<const double> x, double beta, std::span<double> y) {
  for (std::size_t i = 0; i < x.size(); ++i) y[i] = x[i] + beta * y[i];
}

void jacobi(const Stencil& s, std::span<const double> shift, std::span<const double> r,
            std::span<double> z) {
  const double base = 2.0 * s.dim * s.inv_h2;
  for (std::size_t i = 0; i < r.size(); ++i) z[i] = r[i] / (base + shift[i]);
}

LineFactor factor_lines(const Stencil& s, std::span<const double> shift) {
  const std::size_t n = s.size();
  const auto len = static_cast<std::size_t>(s.side);
  const double base = 2.0 * s.dim * s.inv_h2;
  const double off = -s.inv_h2;
  LineFactor f{std::vector<double>(n), std::vector<double>(n)};
  for (std::size_t line = 0; line < n / len; ++line) {
    const std::size_t o = line * len;
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
  for (std::size_t line = 0; line < n / len; ++line) {
    const std::size_t o = line * len;
    z[o] = r[o] * f.inv_pivot[o];
    for (std::size_t k = 1; k < len; ++k)
      z[o + k] = (r[o + k] - off * z[o + k - 1]) * f.inv_pivot[o + k];
    for (std::size_t k = len - 1; k-- > 0;) z[o + k] -= f.upper[o + k] * z[o + k + 1];
  }
}

}  // namespace serial
}  // namespace landscape::kernels
