#include "landscape/multigrid.hpp"

#include <algorithm>
#include <array>
#include <cstdint>

#include <Eigen/Dense>

namespace landscape::kernels {

namespace {

constexpr std::size_t kDenseCoarsest = 600;
constexpr std::size_t kParallelThreshold = 16384;
constexpr int kSweeps = 2;
constexpr int kFallbackSweeps = 40;

std::size_t ipow(std::size_t b, int e) {
  std::size_t r = 1;
  for (int i = 0; i < e; ++i) r *= b;
  return r;
}

struct Level {
  Stencil stencil;
  std::vector<double> shift;
  std::vector<double> inv_diag;
  std::vector<double> r, z, t;  // workspace
};

// Coordinates of a node in a cube of side n, axis 0 fastest.
inline std::array<int, 3> coords(std::size_t i, int n, int dim) {
  std::array<int, 3> c{0, 0, 0};
  for (int a = 0; a < dim; ++a) {
    c[static_cast<std::size_t>(a)] = static_cast<int>(i % static_cast<std::size_t>(n));
    i /= static_cast<std::size_t>(n);
  }
  return c;
}

// Resolves a coordinate on a side-n axis; -1 when it falls outside a Dirichlet box.
inline int wrap(int c, int n, bool periodic) {
  if (c >= 0 && c < n) return c;
  if (!periodic) return -1;
  return (c % n + n) % n;
}

}  // namespace

struct Multigrid::Impl {
  std::vector<Level> levels;
  bool parallel;
  double omega;
  Eigen::LLT<Eigen::MatrixXd> coarse;
  bool dense_coarse = false;

  void apply_op(const Level& L, std::span<const double> in, std::span<double> out) const {
    if (parallel)
      omp::apply(L.stencil, L.shift, in, out);
    else
      serial::apply(L.stencil, L.shift, in, out);
  }

  bool par(std::size_t n) const { return parallel && n >= kParallelThreshold; }

  // z += omega D^{-1} (r - A z)
  void smooth(Level& L) {
    const std::size_t n = L.r.size();
    apply_op(L, L.z, L.t);
    const auto nn = static_cast<std::int64_t>(n);
#pragma omp parallel for if (par(n)) schedule(static)
    for (std::int64_t i = 0; i < nn; ++i) L.z[i] += omega * L.inv_diag[i] * (L.r[i] - L.t[i]);
  }

  void restrict_to(const Level& fine, Level& coarse_level) const {
    const int nf = fine.stencil.side, nc = coarse_level.stencil.side, d = fine.stencil.dim;
    const bool periodic = fine.stencil.bc == Boundary::periodic;
    static constexpr int kOff[4] = {-1, 0, 1, 2};
    static constexpr double kW[4] = {0.25, 0.75, 0.75, 0.25};
    const double scale = 1.0 / static_cast<double>(1 << d);
    const auto n = static_cast<std::int64_t>(coarse_level.r.size());
    const std::size_t terms = ipow(4, d);
#pragma omp parallel for if (par(fine.r.size())) schedule(static)
    for (std::int64_t J = 0; J < n; ++J) {
      const auto c = coords(static_cast<std::size_t>(J), nc, d);
      double acc = 0.0;
      for (std::size_t t = 0; t < terms; ++t) {
        std::size_t rest = t, idx = 0, stride = 1;
        double w = 1.0;
        bool inside = true;
        for (int a = 0; a < d; ++a) {
          const int k = static_cast<int>(rest % 4);
          rest /= 4;
          const int f = wrap(2 * c[static_cast<std::size_t>(a)] + kOff[k], nf, periodic);
          if (f < 0) {
            inside = false;
            break;
          }
          w *= kW[k];
          idx += static_cast<std::size_t>(f) * stride;
          stride *= static_cast<std::size_t>(nf);
        }
        if (inside) acc += w * fine.t[idx];
      }
      coarse_level.r[J] = acc * scale;
    }
  }

  // fine.z += P coarse.z
  void prolong_add(const Level& coarse_level, Level& fine) const {
    const int nf = fine.stencil.side, nc = coarse_level.stencil.side, d = fine.stencil.dim;
    const bool periodic = fine.stencil.bc == Boundary::periodic;
    const auto n = static_cast<std::int64_t>(fine.z.size());
    const std::size_t terms = std::size_t{1} << d;
#pragma omp parallel for if (par(fine.z.size())) schedule(static)
    for (std::int64_t i = 0; i < n; ++i) {
      const auto c = coords(static_cast<std::size_t>(i), nf, d);
      double acc = 0.0;
      for (std::size_t t = 0; t < terms; ++t) {
        std::size_t idx = 0, stride = 1;
        double w = 1.0;
        bool inside = true;
        for (int a = 0; a < d; ++a) {
          const int f = c[static_cast<std::size_t>(a)];
          const int J = f >> 1;
          const bool far = (t >> a) & 1u;
          const int Jn = far ? ((f & 1) ? J + 1 : J - 1) : J;
          const int cc = wrap(Jn, nc, periodic);
          if (cc < 0) {
            inside = false;
            break;
          }
          w *= far ? 0.25 : 0.75;
          idx += static_cast<std::size_t>(cc) * stride;
          stride *= static_cast<std::size_t>(nc);
        }
        if (inside) acc += w * coarse_level.z[idx];
      }
      fine.z[i] += acc;
    }
  }

  void solve_coarsest(Level& L) {
    if (dense_coarse) {
      Eigen::Map<const Eigen::VectorXd> b(L.r.data(), static_cast<Eigen::Index>(L.r.size()));
      Eigen::Map<Eigen::VectorXd>(L.z.data(), static_cast<Eigen::Index>(L.z.size())) = coarse.solve(b);
      return;
    }
    for (std::size_t i = 0; i < L.z.size(); ++i) L.z[i] = omega * L.inv_diag[i] * L.r[i];
    for (int s = 1; s < kFallbackSweeps; ++s) smooth(L);
  }

  void vcycle(std::size_t l) {
    Level& L = levels[l];
    if (l + 1 == levels.size()) {
      solve_coarsest(L);
      return;
    }
    const std::size_t n = L.r.size();
    const auto nn = static_cast<std::int64_t>(n);
#pragma omp parallel for if (par(n)) schedule(static)
    for (std::int64_t i = 0; i < nn; ++i) L.z[i] = omega * L.inv_diag[i] * L.r[i];
    for (int s = 1; s < kSweeps; ++s) smooth(L);
    apply_op(L, L.z, L.t);
#pragma omp parallel for if (par(n)) schedule(static)
    for (std::int64_t i = 0; i < nn; ++i) L.t[i] = L.r[i] - L.t[i];
    restrict_to(L, levels[l + 1]);
    vcycle(l + 1);
    prolong_add(levels[l + 1], L);
    for (int s = 0; s < kSweeps; ++s) smooth(L);
  }
};

Multigrid::Multigrid(const Stencil& s, std::span<const double> shift, bool parallel)
    : impl_(std::make_unique<Impl>()) {
  impl_->parallel = parallel;
  impl_->omega = 2.0 * s.dim / (2.0 * s.dim + 1.0);
  auto make_level = [](const Stencil& st, std::vector<double> sh) {
    Level L{st, std::move(sh), {}, {}, {}, {}};
    const std::size_t n = L.shift.size();
    L.inv_diag.resize(n);
    for (std::size_t i = 0; i < n; ++i) L.inv_diag[i] = 1.0 / (2.0 * st.dim * st.inv_h2 + L.shift[i]);
    L.r.assign(n, 0.0);
    L.z.assign(n, 0.0);
    L.t.assign(n, 0.0);
    return L;
  };
  impl_->levels.push_back(make_level(s, std::vector<double>(shift.begin(), shift.end())));
  while (true) {
    const Level& f = impl_->levels.back();
    const int nf = f.stencil.side;
    if (f.shift.size() <= kDenseCoarsest || nf % 2 != 0 || nf / 2 < 2) break;
    const int d = f.stencil.dim;
    const int nc = nf / 2;
    Stencil cs{d, nc, f.stencil.bc, f.stencil.inv_h2 / 4.0};
    std::vector<double> csh(ipow(static_cast<std::size_t>(nc), d), 0.0);
    const double avg = 1.0 / static_cast<double>(1 << d);
    for (std::size_t J = 0; J < csh.size(); ++J) {
      const auto c = coords(J, nc, d);
      for (std::size_t t = 0; t < (std::size_t{1} << d); ++t) {
        std::size_t idx = 0, stride = 1;
        for (int a = 0; a < d; ++a) {
          idx += static_cast<std::size_t>(2 * c[static_cast<std::size_t>(a)] + ((t >> a) & 1u)) * stride;
          stride *= static_cast<std::size_t>(nf);
        }
        csh[J] += avg * f.shift[idx];
      }
    }
    impl_->levels.push_back(make_level(cs, std::move(csh)));
  }

  Level& c = impl_->levels.back();
  const std::size_t n = c.shift.size();
  if (n <= kDenseCoarsest) {
    Eigen::MatrixXd a(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    std::vector<double> e(n, 0.0), col(n);
    for (std::size_t j = 0; j < n; ++j) {
      e[j] = 1.0;
      serial::apply(c.stencil, c.shift, e, col);
      e[j] = 0.0;
      for (std::size_t i = 0; i < n; ++i) a(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = col[i];
    }
    impl_->coarse.compute(a);
    impl_->dense_coarse = impl_->coarse.info() == Eigen::Success;
  }
}

Multigrid::~Multigrid() = default;
Multigrid::Multigrid(Multigrid&&) noexcept = default;
Multigrid& Multigrid::operator=(Multigrid&&) noexcept = default;

int Multigrid::levels() const noexcept { return static_cast<int>(impl_->levels.size()); }

void Multigrid::apply(std::span<const double> r, std::span<double> z) {
  Level& top = impl_->levels.front();
  std::copy(r.begin(), r.end(), top.r.begin());
  impl_->vcycle(0);
  std::copy(top.z.begin(), top.z.end(), z.begin());
}

}  // namespace landscape::kernels
