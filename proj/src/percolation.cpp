#include "landscape/percolation.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <numeric>

#include <fmt/format.h>

#include "landscape/errors.hpp"
#include "landscape/sampling.hpp"

namespace landscape {

namespace {

std::size_t ipow(std::size_t base, int e) {
  std::size_t r = 1;
  for (int i = 0; i < e; ++i) r *= base;
  return r;
}

void check_dim(int dim) {
  if (dim < 1 || dim > 3) throw ValidationError("dimension must be 1, 2 or 3");
}

// Half extent of the integer offsets inside Q'_e along one axis.
int edge_cube_reach(int k) {
  // open half-side 2^{k-2}; integer offsets |o| < 2^{k-2}
  if (k <= 2) return 0;
  return (1 << (k - 2)) - 1;
}

class UnionFind {
 public:
  explicit UnionFind(std::size_t n) : parent_(n), rank_(n, 0) { std::iota(parent_.begin(), parent_.end(), 0); }

  std::size_t find(std::size_t x) {
    while (parent_[x] != x) {
      parent_[x] = parent_[parent_[x]];
      x = parent_[x];
    }
    return x;
  }

  void unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return;
    if (rank_[a] < rank_[b]) std::swap(a, b);
    parent_[b] = a;
    if (rank_[a] == rank_[b]) ++rank_[a];
  }

 private:
  std::vector<std::size_t> parent_;
  std::vector<unsigned char> rank_;
};

int resolve_k(int k, const DisorderLaw& law, double gamma, int dim) {
  return k > 0 ? k : choose_k(law, gamma, dim);
}

}  // namespace

std::size_t sites_per_edge_cube(int k, int dim) {
  if (k < 1) throw ValidationError("coarse scale k must be >= 1");
  check_dim(dim);
  return ipow(static_cast<std::size_t>(2 * edge_cube_reach(k) + 1), dim);
}

int choose_k(const DisorderLaw& law, double gamma, int dim) {
  law.validate();
  if (!(gamma > 0.0)) throw ValidationError("gamma must be > 0");
  const double closed = law.prob_below(gamma);
  if (!(closed < 1.0)) throw ValidationError(fmt::format("P[omega >= {:g}] = 0 under {}", gamma, law.describe()));
  for (int k = 1; k <= 30; ++k)
    if (std::pow(closed, static_cast<double>(sites_per_edge_cube(k, dim))) < 0.5) return k;
  throw ValidationError("no admissible coarse scale k <= 30");
}

bool CoarseGraph::has_edge(std::size_t v, int axis) const {
  if (axis < 0 || axis >= dim) return false;
  return vertex_box().site(v)[static_cast<std::size_t>(axis)] + 1 < side;
}

std::size_t CoarseGraph::edge_count() const {
  std::size_t per_axis = ipow(static_cast<std::size_t>(side), dim - 1) * static_cast<std::size_t>(side - 1);
  return per_axis * static_cast<std::size_t>(dim);
}

CoarseGraph CoarseGraph::from_xi(int dim, int side, int k, double gamma, std::vector<std::uint8_t> xi) {
  check_dim(dim);
  if (side < 1) throw ValidationError("coarse graph needs at least one vertex per side");
  if (k < 1) throw ValidationError("coarse scale k must be >= 1");
  CoarseGraph g{dim, k, gamma, side, std::move(xi)};
  if (g.xi.size() != g.vertex_count() * static_cast<std::size_t>(dim))
    throw ValidationError("xi must hold one entry per (vertex, axis)");
  for (std::size_t v = 0; v < g.vertex_count(); ++v)
    for (int a = 0; a < dim; ++a) {
      auto& x = g.xi[v * static_cast<std::size_t>(dim) + a];
      if (x > 1) throw ValidationError("xi entries must be 0 or 1");
      if (!g.has_edge(v, a)) x = 0;
    }
  return g;
}

std::vector<Index3> edge_cube_sites(const CoarseGraph& g, std::size_t v, int axis) {
  if (!g.has_edge(v, axis)) throw IndexError("no such coarse edge");
  const Index3 c0 = g.vertex_box().site(v);
  const int step = 1 << g.k;
  Index3 center{0, 0, 0};
  for (int b = 0; b < g.dim; ++b) {
    const auto bb = static_cast<std::size_t>(b);
    center[bb] = step * c0[bb] + step / 2;
  }
  center[static_cast<std::size_t>(axis)] += step / 2;
  const int reach = edge_cube_reach(g.k);
  const int width = 2 * reach + 1;
  const std::size_t n = ipow(static_cast<std::size_t>(width), g.dim);
  std::vector<Index3> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    Index3 s{0, 0, 0};
    std::size_t rest = i;
    for (int b = 0; b < g.dim; ++b) {
      const auto bb = static_cast<std::size_t>(b);
      s[bb] = center[bb] - reach + static_cast<int>(rest % static_cast<std::size_t>(width));
      rest /= static_cast<std::size_t>(width);
    }
    out.push_back(s);
  }
  return out;
}

CoarseGraph coarse_grain(const OmegaField& omega, int k, double gamma) {
  const int dim = omega.box.dim;
  check_dim(dim);
  if (k < 1 || k > 20) throw ValidationError("coarse scale k must lie in [1, 20]");
  if (!(gamma > 0.0)) throw ValidationError("gamma must be > 0");
  int side = omega.box.extent[0];
  for (int a = 1; a < dim; ++a) side = std::min(side, omega.box.extent[static_cast<std::size_t>(a)]);
  const int nc = side >> k;
  if (nc < 4)
    throw ValidationError(fmt::format("box side {} gives {} coarse cells at k = {}; need >= 4", side, nc, k));
  CoarseGraph g{dim, k, gamma, nc, {}};
  g.xi.assign(g.vertex_count() * static_cast<std::size_t>(dim), 0);
  for (std::size_t v = 0; v < g.vertex_count(); ++v)
    for (int a = 0; a < dim; ++a) {
      if (!g.has_edge(v, a)) continue;
      bool open = false;
      for (const auto& s : edge_cube_sites(g, v, a))
        if (omega.at(s) >= gamma) {
          open = true;
          break;
        }
      g.xi[v * static_cast<std::size_t>(dim) + a] = open ? 1 : 0;
    }
  return g;
}

double ClusterReport::diameter_tail(int n) const {
  if (closed.empty()) return 0.0;
  std::size_t count = 0;
  for (std::size_t c = 0; c < closed_component_diameters.size(); ++c)
    if (closed_component_diameters[c] >= n) count += closed_component_sizes[c];
  return static_cast<double>(count) / static_cast<double>(closed.size());
}

ClusterReport cluster_analysis(const CoarseGraph& g) {
  const Box box = g.vertex_box();
  const std::size_t nv = box.size();
  UnionFind uf(nv);
  bool any_open = false;
  for (std::size_t v = 0; v < nv; ++v)
    for (int a = 0; a < g.dim; ++a)
      if (g.has_edge(v, a) && g.edge(v, a)) {
        Index3 w = box.site(v);
        w[static_cast<std::size_t>(a)] += 1;
        uf.unite(v, box.linear(w));
        any_open = true;
      }

  ClusterReport rep;
  rep.open_cluster.assign(nv, 0);
  std::vector<std::size_t> label_of_root(nv, nv);
  std::vector<std::size_t> sizes;
  for (std::size_t v = 0; v < nv; ++v) {
    const std::size_t r = uf.find(v);
    if (label_of_root[r] == nv) {
      label_of_root[r] = sizes.size();
      sizes.push_back(0);
    }
    rep.open_cluster[v] = label_of_root[r];
    ++sizes[label_of_root[r]];
  }
  rep.cluster_count = sizes.size();
  if (any_open) {
    rep.largest_cluster = static_cast<std::size_t>(std::max_element(sizes.begin(), sizes.end()) - sizes.begin());
    rep.largest_fraction = static_cast<double>(sizes[rep.largest_cluster]) / static_cast<double>(nv);
  }

  rep.closed.assign(nv, 1);
  if (any_open)
    for (std::size_t v = 0; v < nv; ++v) rep.closed[v] = rep.open_cluster[v] != rep.largest_cluster;

  // Components of closed vertices under lattice adjacency.
  std::vector<char> seen(nv, 0);
  std::vector<std::size_t> queue;
  for (std::size_t start = 0; start < nv; ++start) {
    if (!rep.closed[start] || seen[start]) continue;
    Index3 lo = box.site(start), hi = lo;
    queue.assign(1, start);
    seen[start] = 1;
    for (std::size_t head = 0; head < queue.size(); ++head) {
      const Index3 c = box.site(queue[head]);
      for (int a = 0; a < g.dim; ++a) {
        const auto aa = static_cast<std::size_t>(a);
        lo[aa] = std::min(lo[aa], c[aa]);
        hi[aa] = std::max(hi[aa], c[aa]);
        for (int delta : {-1, 1}) {
          Index3 w = c;
          w[aa] += delta;
          if (!box.contains(w)) continue;
          const std::size_t j = box.linear(w);
          if (rep.closed[j] && !seen[j]) {
            seen[j] = 1;
            queue.push_back(j);
          }
        }
      }
    }
    int diam = 0;
    for (int a = 0; a < g.dim; ++a) diam = std::max(diam, hi[static_cast<std::size_t>(a)] - lo[static_cast<std::size_t>(a)]);
    rep.closed_component_diameters.push_back(diam);
    rep.closed_component_sizes.push_back(queue.size());
  }
  return rep;
}

ChemicalDistanceMap chemical_distance(const CoarseGraph& g, const Index3& origin) {
  const Box box = g.vertex_box();
  if (!box.contains(origin)) throw IndexError("origin is not a coarse vertex");
  constexpr int kUnreached = std::numeric_limits<int>::max();
  ChemicalDistanceMap out{origin, box, std::vector<int>(box.size(), kUnreached)};
  std::deque<std::size_t> dq;
  const std::size_t o = box.linear(origin);
  out.dist[o] = 0;
  dq.push_back(o);
  while (!dq.empty()) {
    const std::size_t v = dq.front();
    dq.pop_front();
    const Index3 c = box.site(v);
    for (int a = 0; a < g.dim; ++a) {
      const auto aa = static_cast<std::size_t>(a);
      for (int delta : {-1, 1}) {
        Index3 w = c;
        w[aa] += delta;
        if (!box.contains(w)) continue;
        const std::size_t j = box.linear(w);
        const int weight = delta > 0 ? g.edge(v, a) : g.edge(j, a);
        const int cand = out.dist[v] + weight;
        if (cand < out.dist[j]) {
          out.dist[j] = cand;
          if (weight == 0)
            dq.push_front(j);
          else
            dq.push_back(j);
        }
      }
    }
  }
  return out;
}

WilsonInterval wilson_interval(std::size_t hits, std::size_t n, double z) {
  if (n == 0) return {0.0, 1.0};
  const double nn = static_cast<double>(n);
  const double p = static_cast<double>(hits) / nn;
  const double z2 = z * z;
  const double denom = 1.0 + z2 / nn;
  const double center = (p + z2 / (2.0 * nn)) / denom;
  const double half = z * std::sqrt(p * (1.0 - p) / nn + z2 / (4.0 * nn * nn)) / denom;
  return {std::max(0.0, center - half), std::min(1.0, center + half)};
}

void KestenParams::validate() const {
  check_dim(dim);
  law.validate();
  if (coarse_cells < 4) throw ValidationError("coarse_cells must be >= 4");
  if (samples < 1) throw ValidationError("N_samples must be >= 1");
  if (workers < 1) throw ValidationError("workers must be >= 1");
  if (radii.empty()) throw ValidationError("radii list is empty");
  for (std::size_t i = 0; i < radii.size(); ++i) {
    if (radii[i] < 1) throw ValidationError("radii must be >= 1");
    if (i > 0 && radii[i] <= radii[i - 1]) throw ValidationError("radii must be increasing");
  }
  if (c_probe != 0.0 && !(c_probe > 0.0 && c_probe < 1.0)) throw ValidationError("c_probe must lie in (0, 1)");
  if (k < 0) throw ValidationError("k must be >= 0 (0 selects choose_k)");
}

KestenResult kesten_tail_experiment(const KestenParams& params) {
  params.validate();
  KestenResult result;
  result.k = resolve_k(params.k, params.law, params.gamma, params.dim);
  const int step = 1 << result.k;
  result.c_probe = params.c_probe > 0.0 ? params.c_probe : 0.1 / step;
  const int center = params.coarse_cells / 2;
  std::vector<int> hops;
  for (int R : params.radii) {
    const int s = (R + step - 1) / step;
    if (center - s < 0 || center + s >= params.coarse_cells)
      throw ValidationError(fmt::format("radius {} reaches past the {}-vertex coarse box", R, params.coarse_cells));
    hops.push_back(s);
  }
  const Box omega_box = Box::cube(params.dim, params.coarse_cells * step);
  Index3 origin{0, 0, 0};
  for (int a = 0; a < params.dim; ++a) origin[static_cast<std::size_t>(a)] = center;

  std::function<std::vector<int>(std::uint64_t)> task = [&](std::uint64_t s) {
    const OmegaField omega = sample_omega(params.law, omega_box, params.seed, s);
    const CoarseGraph g = coarse_grain(omega, result.k, params.gamma);
    const ChemicalDistanceMap d = chemical_distance(g, origin);
    std::vector<int> mins(hops.size(), std::numeric_limits<int>::max());
    const Box box = g.vertex_box();
    for (std::size_t v = 0; v < box.size(); ++v) {
      const int r = linf_distance(box.site(v), origin, params.dim);
      for (std::size_t i = 0; i < hops.size(); ++i)
        if (r == hops[i]) mins[i] = std::min(mins[i], d.dist[v]);
    }
    return mins;
  };
  auto rows = run_samples(params.samples, params.workers, task, result.log);
  for (auto& r : rows)
    if (r) result.per_sample_min.push_back(std::move(*r));

  const std::size_t n = result.per_sample_min.size();
  for (std::size_t i = 0; i < hops.size(); ++i) {
    const double threshold = result.c_probe * params.radii[i];
    std::size_t hits = 0;
    for (const auto& m : result.per_sample_min)
      if (m[i] <= threshold) ++hits;
    const double f = n ? static_cast<double>(hits) / static_cast<double>(n) : 0.0;
    result.rows.push_back({params.radii[i], hops[i], threshold, hits, n, f, wilson_interval(hits, n)});
  }
  result.non_increasing = true;
  for (std::size_t i = 1; i < result.rows.size(); ++i)
    if (result.rows[i].ci.lo > result.rows[i - 1].ci.hi) result.non_increasing = false;
  return result;
}

void ClusterTailParams::validate() const {
  check_dim(dim);
  law.validate();
  if (coarse_cells < 4) throw ValidationError("coarse_cells must be >= 4");
  if (samples < 1) throw ValidationError("N_samples must be >= 1");
  if (workers < 1) throw ValidationError("workers must be >= 1");
  if (n_min < 0 || n_max <= n_min) throw ValidationError("need 0 <= n_min < n_max");
  if (k < 0) throw ValidationError("k must be >= 0 (0 selects choose_k)");
}

ClusterTailResult cluster_tail_experiment(const ClusterTailParams& params) {
  params.validate();
  ClusterTailResult result;
  result.k = resolve_k(params.k, params.law, params.gamma, params.dim);
  const Box omega_box = Box::cube(params.dim, params.coarse_cells << result.k);
  const int bins = params.n_max - params.n_min + 1;

  struct Row {
    std::vector<double> tail;
    double largest;
  };
  std::function<Row(std::uint64_t)> task = [&](std::uint64_t s) {
    const OmegaField omega = sample_omega(params.law, omega_box, params.seed, s);
    const ClusterReport rep = cluster_analysis(coarse_grain(omega, result.k, params.gamma));
    Row row{std::vector<double>(static_cast<std::size_t>(bins)), rep.largest_fraction};
    for (int b = 0; b < bins; ++b) row.tail[static_cast<std::size_t>(b)] = rep.diameter_tail(params.n_min + b);
    return row;
  };
  auto rows = run_samples(params.samples, params.workers, task, result.log);
  for (auto& r : rows)
    if (r) {
      result.per_sample.push_back(std::move(r->tail));
      result.largest_fraction.push_back(r->largest);
    }

  const std::uint64_t bseed = splitmix64(params.seed ^ 0xc1u);
  bool positive = true;
  for (int b = 0; b < bins; ++b) {
    auto stat = [&](std::span<const std::size_t> idx) {
      double m = 0.0;
      for (auto i : idx) m += result.per_sample[i][static_cast<std::size_t>(b)];
      return m / static_cast<double>(idx.size());
    };
    const auto bs = bootstrap(result.per_sample.size(), stat, bseed, params.bootstrap_resamples);
    result.tail.distances.push_back(params.n_min + b);
    result.tail.values.push_back(bs.estimate);
    result.tail.ci.push_back(bs.ci);
    if (!(bs.estimate > 0.0)) positive = false;
  }
  if (positive) {
    result.fit = fit_exponential_decay(result.tail, params.n_min, params.n_max, 0.0);
    result.pass = result.fit.rate > 0.0;
  }
  return result;
}

GapSample gap_statistic_1d(const OmegaField& omega, double gamma, int y_prime) {
  if (omega.box.dim != 1) throw ValidationError("gap statistic needs d = 1");
  const int n = omega.box.extent[0];
  if (y_prime < 0 || y_prime >= n) throw IndexError("y' outside the box");
  GapSample out;
  int right = y_prime + 1;
  while (right < n && !(omega.values[static_cast<std::size_t>(right)] >= gamma)) ++right;
  int left = y_prime - 1;
  while (left >= 0 && !(omega.values[static_cast<std::size_t>(left)] >= gamma)) --left;
  out.censored = right >= n || left < 0;
  out.gap = right - left;
  return out;
}

double exact_gap_moment(double q, double p) {
  if (!(q > 0.0 && q <= 1.0)) throw ValidationError("q must lie in (0, 1]");
  if (!(p > 0.0)) throw ValidationError("p must be > 0");
  if (q == 1.0) return 2.0;
  // P[S = s] = (s - 1) q^2 (1 - q)^{s-2}, s >= 2
  double sum = 0.0;
  double prev = 0.0;
  for (long s = 2; s < 100000000; ++s) {
    const double sd = static_cast<double>(s);
    const double term =
        std::exp(p * std::log(sd) + std::log(sd - 1.0) + 2.0 * std::log(q) + (sd - 2.0) * std::log1p(-q));
    sum += term;
    if (term < prev && term < 1e-18 * sum) break;
    prev = term;
  }
  return std::pow(sum, 1.0 / p);
}

std::string to_string(RunStatus s) {
  switch (s) {
    case RunStatus::pass:
      return "PASS";
    case RunStatus::fail:
      return "FAIL";
    case RunStatus::inconclusive:
      return "INCONCLUSIVE";
  }
  return "?";
}

double AnchorParams::threshold() const { return std::isnan(gamma) ? law.upper_quartile() : gamma; }

void AnchorParams::validate() const {
  law.validate();
  if (cells < 3) throw ValidationError("anchor box needs at least 3 sites");
  if (samples < 1) throw ValidationError("N_samples must be >= 1");
  if (workers < 1) throw ValidationError("workers must be >= 1");
  if (ps.empty()) throw ValidationError("p list is empty");
  for (double p : ps)
    if (!(p >= 1.0)) throw ValidationError("moment orders must be >= 1");
  const double g = threshold();
  if (!(g > 0.0)) throw ValidationError("gamma must be > 0");
  if (!(law.prob_at_least(g) > 0.0)) throw ValidationError("P[omega >= gamma] = 0");
}

AnchorReport anchoring_experiment_1d(const AnchorParams& params) {
  params.validate();
  AnchorReport rep;
  rep.gamma = params.threshold();
  rep.q = params.law.prob_at_least(rep.gamma);
  const Box box = Box::cube(1, params.cells);
  const int y_prime = params.cells / 2;

  SampleLog log;
  std::function<GapSample(std::uint64_t)> task = [&](std::uint64_t s) {
    return gap_statistic_1d(sample_omega(params.law, box, params.seed, s), rep.gamma, y_prime);
  };
  for (auto& g : run_samples(params.samples, params.workers, task, log)) rep.gaps.push_back(*g);

  std::vector<double> gaps;
  std::size_t censored = 0;
  for (const auto& g : rep.gaps) {
    if (g.censored)
      ++censored;
    else
      gaps.push_back(g.gap);
  }
  rep.censored_fraction = static_cast<double>(censored) / static_cast<double>(rep.gaps.size());

  const std::uint64_t bseed = splitmix64(params.seed ^ 0xa7u);
  bool wide = false;
  rep.matches_exact = true;
  for (double p : params.ps) {
    auto stat = [&](std::span<const std::size_t> idx) {
      double m = 0.0;
      for (auto i : idx) m += std::pow(gaps[i], p);
      return std::pow(m / static_cast<double>(idx.size()), 1.0 / p);
    };
    AnchorMoment am{p, 0.0, 0.0, 0.0, exact_gap_moment(rep.q, p), 0.0};
    if (!gaps.empty()) {
      const auto bs = bootstrap(gaps.size(), stat, bseed, params.bootstrap_resamples);
      am.estimate = bs.estimate;
      am.ci = bs.ci;
      am.stderr_ = bs.stderr_;
    }
    const double diff = am.estimate - am.exact;
    am.z = am.stderr_ > 0.0 ? diff / am.stderr_ : (diff == 0.0 ? 0.0 : std::copysign(INFINITY, diff));
    if (!(std::abs(am.z) <= 3.0)) rep.matches_exact = false;
    if (am.ci > 0.5 * am.estimate) wide = true;
    rep.moments.push_back(am);
  }

  rep.linear_growth = !rep.moments.empty();
  if (rep.linear_growth) {
    const double m1 = rep.moments.front().estimate / rep.moments.front().p;
    for (const auto& m : rep.moments)
      if (m.estimate > 2.0 * m1 * m.p) rep.linear_growth = false;
  }

  if (static_cast<int>(gaps.size()) < kMinAnchorSamples) {
    rep.status = RunStatus::inconclusive;
    rep.reason = fmt::format("{} usable samples (< {})", gaps.size(), kMinAnchorSamples);
  } else if (rep.censored_fraction > 0.01) {
    rep.status = RunStatus::inconclusive;
    rep.reason = fmt::format("censored fraction {:.4f} exceeds 1%", rep.censored_fraction);
  } else if (wide) {
    rep.status = RunStatus::inconclusive;
    rep.reason = "confidence intervals wider than half the estimate";
  } else {
    rep.status = rep.linear_growth ? RunStatus::pass : RunStatus::fail;
    rep.reason = rep.linear_growth ? "moments grow at most linearly in p" : "moment growth exceeds 2 p M(1)";
  }
  return rep;
}

}  // namespace landscape
