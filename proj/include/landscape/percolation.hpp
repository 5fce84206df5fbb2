#pragma once

#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "landscape/disorder.hpp"
#include "landscape/grid.hpp"
#include "landscape/statistics.hpp"

namespace landscape {

// Integer sites per axis inside the open edge cube Q'_e (side 2^{k-1}, integer
// center), raised to the dimension.
std::size_t sites_per_edge_cube(int k, int dim);

// Smallest k >= 1 with P[omega < gamma]^{sites_per_edge_cube(k, dim)} < 1/2.
int choose_k(const DisorderLaw& law, double gamma, int dim = 2);

// Percolation graph on coarse vertices v in [0, side)^d. Vertex v sits at the
// lattice point 2^k v + 2^{k-1}; edge (v, a) joins v and v + e_a.
struct CoarseGraph {
  int dim = 2;
  int k = 1;
  double gamma = 1.0;
  int side = 0;
  // xi[v * dim + a] for edge (v, a); entries of missing edges are 0 and unused.
  std::vector<std::uint8_t> xi;

  Box vertex_box() const { return Box::cube(dim, side); }
  std::size_t vertex_count() const { return vertex_box().size(); }
  bool has_edge(std::size_t v, int axis) const;
  int edge(std::size_t v, int axis) const { return xi[v * static_cast<std::size_t>(dim) + axis]; }
  std::size_t edge_count() const;

  // Graph with given open/closed values; validates shape and entries.
  static CoarseGraph from_xi(int dim, int side, int k, double gamma, std::vector<std::uint8_t> xi);
};

// Lattice sites of Q'_e for edge (v, axis).
std::vector<Index3> edge_cube_sites(const CoarseGraph& g, std::size_t v, int axis);

CoarseGraph coarse_grain(const OmegaField& omega, int k, double gamma);

struct ClusterReport {
  std::vector<std::size_t> open_cluster;  // cluster label per vertex, labels in first-seen order
  std::size_t cluster_count = 0;
  std::size_t largest_cluster = 0;        // label; meaningful only when largest_fraction > 0
  double largest_fraction = 0.0;          // 0 when no edge is open
  std::vector<char> closed;               // vertex outside the largest open cluster
  std::vector<int> closed_component_diameters;   // |.|_inf, coarse units
  std::vector<std::size_t> closed_component_sizes;

  // Fraction of vertices lying in a closed component of diameter >= n.
  double diameter_tail(int n) const;
};

ClusterReport cluster_analysis(const CoarseGraph& g);

struct ChemicalDistanceMap {
  Index3 origin{};
  Box box;
  std::vector<int> dist;

  int at(const Index3& v) const { return dist[box.linear(v)]; }
};

// 0-1 shortest paths from `origin` with edge weights xi.
ChemicalDistanceMap chemical_distance(const CoarseGraph& g, const Index3& origin);

// Wilson score interval for `hits` successes out of n trials.
struct WilsonInterval {
  double lo;
  double hi;
};
WilsonInterval wilson_interval(std::size_t hits, std::size_t n, double z = 1.96);

struct KestenParams {
  int dim = 2;
  int coarse_cells = 16;          // vertices per side
  DisorderLaw law = DisorderLaw::uniform01();
  double gamma = 0.9;
  int k = 0;                      // 0: choose_k(law, gamma, dim)
  std::vector<int> radii{8, 16, 32};  // lattice units
  double c_probe = 0.0;           // 0: 0.1 / 2^k
  int samples = 200;
  std::uint64_t seed = 1;
  int workers = 1;

  void validate() const;
};

struct KestenRow {
  int radius;
  int shell_hops;     // ceil(R / 2^k)
  double threshold;   // c_probe * R
  std::size_t hits;
  std::size_t samples;
  double frequency;
  WilsonInterval ci;
};

struct KestenResult {
  int k = 0;
  double c_probe = 0.0;
  std::vector<KestenRow> rows;
  std::vector<std::vector<int>> per_sample_min;  // [sample][radius]
  bool non_increasing = false;                   // within the Wilson intervals
  SampleLog log;
};

KestenResult kesten_tail_experiment(const KestenParams& params);

struct ClusterTailParams {
  int dim = 2;
  int coarse_cells = 128;
  DisorderLaw law = DisorderLaw::uniform01();
  double gamma = 0.9;
  int k = 0;  // 0: choose_k
  int samples = 100;
  std::uint64_t seed = 1;
  int workers = 1;
  int n_min = 2;
  int n_max = 10;
  int bootstrap_resamples = 200;

  void validate() const;
};

struct ClusterTailResult {
  int k = 0;
  MomentCurve tail;                             // distances n, values P[diam >= n]
  std::vector<std::vector<double>> per_sample;  // [sample][n - n_min]
  std::vector<double> largest_fraction;
  DecayFit fit{};
  bool pass = false;  // every tail value positive and fitted slope negative
  SampleLog log;
};

ClusterTailResult cluster_tail_experiment(const ClusterTailParams& params);

struct GapSample {
  int gap = 0;
  bool censored = false;
};

// Nearest sites y1 > y' and y_{-1} < y' with omega >= gamma; gap = y1 - y_{-1}.
GapSample gap_statistic_1d(const OmegaField& omega, double gamma, int y_prime);

// E[S^p]^{1/p} for S the sum of two independent geometric(q) variables on {1, 2, ...}.
double exact_gap_moment(double q, double p);

enum class RunStatus { pass, fail, inconclusive };
std::string to_string(RunStatus s);

struct AnchorParams {
  int cells = 256;
  DisorderLaw law = DisorderLaw::bernoulli(0.5);
  double gamma = std::numeric_limits<double>::quiet_NaN();  // NaN: law.upper_quartile()
  int samples = 10000;
  std::uint64_t seed = 1;
  int workers = 1;
  int bootstrap_resamples = 200;
  std::vector<double> ps{1, 2, 4, 8};

  double threshold() const;
  void validate() const;
};

struct AnchorMoment {
  double p;
  double estimate;
  double ci;
  double stderr_;
  double exact;
  double z;  // (estimate - exact) / stderr
};

struct AnchorReport {
  double gamma = 0.0;
  double q = 0.0;  // P[omega >= gamma]
  std::vector<GapSample> gaps;
  double censored_fraction = 0.0;
  std::vector<AnchorMoment> moments;
  bool linear_growth = false;   // M(p) <= 2 p M(1)
  bool matches_exact = false;   // every |z| <= 3
  RunStatus status = RunStatus::inconclusive;
  std::string reason;
};

// Minimum usable samples before the moment table is conclusive.
inline constexpr int kMinAnchorSamples = 30;

AnchorReport anchoring_experiment_1d(const AnchorParams& params);

}  // namespace landscape
