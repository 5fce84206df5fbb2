#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <span>
#include <vector>

#include "landscape/rng.hpp"

namespace landscape {

double mean(std::span<const double> x);
// Unbiased sample variance; 0 for fewer than two values.
double variance(std::span<const double> x);
double standard_error(std::span<const double> x);
// Linear-interpolated quantile of an unsorted sample.
double quantile(std::vector<double> x, double q);

struct BootstrapResult {
  double estimate;  // statistic on the original sample
  double ci;        // half-width of the 95% percentile interval
  double stderr_;   // standard deviation of the replicates
};

// Percentile bootstrap over n sample rows. `stat` receives the (possibly
// repeated) row indices of one replicate. Replicate r draws from stream r of
// `seed`, so results do not depend on evaluation order.
template <class Stat>
BootstrapResult bootstrap(std::size_t n, Stat&& stat, std::uint64_t seed, int resamples = 200) {
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  const double estimate = stat(std::span<const std::size_t>(idx));
  if (n < 2 || resamples < 2) return {estimate, 0.0, 0.0};
  std::vector<double> reps(static_cast<std::size_t>(resamples));
  for (int r = 0; r < resamples; ++r) {
    RandomStream rng(seed, StreamDomain::bootstrap, static_cast<std::uint64_t>(r));
    for (auto& i : idx) i = rng.below(n);
    reps[static_cast<std::size_t>(r)] = stat(std::span<const std::size_t>(idx));
  }
  const double lo = quantile(reps, 0.025);
  const double hi = quantile(reps, 0.975);
  return {estimate, 0.5 * (hi - lo), std::sqrt(variance(reps))};
}

}  // namespace landscape
