#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "landscape/grid.hpp"

namespace landscape {

// Law F of the iid amplitudes omega_j. Values live in [0, 1], the law is not a
// point mass, and 0 is the infimum of its support.
class DisorderLaw {
 public:
  enum class Kind { bernoulli, uniform01, discrete_atoms };

  static DisorderLaw bernoulli(double q);
  static DisorderLaw uniform01();
  static DisorderLaw discrete_atoms(std::vector<double> values, std::vector<double> probs);

  Kind kind() const noexcept { return kind_; }
  double q() const noexcept { return q_; }
  const std::vector<double>& atoms() const noexcept { return values_; }
  const std::vector<double>& probs() const noexcept { return probs_; }

  // Throws ValidationError naming the violated invariant.
  void validate() const;

  // Inverse-CDF map of a uniform variate on [0, 1).
  double draw(double uniform) const noexcept;
  // P[omega < gamma] and P[omega >= gamma].
  double prob_below(double gamma) const noexcept;
  double prob_at_least(double gamma) const noexcept { return 1.0 - prob_below(gamma); }
  double mean() const noexcept;
  // Smallest positive t with P[omega >= t] >= 1/4.
  double upper_quartile() const noexcept;

  std::string describe() const;

  friend bool operator==(const DisorderLaw&, const DisorderLaw&) = default;

 private:
  DisorderLaw() = default;

  Kind kind_ = Kind::uniform01;
  double q_ = 0.0;
  std::vector<double> values_;
  std::vector<double> probs_;
};

struct OmegaField {
  Box box;
  std::vector<double> values;
  DisorderLaw law;
  std::uint64_t master_seed = 0;
  std::uint64_t sample_index = 0;

  double at(const Index3& site) const { return values[box.linear(site)]; }
  double max() const noexcept;
  // Copy with one site overwritten (used for the omega^{z,-} configuration).
  OmegaField with_site(const Index3& site, double value) const;
};

// phi(x) = exp(1 - 1 / (1 - |x/r|^2)) on |x| < r, zero elsewhere; phi(0) = 1.
struct BumpProfile {
  double radius = 0.1;

  double operator()(double r2) const noexcept;  // argument is |x|^2
};

// Mesh nodes per unit length needed to resolve the bump support.
inline constexpr int kMinBumpMesh = 20;

OmegaField sample_omega(const DisorderLaw& law, const Box& box, std::uint64_t master_seed,
                        std::uint64_t sample_index);

// Fresh independent draw at `site`; every other site is untouched.
OmegaField resample_site(const OmegaField& omega, const Index3& site,
                         std::uint64_t resample_seed);

// V(x) = sum_j omega_j phi(x - j) sampled at grid nodes.
ScalarField assemble_potential(const OmegaField& omega, const BumpProfile& bump,
                               const Grid& grid);

// OmegaField dump: one row per site (linear index, coordinates, value).
void write_omega_csv(const OmegaField& omega, const std::string& path);

}  // namespace landscape
