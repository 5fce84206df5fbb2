#include "landscape/disorder.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>

#include <fmt/format.h>

#include "landscape/errors.hpp"
#include "landscape/rng.hpp"

namespace landscape {

DisorderLaw DisorderLaw::bernoulli(double q) {
  DisorderLaw law;
  law.kind_ = Kind::bernoulli;
  law.q_ = q;
  return law;
}

DisorderLaw DisorderLaw::uniform01() {
  DisorderLaw law;
  law.kind_ = Kind::uniform01;
  return law;
}

DisorderLaw DisorderLaw::discrete_atoms(std::vector<double> values, std::vector<double> probs) {
  DisorderLaw law;
  law.kind_ = Kind::discrete_atoms;
  std::vector<std::size_t> order(values.size());
  std::iota(order.begin(), order.end(), 0);
  if (values.size() == probs.size())
    std::sort(order.begin(), order.end(), [&](auto a, auto b) { return values[a] < values[b]; });
  for (auto i : order) {
    law.values_.push_back(values[i]);
    law.probs_.push_back(i < probs.size() ? probs[i] : 0.0);
  }
  if (values.size() != probs.size()) law.probs_.resize(probs.size());
  return law;
}

void DisorderLaw::validate() const {
  switch (kind_) {
    case Kind::uniform01:
      return;
    case Kind::bernoulli:
      if (!(q_ > 0.0 && q_ < 1.0)) throw ValidationError("law is a point mass (bernoulli q must lie in (0,1))");
      return;
    case Kind::discrete_atoms: {
      if (values_.size() != probs_.size() || values_.empty())
        throw ValidationError("discrete_atoms needs one probability per value");
      double total = 0.0;
      int positive = 0;
      for (std::size_t i = 0; i < values_.size(); ++i) {
        if (!(values_[i] >= 0.0 && values_[i] <= 1.0))
          throw ValidationError("discrete_atoms values must lie in [0,1]");
        if (!(probs_[i] >= 0.0)) throw ValidationError("discrete_atoms probabilities must be >= 0");
        total += probs_[i];
        if (probs_[i] > 0.0) ++positive;
      }
      if (std::abs(total - 1.0) > 1e-12) throw ValidationError("discrete_atoms probabilities must sum to 1");
      if (positive < 2) throw ValidationError("law is a point mass");
      if (!(values_.front() == 0.0 && probs_.front() > 0.0))
        throw ValidationError("the infimum of the support must be 0 (atom at 0 with positive mass)");
      return;
    }
  }
}

double DisorderLaw::draw(double u) const noexcept {
  switch (kind_) {
    case Kind::uniform01:
      return u;
    case Kind::bernoulli:
      return u < q_ ? 1.0 : 0.0;
    case Kind::discrete_atoms: {
      double acc = 0.0;
      for (std::size_t i = 0; i < values_.size(); ++i) {
        acc += probs_[i];
        if (u < acc) return values_[i];
      }
      return values_.back();
    }
  }
  return 0.0;
}

double DisorderLaw::prob_below(double gamma) const noexcept {
  switch (kind_) {
    case Kind::uniform01:
      return std::clamp(gamma, 0.0, 1.0);
    case Kind::bernoulli:
      return gamma <= 0.0 ? 0.0 : (gamma <= 1.0 ? 1.0 - q_ : 1.0);
    case Kind::discrete_atoms: {
      double p = 0.0;
      for (std::size_t i = 0; i < values_.size(); ++i)
        if (values_[i] < gamma) p += probs_[i];
      return std::min(p, 1.0);
    }
  }
  return 0.0;
}

double DisorderLaw::mean() const noexcept {
  switch (kind_) {
    case Kind::uniform01:
      return 0.5;
    case Kind::bernoulli:
      return q_;
    case Kind::discrete_atoms: {
      double m = 0.0;
      for (std::size_t i = 0; i < values_.size(); ++i) m += values_[i] * probs_[i];
      return m;
    }
  }
  return 0.0;
}

double DisorderLaw::upper_quartile() const noexcept {
  switch (kind_) {
    case Kind::uniform01:
      return 0.75;
    case Kind::bernoulli:
      return 1.0;
    case Kind::discrete_atoms: {
      // Largest atom t > 0 with P[omega >= t] >= 1/4, else the smallest positive atom.
      double best = 0.0;
      for (std::size_t i = 0; i < values_.size(); ++i) {
        if (values_[i] <= 0.0 || probs_[i] <= 0.0) continue;
        if (best == 0.0) best = values_[i];
        if (prob_at_least(values_[i]) >= 0.25) best = values_[i];
      }
      return best;
    }
  }
  return 0.0;
}

std::string DisorderLaw::describe() const {
  switch (kind_) {
    case Kind::uniform01:
      return "uniform01";
    case Kind::bernoulli:
      return fmt::format("bernoulli(q={})", q_);
    case Kind::discrete_atoms: {
      std::string s = "discrete_atoms(";
      for (std::size_t i = 0; i < values_.size(); ++i)
        s += fmt::format("{}{}:{}", i ? "," : "", values_[i], probs_[i]);
      return s + ")";
    }
  }
  return "?";
}

double OmegaField::max() const noexcept {
  return values.empty() ? 0.0 : *std::max_element(values.begin(), values.end());
}

OmegaField OmegaField::with_site(const Index3& site, double value) const {
  OmegaField out = *this;
  out.values[box.linear(site)] = value;
  return out;
}

double BumpProfile::operator()(double r2) const noexcept {
  const double s = r2 / (radius * radius);
  if (s >= 1.0) return 0.0;
  return std::exp(1.0 - 1.0 / (1.0 - s));
}

OmegaField sample_omega(const DisorderLaw& law, const Box& box, std::uint64_t master_seed,
                        std::uint64_t sample_index) {
  law.validate();
  if (box.size() == 0) throw ValidationError("empty box");
  OmegaField omega{box, std::vector<double>(box.size()), law, master_seed, sample_index};
  const auto n = static_cast<std::int64_t>(box.size());
#pragma omp parallel for if (n >= 65536) schedule(static)
  for (std::int64_t j = 0; j < n; ++j)
    omega.values[j] = law.draw(RandomStream::uniform_at(master_seed, StreamDomain::omega,
                                                        sample_index, static_cast<std::uint64_t>(j)));
  return omega;
}

OmegaField resample_site(const OmegaField& omega, const Index3& site, std::uint64_t resample_seed) {
  if (!omega.box.contains(site)) throw IndexError("resample site outside box");
  const std::size_t j = omega.box.linear(site);
  const std::uint64_t stream = splitmix64(omega.sample_index ^ splitmix64(resample_seed));
  OmegaField out = omega;
  out.values[j] = omega.law.draw(
      RandomStream::uniform_at(omega.master_seed, StreamDomain::resample, stream, j));
  return out;
}

ScalarField assemble_potential(const OmegaField& omega, const BumpProfile& bump, const Grid& grid) {
  if (!(grid.cell_box() == omega.box))
    throw ValidationError("grid cells must coincide with the omega box");
  if (grid.mesh() < kMinBumpMesh)
    throw ValidationError(fmt::format("mesh m={} cannot resolve the bump support (need m >= {})",
                                      grid.mesh(), kMinBumpMesh));
  ScalarField v(grid);
  const auto n = static_cast<std::int64_t>(grid.node_count());
#pragma omp parallel for if (n >= 65536) schedule(static)
  for (std::int64_t i = 0; i < n; ++i) {
    const Index3 c = grid.node_coords(static_cast<std::size_t>(i));
    const Index3 cell = grid.cell_of(static_cast<std::size_t>(i));
    // Nodes in cell z lie within 1/2 of z, and the bump radius is < 1/2, so
    // only the owning cell's site can contribute.
    double r2 = 0.0;
    for (int a = 0; a < grid.dim(); ++a) {
      const double dx = grid.position(c[a]) - cell[a];
      r2 += dx * dx;
    }
    const double phi = bump(r2);
    v[static_cast<std::size_t>(i)] = phi > 0.0 ? omega.values[omega.box.linear(cell)] * phi : 0.0;
  }
  return v;
}

void write_omega_csv(const OmegaField& omega, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ValidationError("cannot open " + path);
  out << "site,x0,x1,x2,omega\n";
  for (std::size_t j = 0; j < omega.values.size(); ++j) {
    const Index3 s = omega.box.site(j);
    out << fmt::format("{},{},{},{},{:.17g}\n", j, s[0], s[1], s[2], omega.values[j]);
  }
}

}  // namespace landscape
