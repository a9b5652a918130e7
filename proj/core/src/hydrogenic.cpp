#include "scottlab/hydrogenic.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "scottlab/error.hpp"

namespace scottlab {

double DensityProfile::mass() const {
  double m = 0.0;
  const double h = grid.spacing();
  for (std::size_t i = 0; i < values.size(); ++i) m += values[i] * radii[i] * radii[i];
  return 4.0 * kPi * h * m;
}

DensityProfile channel_density(const ChannelSpectrum& spectrum) {
  if (spectrum.channel.perturbed()) {
    throw DomainError("hydrogenic densities are defined for unperturbed channels (lambda = 0)");
  }
  if (spectrum.states.empty()) throw DomainError("channel_density: empty spectrum");
  const RadialGrid& grid = spectrum.grid;
  const int ell = spectrum.channel.ell;
  DensityProfile p;
  p.grid = grid;
  p.radii = grid.nodes();
  p.values.assign(grid.count(), 0.0);
  p.ell = ell;
  p.ell_max = ell;
  p.n_max = static_cast<int>(spectrum.states.size()) - 1;
  p.gamma = spectrum.channel.gamma;
  for (const auto& s : spectrum.states) {
    for (std::size_t i = 0; i < p.values.size(); ++i) p.values[i] += s.samples[i] * s.samples[i];
  }
  const double multiplicity = 2.0 * ell + 1.0;
  for (std::size_t i = 0; i < p.values.size(); ++i) {
    const double r = p.radii[i];
    p.values[i] *= multiplicity / (4.0 * kPi * r * r);
  }
  return p;
}

DensityProfile total_density(std::span<const DensityProfile> profiles) {
  if (profiles.empty()) throw DomainError("total_density: no profiles");
  const auto& first = profiles.front();
  DensityProfile total;
  total.grid = first.grid;
  total.radii = first.radii;
  total.values.assign(first.values.size(), 0.0);
  total.gamma = first.gamma;
  total.n_max = 0;
  total.ell_max = 0;
  std::set<int> seen;
  for (const auto& p : profiles) {
    if (!(p.grid == first.grid)) throw GridMismatch("total_density: profiles on different grids");
    if (p.gamma != first.gamma) throw DomainError("total_density: profiles with different gamma");
    if (p.ell && !seen.insert(*p.ell).second) {
      throw DomainError("total_density: channel l=" + std::to_string(*p.ell) + " repeated");
    }
    for (std::size_t i = 0; i < total.values.size(); ++i) total.values[i] += p.values[i];
    total.n_max = std::max(total.n_max, p.n_max);
    total.ell_max = std::max(total.ell_max, p.ell_max);
  }
  return total;
}

double integrate_against(const DensityProfile& density, const TestPotential& u) {
  double s = 0.0;
  for (std::size_t i = 0; i < density.values.size(); ++i) {
    const double r = density.radii[i];
    const double value = u(r);
    if (!std::isfinite(value)) throw DomainError("test potential not finite at a grid node");
    s += density.values[i] * value * r * r;
  }
  return 4.0 * kPi * density.grid.spacing() * s;
}

}  // namespace scottlab
