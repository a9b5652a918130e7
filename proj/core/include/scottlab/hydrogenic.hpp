#pragma once

#include <optional>
#include <span>
#include <vector>

#include "scottlab/radial_operator.hpp"
#include "scottlab/spectrum.hpp"

namespace scottlab {

// rho(r) at the grid nodes, normalized so that 4 pi sum rho r^2 h is the
// number of electrons represented.
struct DensityProfile {
  RadialGrid grid{1.0, 1};
  std::vector<double> radii;
  std::vector<double> values;
  std::optional<int> ell;  // nullopt for a total density
  int n_max = 0;           // states per channel included minus one
  int ell_max = 0;         // highest channel included
  double gamma = 0.0;

  double mass() const;
};

// (2l+1) sum_n u_n(r)^2 / (4 pi r^2) over the states of an unperturbed spectrum.
DensityProfile channel_density(const ChannelSpectrum& spectrum);

// Pointwise sum over channel densities, in the order given.
DensityProfile total_density(std::span<const DensityProfile> profiles);

// 4 pi h sum rho(r_i) U(r_i) r_i^2
double integrate_against(const DensityProfile& density, const TestPotential& u);

}  // namespace scottlab
