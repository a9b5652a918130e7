#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "scottlab/radial_operator.hpp"

namespace scottlab {

struct BoundState {
  int n = 0;
  double energy = 0.0;
  // Radial function u at the grid nodes, normalized so that sum u_i^2 h = 1.
  std::vector<double> samples;
  // Fraction of the norm inside r <= r_max / 2.
  double localization = 0.0;
  int nodes = 0;
  RadialGrid grid{1.0, 1};
};

struct ChannelSpectrum {
  ChannelSpec channel;
  RadialGrid grid{1.0, 1};
  KineticSymbol symbol = KineticSymbol::chandrasekhar();
  std::vector<BoundState> states;  // ascending energy

  ChannelSpectrum truncated(int n_max) const;
};

struct SpectrumOptions {
  double localization_threshold = 0.99;
  // Defaults to max(1e-6, 3 (pi / r_max)^2).
  std::optional<double> energy_floor;
  double degeneracy_tolerance = 1e-12;
};

double default_energy_floor(const RadialGrid& grid);

// All localized bound states of `op` (unbounded n_max).
ChannelSpectrum bound_states(const DiscretizedOperator& op, const SpectrumOptions& options = {});
// The lowest min(n_max + 1, available) localized bound states.
ChannelSpectrum bound_states(const DiscretizedOperator& op, int n_max,
                             const SpectrumOptions& options = {});

// A kinetic symbol applied through the centrifugal decomposition of a channel.
struct SpectralObservable {
  std::shared_ptr<const CentrifugalDecomposition> decomposition;
  KineticSymbol symbol;

  static SpectralObservable of(const RadialGrid& grid, int ell, const KineticSymbol& symbol);
};

// h * sum f(r_i) u_i^2 for node values f(r_i).
double quadratic_form(const RadialGrid& grid, std::span<const double> node_values,
                      std::span<const double> u);
// h * u^T f(L) u
double quadratic_form(const SpectralObservable& observable, std::span<const double> u);
// h * u^T v
double inner_product(const RadialGrid& grid, std::span<const double> u, std::span<const double> v);
double norm_squared(const RadialGrid& grid, std::span<const double> u);

double expectation(const BoundState& state, std::span<const double> node_values);
double expectation(const BoundState& state, const std::function<double(double)>& radial_function);
double expectation(const BoundState& state, const SpectralObservable& observable);

struct StateSplit {
  std::vector<double> low;   // momentum <= threshold
  std::vector<double> high;  // momentum > threshold
};

// Spectral projection onto |p| <= threshold and its complement, with |p| the
// square root of the channel's centrifugal Laplacian. low + high == samples.
StateSplit split_state(const BoundState& state, const CentrifugalDecomposition& decomposition,
                       double threshold);
StateSplit split_vector(std::span<const double> u, const CentrifugalDecomposition& decomposition,
                        double threshold);

}  // namespace scottlab
