#include "scottlab/spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "scottlab/error.hpp"

namespace scottlab {

namespace {

void require_grid(const RadialGrid& grid, std::span<const double> u) {
  if (u.size() != grid.count()) {
    throw GridMismatch("vector of size " + std::to_string(u.size()) + " does not live on grid " +
                       grid.describe());
  }
}

int count_nodes(std::span<const double> u) {
  double peak = 0.0;
  for (double x : u) peak = std::max(peak, std::abs(x));
  const double floor = 1e-4 * peak;
  int changes = 0;
  int last_sign = 0;
  for (double x : u) {
    if (std::abs(x) <= floor) continue;
    const int s = x > 0 ? 1 : -1;
    if (last_sign != 0 && s != last_sign) ++changes;
    last_sign = s;
  }
  return changes;
}

// Fix the sign so that the first non-negligible sample is positive.
void fix_sign(std::vector<double>& u) {
  double peak = 0.0;
  for (double x : u) peak = std::max(peak, std::abs(x));
  for (double x : u) {
    if (std::abs(x) > 1e-6 * peak) {
      if (x < 0) {
        for (double& y : u) y = -y;
      }
      return;
    }
  }
}

}  // namespace

ChannelSpectrum ChannelSpectrum::truncated(int n_max) const {
  ChannelSpectrum out{channel, grid, symbol, {}};
  const std::size_t keep =
      std::min(states.size(), static_cast<std::size_t>(std::max(n_max + 1, 0)));
  out.states.assign(states.begin(), states.begin() + static_cast<std::ptrdiff_t>(keep));
  return out;
}

double default_energy_floor(const RadialGrid& grid) {
  const double box = kPi / grid.r_max();
  return std::max(1e-6, 3.0 * box * box);
}

ChannelSpectrum bound_states(const DiscretizedOperator& op, const SpectrumOptions& options) {
  using Kind = KineticSymbol::Kind;
  if (op.symbol().kind() != Kind::chandrasekhar && op.symbol().kind() != Kind::schroedinger) {
    throw DomainError("bound_states needs a chandrasekhar or schroedinger operator, got " +
                      op.symbol().name());
  }
  const RadialGrid& grid = op.grid();
  const double floor = options.energy_floor.value_or(default_energy_floor(grid));
  const auto pairs = op.eigenpairs_below(-floor);
  const double inv_sqrt_h = 1.0 / std::sqrt(grid.spacing());
  const double half = 0.5 * grid.r_max();

  std::vector<BoundState> states;
  for (std::size_t k = 0; k < pairs.count(); ++k) {
    BoundState s;
    s.energy = pairs.eigenvalues[k];
    s.grid = grid;
    const auto v = pairs.vector(k);
    s.samples.assign(v.begin(), v.end());
    for (double& x : s.samples) x *= inv_sqrt_h;
    fix_sign(s.samples);
    double inside = 0.0;
    double total = 0.0;
    for (std::size_t i = 0; i < s.samples.size(); ++i) {
      const double w = s.samples[i] * s.samples[i] * grid.spacing();
      total += w;
      if (grid.node(i) <= half) inside += w;
    }
    s.localization = inside / total;
    if (s.localization < options.localization_threshold) continue;
    s.nodes = count_nodes(s.samples);
    states.push_back(std::move(s));
  }

  std::stable_sort(states.begin(), states.end(), [&](const BoundState& a, const BoundState& b) {
    if (std::abs(a.energy - b.energy) > options.degeneracy_tolerance) return a.energy < b.energy;
    return a.nodes < b.nodes;
  });
  for (std::size_t k = 0; k < states.size(); ++k) {
    states[k].n = static_cast<int>(k);
    if (k > 0 && !(states[k].energy > states[k - 1].energy - options.degeneracy_tolerance)) {
      throw Error("bound_states: energies not increasing in channel " + op.spec().describe());
    }
  }

  const auto& spec = op.spec();
  if (states.empty() && spec.sign == CoulombSign::attractive && spec.ell == 0 &&
      spec.gamma >= 0.3 && !spec.perturbed()) {
    throw Error("no bound state found for " + spec.describe() + " on grid " + grid.describe() +
                " (the Coulomb s-channel always binds; grid misconfigured)");
  }
  return ChannelSpectrum{spec, grid, op.symbol(), std::move(states)};
}

ChannelSpectrum bound_states(const DiscretizedOperator& op, int n_max,
                             const SpectrumOptions& options) {
  return bound_states(op, options).truncated(n_max);
}

SpectralObservable SpectralObservable::of(const RadialGrid& grid, int ell,
                                          const KineticSymbol& symbol) {
  return SpectralObservable{centrifugal_decomposition(grid, ell), symbol};
}

double quadratic_form(const RadialGrid& grid, std::span<const double> node_values,
                      std::span<const double> u) {
  require_grid(grid, u);
  require_grid(grid, node_values);
  double s = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) s += node_values[i] * u[i] * u[i];
  return s * grid.spacing();
}

double quadratic_form(const SpectralObservable& observable, std::span<const double> u) {
  const auto& d = *observable.decomposition;
  require_grid(d.grid, u);
  const auto c = d.spectrum.project(u);
  double s = 0.0;
  for (std::size_t k = 0; k < c.size(); ++k) {
    s += observable.symbol(std::max(d.spectrum.eigenvalues[k], 0.0)) * c[k] * c[k];
  }
  return s * d.grid.spacing();
}

double inner_product(const RadialGrid& grid, std::span<const double> u,
                     std::span<const double> v) {
  require_grid(grid, u);
  require_grid(grid, v);
  return std::inner_product(u.begin(), u.end(), v.begin(), 0.0) * grid.spacing();
}

double norm_squared(const RadialGrid& grid, std::span<const double> u) {
  return inner_product(grid, u, u);
}

double expectation(const BoundState& state, std::span<const double> node_values) {
  return quadratic_form(state.grid, node_values, state.samples);
}

double expectation(const BoundState& state, const std::function<double(double)>& radial_function) {
  std::vector<double> f(state.grid.count());
  for (std::size_t i = 0; i < f.size(); ++i) f[i] = radial_function(state.grid.node(i));
  return expectation(state, f);
}

double expectation(const BoundState& state, const SpectralObservable& observable) {
  if (!(observable.decomposition->grid == state.grid)) {
    throw GridMismatch("observable grid " + observable.decomposition->grid.describe() +
                       " differs from state grid " + state.grid.describe());
  }
  return quadratic_form(observable, state.samples);
}

StateSplit split_vector(std::span<const double> u, const CentrifugalDecomposition& decomposition,
                        double threshold) {
  if (!(threshold > 0.0)) throw DomainError("split threshold must be > 0");
  require_grid(decomposition.grid, u);
  const auto& d = decomposition.spectrum;
  const std::size_t n = d.dimension;
  // eigenvalues ascend, so the low-momentum modes are a prefix
  std::size_t low_modes = 0;
  while (low_modes < d.count() &&
         std::sqrt(std::max(d.eigenvalues[low_modes], 0.0)) <= threshold) {
    ++low_modes;
  }
  const auto c = d.project(u);
  const bool direct_low = low_modes <= d.count() - low_modes;
  const std::size_t first = direct_low ? 0 : low_modes;
  const std::size_t last = direct_low ? low_modes : d.count();
  std::vector<double> part(n, 0.0);
  for (std::size_t k = first; k < last; ++k) {
    const auto v = d.vector(k);
    for (std::size_t i = 0; i < n; ++i) part[i] += c[k] * v[i];
  }
  std::vector<double> rest(n);
  for (std::size_t i = 0; i < n; ++i) rest[i] = u[i] - part[i];
  if (direct_low) return StateSplit{std::move(part), std::move(rest)};
  return StateSplit{std::move(rest), std::move(part)};
}

StateSplit split_state(const BoundState& state, const CentrifugalDecomposition& decomposition,
                       double threshold) {
  if (!(decomposition.grid == state.grid)) {
    throw GridMismatch("decomposition grid differs from state grid");
  }
  return split_vector(state.samples, decomposition, threshold);
}

}  // namespace scottlab
