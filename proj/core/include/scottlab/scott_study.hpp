#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "scottlab/constants.hpp"
#include "scottlab/hydrogenic.hpp"
#include "scottlab/inequality_lab.hpp"
#include "scottlab/spectrum_store.hpp"

namespace scottlab {

// ---------------------------------------------------------------- form bound

// max eigenvalue of the pencil diag(U) v = mu C_{l,-gamma} v, where
// C_{l,-gamma} is the chandrasekhar kinetic term plus +gamma/r.
double form_bound_constant(const TestPotential& u, double gamma, int ell, const RadialGrid& grid);
// Same, memoized in the store.
double form_bound_constant(const TestPotential& u, double gamma, int ell, const RadialGrid& grid,
                           SpectrumStore& store);

struct FormBoundTrend {
  double coarse = 0.0;   // on grid
  double refined = 0.0;  // on grid.refined()
  // (refined - coarse) / coarse; a large positive drift flags a potential that
  // is not form bounded.
  double relative_drift() const { return coarse == 0.0 ? 0.0 : (refined - coarse) / coarse; }
};
FormBoundTrend form_bound_trend(const TestPotential& u, double gamma, int ell,
                                const RadialGrid& grid, SpectrumStore& store);

// ------------------------------------------------------------ scaling step

// (1+b lambda) / (1-b lambda) gamma
double scaled_coupling(double gamma, double b, double lambda);

// Matrix form: min eig[(H - lambda U) - (1 - b lambda)(K - gamma'/r)] with
// scale lambda * max U. Requires 0 < lambda <= t0/b.
CheckResult check_scaling_step(double gamma, int ell, const TestPotential& u, double lambda,
                               double b, const RadialGrid& grid);

// e_n(lambda) >= (1 - b lambda) e_n(gamma') for n <= n_max.
std::vector<CheckResult> check_scaling_corollary(double gamma, int ell, const TestPotential& u,
                                                 double lambda, double b, const RadialGrid& grid,
                                                 SpectrumStore& store, int n_max = 3);

// ---------------------------------------------------------------- majorant

struct MajorantCase {
  double gamma = 0.0;
  int ell = 0;
  int n = 0;
  TestPotential potential = TestPotential::exponential(1.0);
  double b = 0.0;
  double lambda = 0.0;
  double e0 = 0.0;
  double e_lambda = 0.0;
  double sharp_rhs = 0.0;  // m_tilde b |lambda| |e0|
  double paper_rhs = 0.0;  // M b |lambda| gamma^2 / (n+l+1)^2
};

MajorantCase make_majorant_case(double gamma, int ell, int n, const TestPotential& u, double b,
                                double lambda, double e0, double e_lambda,
                                const ConstantsBundle& constants);

struct MajorantChecks {
  CheckResult sharp;
  CheckResult paper;
};
MajorantChecks check_majorant(const MajorantCase& c, const Tolerances& tolerances = {});

// sum paper_rhs >= sum |e_lambda - e0| over the given cases.
CheckResult check_summability(std::span<const MajorantCase> cases, const std::string& label,
                              const Tolerances& tolerances = {});

// ------------------------------------------------------- Hellmann-Feynman

struct SlopeResult {
  std::vector<double> lambdas;
  std::vector<double> slopes;  // (e_n(0) - e_n(lambda)) / lambda
  double extrapolated = 0.0;   // polynomial extrapolation to lambda = 0
  double target = 0.0;         // <psi_n, U psi_n>
};

// Throws ConvergenceError naming lambda if state n at lambda is not the
// continuation of state n at 0 (largest overlap elsewhere).
SlopeResult hellmann_feynman_slope(double gamma, int ell, int n, const TestPotential& u,
                                   std::span<const double> lambdas, double b,
                                   const RadialGrid& grid, SpectrumStore& store);

CheckResult check_hellmann_feynman(const SlopeResult& slope, double gamma, int ell, int n,
                                   const TestPotential& u, double relative_tolerance = 1e-3);

// -------------------------------------------------------- linear response

struct LinearResponse {
  double lambda = 0.0;
  int states = 0;  // states summed (both spectra truncated alike)
  double lhs = 0.0;
  double rhs = 0.0;
  double tail_allowance = 0.0;
  double gap() const { return std::abs(lhs - rhs); }
};

// sum_{m >= first} 1/m^2
double inverse_square_tail(int first);

LinearResponse linear_response(double gamma, int ell, const TestPotential& u, double lambda,
                               int n_max, double b, const ConstantsBundle& constants,
                               const RadialGrid& grid, SpectrumStore& store);

// lhs >= rhs - tail (lambda > 0) or lhs <= rhs + tail (lambda < 0).
CheckResult check_linear_response(const LinearResponse& r, double gamma, int ell,
                                  const TestPotential& u);
// gap(lambda) / gap(lambda/2) >= min_ratio
CheckResult check_response_convergence(const LinearResponse& full, const LinearResponse& half,
                                       double gamma, int ell, const TestPotential& u,
                                       double min_ratio = 1.5);

// ------------------------------------------------------------ Scott filling

struct Level {
  int n = 0;
  int ell = 0;
  double energy = 0.0;
  double occupation = 0.0;  // up to 2l+1
};

// Aufbau: ascending energy, ties to lower l; the last level may be partial.
std::vector<Level> aufbau(std::span<const ChannelSpectrum> channels, double electrons);
// Electrons that can be placed without skipping an uncomputed level.
double filling_budget(std::span<const ChannelSpectrum> channels);

// Per-channel densities of a filled configuration (one profile per channel,
// channel order preserved; empty channels give zero profiles).
std::vector<DensityProfile> filled_channel_densities(std::span<const ChannelSpectrum> channels,
                                                     std::span<const Level> levels);

struct FillRow {
  double electrons = 0.0;
  std::string potential;
  double integral = 0.0;
  double increment = 0.0;  // against the previous fill count (0 for the first)
  double hydrogenic_integral = 0.0;
};

struct ScottTable {
  std::vector<FillRow> rows;
  std::vector<CheckResult> checks;  // increments positive and decreasing at the end
  double budget = 0.0;
};

ScottTable scott_density_convergence(double gamma, std::span<const double> fill_counts,
                                     int ell_max, std::span<const TestPotential> potentials,
                                     const RadialGrid& grid, SpectrumStore& store);

// ------------------------------------------------------ majorant study

struct MajorantStudyConfig {
  double gamma = 0.5;
  RadialGrid grid{0.35, 2399};  // r_max = 840
  std::vector<TestPotential> potentials{TestPotential::exponential(1.0),
                                        TestPotential::coulomb_tail(1.0)};
  // lambda = fraction * t0 / b
  std::vector<double> fractions{0.5, -0.5, 0.25, -0.25};
  int max_level = 6;          // n + l for the pointwise majorant checks
  int summability_level = 8;  // n + l for the summed comparison
  int scaling_n_max = 3;
  int trend_max_ell = 0;      // b refinement trend for l <= this (-1: none)
};

struct MajorantStudy {
  ConstantsBundle constants;
  std::vector<MajorantCase> cases;
  std::vector<CheckResult> checks;
  std::vector<std::pair<std::string, FormBoundTrend>> trends;
};

// c_emp comes from the unperturbed channels l <= summability_level.
MajorantStudy run_majorant_study(const MajorantStudyConfig& config, SpectrumStore& store);

}  // namespace scottlab
