#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "scottlab/constants.hpp"
#include "scottlab/radial_operator.hpp"
#include "scottlab/spectrum.hpp"
#include "scottlab/spectrum_store.hpp"

namespace scottlab {

enum class Relation { less_equal, greater_equal, equal };

struct CheckParameters {
  double gamma = 0.0;
  int ell = 0;
  int n = 0;
  std::string auxiliary;

  friend bool operator==(const CheckParameters&, const CheckParameters&) = default;
};

// margin = rhs - lhs (<=), lhs - rhs (>=) or |lhs - rhs| (identities).
// pass <=> margin >= -tolerance, or margin <= tolerance for identities.
struct CheckResult {
  std::string name;
  CheckParameters parameters;
  double lhs = 0.0;
  double rhs = 0.0;
  double margin = 0.0;
  double tolerance = 0.0;
  bool pass = false;
  Relation relation = Relation::less_equal;
  std::string note;

  friend bool operator==(const CheckResult&, const CheckResult&) = default;
};

struct Tolerances {
  double identity_relative = 5e-3;
  double inequality_relative = 1e-3;
};

CheckResult make_inequality(std::string name, CheckParameters parameters, double lhs, double rhs,
                            Relation relation, double tolerance);
// Tolerance inequality_relative * max(|lhs|, |rhs|).
CheckResult make_inequality(std::string name, CheckParameters parameters, double lhs, double rhs,
                            Relation relation = Relation::less_equal,
                            const Tolerances& tolerances = {});
// Tolerance identity_relative * |rhs|.
CheckResult make_identity(std::string name, CheckParameters parameters, double lhs, double rhs,
                          const Tolerances& tolerances = {});

// Amount by which a check misses its bound (0 when it passes).
double violation(const CheckResult& check);

bool check_order(const CheckResult& a, const CheckResult& b);
void sort_checks(std::vector<CheckResult>& checks);

struct GridInfo {
  std::string purpose;
  double gamma = 0.0;
  double spacing = 0.0;
  std::size_t count = 0;
  double r_max = 0.0;

  friend bool operator==(const GridInfo&, const GridInfo&) = default;
};

struct VerificationReport {
  std::vector<ConstantsBundle> constants;
  std::vector<GridInfo> grids;
  std::vector<CheckResult> checks;
  bool pass = true;

  std::size_t failures() const;
};

// -- checks on eigenstates of an unperturbed channel ------------------------
// The state is spectrum.states[index]; (gamma, l) come from the channel.

// <p^2/sqrt(p^2+1)> = <gamma/r> (schroedinger symbol: <p^2> = <gamma/r>)
CheckResult check_virial(const ChannelSpectrum& spectrum, std::size_t index,
                         const Tolerances& tolerances = {});

// <sqrt(p^2+1)-1> <= D <1-(p^2+1)^{-1/2}>
CheckResult check_momentum_bound(const ChannelSpectrum& spectrum, std::size_t index,
                                 const Tolerances& tolerances = {});

// Split at |p| = threshold: low-part bound, Kato step on the high part,
// Hardy cross term, collected bound.
std::vector<CheckResult> check_proof_chain(const ChannelSpectrum& spectrum, std::size_t index,
                                           double threshold = 1.0,
                                           const Tolerances& tolerances = {});

// <gamma/r> <= (D+1)|E|, and the rearranged form
// <p^2/sqrt(p^2+1)> >= (1 + 1/D) <sqrt(p^2+1)-1> when `rearranged`.
CheckResult check_coulomb_vs_energy(const ChannelSpectrum& spectrum, std::size_t index,
                                    const Tolerances& tolerances = {});
CheckResult check_coulomb_vs_energy_rearranged(const ChannelSpectrum& spectrum,
                                               std::size_t index,
                                               const Tolerances& tolerances = {});

// e_n(chandrasekhar) <= -gamma^2 / (2 (n+l+1)^2)
CheckResult check_below_nonrelativistic(const ChannelSpectrum& spectrum, std::size_t index,
                                        const Tolerances& tolerances = {});

// e_n(schroedinger) = -gamma^2 / (2 (n+l+1)^2), relative tolerance 1e-3.
CheckResult check_schroedinger_energy(const ChannelSpectrum& spectrum, std::size_t index,
                                      double relative_tolerance = 1e-3);

// -- structural inequalities on arbitrary vectors ---------------------------

// <u, r^{-1} u> <= (pi/2) <u, |p| u>
CheckResult check_kato(const RadialGrid& grid, std::span<const double> u, int ell,
                       CheckParameters parameters, const Tolerances& tolerances = {});
// min eig(|p| - (2/pi) r^{-1}) >= -tolerance
CheckResult check_kato_global(const RadialGrid& grid, int ell, double tolerance = 1e-3);
// ||r^{-1} u|| <= 2 || |p| u ||
CheckResult check_hardy(const RadialGrid& grid, std::span<const double> u, int ell,
                        CheckParameters parameters, const Tolerances& tolerances = {});

// Test vectors for the structural checks: white noise for even draws, random
// sums of smooth bumps vanishing at both walls for odd draws. Unit norm.
std::vector<std::vector<double>> random_test_vectors(const RadialGrid& grid, int count,
                                                     std::uint64_t seed);

// -- coupling dependence ----------------------------------------------------

// e_n(gamma') >= e_n(gamma) (gamma'/gamma)^{1+A} ((2/pi-gamma)/(2/pi-gamma'))^A,
// tolerance 1e-3 |e_n(gamma)|.
CheckResult check_coupling_bound(double gamma, double gamma_prime, int n,
                                 const ChannelSpectrum& at_gamma,
                                 const ChannelSpectrum& at_gamma_prime,
                                 double relative_tolerance = 1e-3);

// Log-derivative of |e_n| between consecutive couplings against
// (A+1)/kappa + A/(2/pi - kappa) at the midpoint. spectra[i] belongs to
// kappas[i]; the finite-difference slack is the local second difference.
std::vector<CheckResult> check_log_derivative(std::span<const double> kappas, int n,
                                              std::span<const ChannelSpectrum> spectra,
                                              const Tolerances& tolerances = {});

// -- suite ------------------------------------------------------------------

// Default verification grid: h = 0.05/gamma, r_max = 200/gamma.
RadialGrid default_grid(double gamma);

struct CouplingSuite {
  double gamma = 0.4;
  std::vector<double> gamma_primes{0.45, 0.5, 0.55, 0.6};
  std::vector<double> kappas{0.40, 0.45, 0.50, 0.55};
  int n_max = 2;
  int ell_max = 1;
  RadialGrid grid{0.1, 2499};  // r_max = 250
};

struct SuiteConfig {
  std::vector<double> gammas{0.3, 0.5, 0.6};
  int ell_max = 2;
  int n_max = 3;
  std::function<RadialGrid(double)> grid_for = default_grid;
  bool include_schroedinger = true;
  double momentum_threshold = 1.0;

  // structural checks (skipped when `gammas` is empty)
  RadialGrid structural_grid{0.1, 400};
  int random_vectors = 20;
  std::uint64_t seed = 0x5c077ab5eedULL;

  std::optional<CouplingSuite> coupling = CouplingSuite{};

  Tolerances tolerances;
  bool refine_failures = true;
  std::size_t max_refined_points = 8192;
};

// Runs every configured check, re-running failures once at half the grid
// spacing and annotating them. Results are sorted by name, then parameters.
VerificationReport run_suite(const SuiteConfig& config, SpectrumStore& store);

}  // namespace scottlab
