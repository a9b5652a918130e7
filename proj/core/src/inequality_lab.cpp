#include "scottlab/inequality_lab.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <random>
#include <sstream>
#include <tuple>

#include "scottlab/error.hpp"

namespace scottlab {

namespace {

std::string fmt(double x) {
  std::ostringstream os;
  os.precision(6);
  os << x;
  return os.str();
}

const BoundState& state_at(const ChannelSpectrum& spectrum, std::size_t index) {
  if (index >= spectrum.states.size()) {
    throw DomainError("state index " + std::to_string(index) + " not available in channel " +
                      spectrum.channel.describe() + " (" +
                      std::to_string(spectrum.states.size()) + " bound states)");
  }
  return spectrum.states[index];
}

void require_unperturbed(const ChannelSpectrum& spectrum, const char* check) {
  if (spectrum.channel.perturbed()) {
    throw DomainError(std::string(check) + " needs an unperturbed eigenstate (lambda = 0), got " +
                      spectrum.channel.describe());
  }
}

CheckParameters state_parameters(const ChannelSpectrum& spectrum, std::size_t index) {
  return CheckParameters{spectrum.channel.gamma, spectrum.channel.ell,
                         spectrum.states[index].n, ""};
}

double inverse_r_form(const RadialGrid& grid, std::span<const double> u,
                      std::span<const double> v) {
  double s = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) s += u[i] * v[i] / grid.node(i);
  return s * grid.spacing();
}

double inverse_r_squared_norm(const RadialGrid& grid, std::span<const double> u) {
  double s = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    const double r = grid.node(i);
    s += u[i] * u[i] / (r * r);
  }
  return std::sqrt(s * grid.spacing());
}

// h u^T L u for the tridiagonal centrifugal Laplacian.
double laplacian_form(const RadialGrid& grid, int ell, std::span<const double> u) {
  const auto t = build_centrifugal_laplacian(grid, ell);
  double s = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    s += t.diagonal[i] * u[i] * u[i];
    if (i + 1 < u.size()) s += 2.0 * t.off_diagonal[i] * u[i] * u[i + 1];
  }
  return s * grid.spacing();
}

double d_constant(double gamma) {
  return kCriticalCoupling * constant_a() / (kCriticalCoupling - gamma);
}

}  // namespace

// ------------------------------------------------------------ result helpers

CheckResult make_inequality(std::string name, CheckParameters parameters, double lhs, double rhs,
                            Relation relation, double tolerance) {
  CheckResult c;
  c.name = std::move(name);
  c.parameters = std::move(parameters);
  c.lhs = lhs;
  c.rhs = rhs;
  c.relation = relation;
  c.tolerance = tolerance;
  switch (relation) {
    case Relation::less_equal: c.margin = rhs - lhs; break;
    case Relation::greater_equal: c.margin = lhs - rhs; break;
    case Relation::equal: c.margin = std::abs(lhs - rhs); break;
  }
  c.pass = relation == Relation::equal ? c.margin <= tolerance : c.margin >= -tolerance;
  return c;
}

CheckResult make_inequality(std::string name, CheckParameters parameters, double lhs, double rhs,
                            Relation relation, const Tolerances& tolerances) {
  const double tol = tolerances.inequality_relative * std::max(std::abs(lhs), std::abs(rhs));
  return make_inequality(std::move(name), std::move(parameters), lhs, rhs, relation, tol);
}

CheckResult make_identity(std::string name, CheckParameters parameters, double lhs, double rhs,
                          const Tolerances& tolerances) {
  return make_inequality(std::move(name), std::move(parameters), lhs, rhs, Relation::equal,
                         tolerances.identity_relative * std::abs(rhs));
}

double violation(const CheckResult& check) {
  if (check.pass) return 0.0;
  return check.relation == Relation::equal ? check.margin : -check.margin;
}

bool check_order(const CheckResult& a, const CheckResult& b) {
  const auto& p = a.parameters;
  const auto& q = b.parameters;
  return std::tie(a.name, p.gamma, p.ell, p.n, p.auxiliary) <
         std::tie(b.name, q.gamma, q.ell, q.n, q.auxiliary);
}

void sort_checks(std::vector<CheckResult>& checks) {
  std::stable_sort(checks.begin(), checks.end(), check_order);
}

std::size_t VerificationReport::failures() const {
  return static_cast<std::size_t>(
      std::count_if(checks.begin(), checks.end(), [](const CheckResult& c) { return !c.pass; }));
}

// ------------------------------------------------------------ state checks

CheckResult check_virial(const ChannelSpectrum& spectrum, std::size_t index,
                         const Tolerances& tolerances) {
  require_unperturbed(spectrum, "check_virial");
  const auto& s = state_at(spectrum, index);
  const double gamma = spectrum.channel.gamma;
  const double coulomb = gamma * inverse_r_form(s.grid, s.samples, s.samples);
  auto params = state_parameters(spectrum, index);
  if (spectrum.symbol.kind() == KineticSymbol::Kind::schroedinger) {
    const double p2 = laplacian_form(s.grid, spectrum.channel.ell, s.samples);
    return make_identity("virial_schroedinger", params, p2, coulomb, tolerances);
  }
  const auto virial = SpectralObservable::of(s.grid, spectrum.channel.ell, KineticSymbol::virial());
  return make_identity("virial", params, expectation(s, virial), coulomb, tolerances);
}

CheckResult check_momentum_bound(const ChannelSpectrum& spectrum, std::size_t index,
                                 const Tolerances& tolerances) {
  const auto& s = state_at(spectrum, index);
  const int ell = spectrum.channel.ell;
  const double kinetic =
      expectation(s, SpectralObservable::of(s.grid, ell, KineticSymbol::chandrasekhar()));
  const double weight = expectation(s, SpectralObservable::of(s.grid, ell, KineticSymbol::weight()));
  return make_inequality("momentum_bound", state_parameters(spectrum, index), kinetic,
                         d_constant(spectrum.channel.gamma) * weight, Relation::less_equal,
                         tolerances);
}

std::vector<CheckResult> check_proof_chain(const ChannelSpectrum& spectrum, std::size_t index,
                                           double threshold, const Tolerances& tolerances) {
  require_unperturbed(spectrum, "check_proof_chain");
  const auto& s = state_at(spectrum, index);
  const RadialGrid& grid = s.grid;
  const int ell = spectrum.channel.ell;
  const double gamma = spectrum.channel.gamma;
  const auto decomposition = centrifugal_decomposition(grid, ell);
  const auto split = split_state(s, *decomposition, threshold);

  const SpectralObservable kinetic{decomposition, KineticSymbol::chandrasekhar()};
  const SpectralObservable weight{decomposition, KineticSymbol::weight()};
  const SpectralObservable massless{decomposition, KineticSymbol::massless()};
  const SpectralObservable momentum_squared{decomposition, KineticSymbol::schroedinger()};

  const double sqrt2 = std::sqrt(2.0);
  const double kato_factor = kCriticalCoupling / (kCriticalCoupling - gamma);
  auto params = state_parameters(spectrum, index);
  params.auxiliary = "threshold=" + fmt(threshold);

  std::vector<CheckResult> out;
  out.push_back(make_inequality("proof_chain_low", params, quadratic_form(kinetic, split.low),
                                sqrt2 * quadratic_form(weight, split.low), Relation::less_equal,
                                tolerances));

  const double high_coulomb = gamma * inverse_r_form(grid, split.high, split.high);
  out.push_back(make_inequality(
      "proof_chain_kato", params, quadratic_form(kinetic, split.high),
      kato_factor * (quadratic_form(massless, split.high) - high_coulomb), Relation::less_equal,
      tolerances));

  const double cross = inverse_r_form(grid, split.high, split.low);
  const double high_norm = std::sqrt(norm_squared(grid, split.high));
  // schroedinger symbol is s/2
  const double low_momentum = std::sqrt(2.0 * quadratic_form(momentum_squared, split.low));
  out.push_back(make_inequality("proof_chain_hardy", params, cross, 2.0 * high_norm * low_momentum,
                                Relation::less_equal, tolerances));

  const double low_coefficient =
      sqrt2 + sqrt2 * kCriticalCoupling * gamma / ((sqrt2 - 1.0) * (kCriticalCoupling - gamma));
  const double high_coefficient = kato_factor * (2.0 + sqrt2 * gamma / (sqrt2 - 1.0));
  out.push_back(make_inequality("proof_chain_collected", params, expectation(s, kinetic),
                                low_coefficient * quadratic_form(weight, split.low) +
                                    high_coefficient * quadratic_form(weight, split.high),
                                Relation::less_equal, tolerances));
  return out;
}

CheckResult check_coulomb_vs_energy(const ChannelSpectrum& spectrum, std::size_t index,
                                    const Tolerances& tolerances) {
  require_unperturbed(spectrum, "check_coulomb_vs_energy");
  const auto& s = state_at(spectrum, index);
  const double gamma = spectrum.channel.gamma;
  const double coulomb = gamma * inverse_r_form(s.grid, s.samples, s.samples);
  return make_inequality("coulomb_vs_energy", state_parameters(spectrum, index), coulomb,
                         (d_constant(gamma) + 1.0) * std::abs(s.energy), Relation::less_equal,
                         tolerances);
}

CheckResult check_coulomb_vs_energy_rearranged(const ChannelSpectrum& spectrum,
                                               std::size_t index,
                                               const Tolerances& tolerances) {
  require_unperturbed(spectrum, "check_coulomb_vs_energy_rearranged");
  const auto& s = state_at(spectrum, index);
  const int ell = spectrum.channel.ell;
  const double d = d_constant(spectrum.channel.gamma);
  const double virial = expectation(s, SpectralObservable::of(s.grid, ell, KineticSymbol::virial()));
  const double kinetic =
      expectation(s, SpectralObservable::of(s.grid, ell, KineticSymbol::chandrasekhar()));
  return make_inequality("coulomb_vs_energy_rearranged", state_parameters(spectrum, index), virial,
                         (1.0 + 1.0 / d) * kinetic, Relation::greater_equal, tolerances);
}

CheckResult check_below_nonrelativistic(const ChannelSpectrum& spectrum, std::size_t index,
                                        const Tolerances& tolerances) {
  require_unperturbed(spectrum, "check_below_nonrelativistic");
  const auto& s = state_at(spectrum, index);
  return make_inequality("below_nonrelativistic", state_parameters(spectrum, index), s.energy,
                         schroedinger_energy(spectrum.channel.gamma, s.n, spectrum.channel.ell),
                         Relation::less_equal, tolerances);
}

CheckResult check_schroedinger_energy(const ChannelSpectrum& spectrum, std::size_t index,
                                      double relative_tolerance) {
  require_unperturbed(spectrum, "check_schroedinger_energy");
  const auto& s = state_at(spectrum, index);
  const double exact = schroedinger_energy(spectrum.channel.gamma, s.n, spectrum.channel.ell);
  return make_inequality("schroedinger_energy", state_parameters(spectrum, index), s.energy, exact,
                         Relation::equal, relative_tolerance * std::abs(exact));
}

// ------------------------------------------------------- structural checks

CheckResult check_kato(const RadialGrid& grid, std::span<const double> u, int ell,
                       CheckParameters parameters, const Tolerances& tolerances) {
  const auto massless = SpectralObservable::of(grid, ell, KineticSymbol::massless());
  parameters.ell = ell;
  return make_inequality("kato", std::move(parameters), inverse_r_form(grid, u, u),
                         0.5 * kPi * quadratic_form(massless, u), Relation::less_equal,
                         tolerances);
}

CheckResult check_kato_global(const RadialGrid& grid, int ell, double tolerance) {
  const auto decomposition = centrifugal_decomposition(grid, ell);
  auto m = build_kinetic(decomposition->spectrum, KineticSymbol::massless());
  std::vector<double> coulomb(grid.count());
  for (std::size_t i = 0; i < coulomb.size(); ++i) coulomb[i] = -kCriticalCoupling / grid.node(i);
  m.add_to_diagonal(coulomb);
  CheckParameters params{kCriticalCoupling, ell, 0, "grid " + grid.describe()};
  return make_inequality("kato_global", params, 0.0, linalg::min_eigenvalue(m),
                         Relation::less_equal, tolerance);
}

CheckResult check_hardy(const RadialGrid& grid, std::span<const double> u, int ell,
                        CheckParameters parameters, const Tolerances& tolerances) {
  const auto p2 = SpectralObservable::of(grid, ell, KineticSymbol::schroedinger());
  parameters.ell = ell;
  const double momentum = std::sqrt(2.0 * quadratic_form(p2, u));
  return make_inequality("hardy", std::move(parameters), inverse_r_squared_norm(grid, u),
                         2.0 * momentum, Relation::less_equal, tolerances);
}

std::vector<std::vector<double>> random_test_vectors(const RadialGrid& grid, int count,
                                                     std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  std::uniform_real_distribution<double> uniform;
  const std::size_t n = grid.count();
  const double r_max = grid.r_max();
  std::vector<std::vector<double>> out;
  for (int k = 0; k < count; ++k) {
    std::vector<double> u(n, 0.0);
    if (k % 2 == 0) {
      for (double& x : u) x = normal(rng);
    } else {
      for (int bump = 0; bump < 3; ++bump) {
        const double amplitude = normal(rng);
        const double centre = (0.02 + 0.6 * uniform(rng)) * r_max;
        const double width = (0.005 + 0.1 * uniform(rng)) * r_max;
        for (std::size_t i = 0; i < n; ++i) {
          const double r = grid.node(i);
          const double z = (r - centre) / width;
          u[i] += amplitude * std::exp(-0.5 * z * z) * r * (r_max - r) / (r_max * r_max);
        }
      }
    }
    const double norm = std::sqrt(norm_squared(grid, u));
    for (double& x : u) x /= norm;
    out.push_back(std::move(u));
  }
  return out;
}

// --------------------------------------------------------- coupling checks

CheckResult check_coupling_bound(double gamma, double gamma_prime, int n,
                                 const ChannelSpectrum& at_gamma,
                                 const ChannelSpectrum& at_gamma_prime,
                                 double relative_tolerance) {
  if (!(gamma <= gamma_prime)) throw DomainError("check_coupling_bound needs gamma <= gamma'");
  if (!(at_gamma.grid == at_gamma_prime.grid)) {
    throw GridMismatch("check_coupling_bound: spectra on different grids");
  }
  if (at_gamma.channel.gamma != gamma || at_gamma_prime.channel.gamma != gamma_prime) {
    throw DomainError("check_coupling_bound: spectra do not match the couplings");
  }
  if (at_gamma.channel.ell != at_gamma_prime.channel.ell) {
    throw DomainError("check_coupling_bound: spectra from different channels");
  }
  (void)t0(gamma_prime);  // domain check on gamma'
  const double a = constant_a();
  const double e = state_at(at_gamma, static_cast<std::size_t>(n)).energy;
  const double e_prime = state_at(at_gamma_prime, static_cast<std::size_t>(n)).energy;
  const double factor = std::pow(gamma_prime / gamma, 1.0 + a) *
                        std::pow((kCriticalCoupling - gamma) / (kCriticalCoupling - gamma_prime), a);
  CheckParameters params{gamma, at_gamma.channel.ell, n, "gamma'=" + fmt(gamma_prime)};
  return make_inequality("coupling_bound", params, e_prime, e * factor, Relation::greater_equal,
                         relative_tolerance * std::abs(e));
}

std::vector<CheckResult> check_log_derivative(std::span<const double> kappas, int n,
                                              std::span<const ChannelSpectrum> spectra,
                                              const Tolerances& tolerances) {
  if (kappas.size() != spectra.size()) {
    throw DomainError("check_log_derivative: one spectrum per coupling required");
  }
  const std::size_t m = kappas.size();
  std::vector<double> g(m);
  for (std::size_t i = 0; i < m; ++i) {
    if (spectra[i].channel.gamma != kappas[i]) {
      throw DomainError("check_log_derivative: spectrum coupling does not match the kappa grid");
    }
    if (i > 0 && !(kappas[i] > kappas[i - 1])) {
      throw DomainError("check_log_derivative: kappa grid must increase");
    }
    if (i > 0 && !(spectra[i].grid == spectra[0].grid)) {
      throw GridMismatch("check_log_derivative: spectra on different grids");
    }
    g[i] = std::log(std::abs(state_at(spectra[i], static_cast<std::size_t>(n)).energy));
  }
  const double a = constant_a();
  std::vector<CheckResult> out;
  for (std::size_t i = 0; i + 1 < m; ++i) {
    const double step = kappas[i + 1] - kappas[i];
    const double slope = (g[i + 1] - g[i]) / step;
    const double mid = 0.5 * (kappas[i] + kappas[i + 1]);
    const double bound = (a + 1.0) / mid + a / (kCriticalCoupling - mid);
    double slack = 0.0;
    if (m >= 3) {
      const std::size_t j = std::min(i, m - 3);
      const double d1 = (g[j + 1] - g[j]) / (kappas[j + 1] - kappas[j]);
      const double d2 = (g[j + 2] - g[j + 1]) / (kappas[j + 2] - kappas[j + 1]);
      slack = std::abs(2.0 * (d2 - d1) / (kappas[j + 2] - kappas[j])) * step;
    }
    CheckParameters params{mid, spectra[i].channel.ell, n,
                           "kappa=[" + fmt(kappas[i]) + "," + fmt(kappas[i + 1]) + "]"};
    const double tol =
        tolerances.inequality_relative * std::max(std::abs(slope), std::abs(bound)) + slack;
    out.push_back(
        make_inequality("log_derivative", params, slope, bound, Relation::less_equal, tol));
  }
  return out;
}

// ------------------------------------------------------------------- suite

RadialGrid default_grid(double gamma) {
  ChannelSpec{gamma, 0, 0.0, std::nullopt, CoulombSign::attractive}.validate();
  return RadialGrid(0.05 / gamma, 3999);
}

namespace {

const ChannelSpectrum truncated_spectrum(SpectrumStore& store, const RadialGrid& grid,
                                         double gamma, int ell, const KineticSymbol& symbol,
                                         int n_max) {
  ChannelSpec spec;
  spec.gamma = gamma;
  spec.ell = ell;
  return store.spectrum(grid, spec, symbol)->truncated(n_max);
}

CheckResult state_count_check(const ChannelSpectrum& spectrum, int wanted) {
  CheckParameters params{spectrum.channel.gamma, spectrum.channel.ell, wanted - 1,
                         spectrum.symbol.name()};
  return make_inequality("bound_state_count", params,
                         static_cast<double>(spectrum.states.size()),
                         static_cast<double>(wanted), Relation::greater_equal, 0.0);
}

std::vector<CheckResult> channel_checks(SpectrumStore& store, const SuiteConfig& config,
                                        const RadialGrid& grid, double gamma, int ell) {
  std::vector<CheckResult> out;
  const auto chandra =
      truncated_spectrum(store, grid, gamma, ell, KineticSymbol::chandrasekhar(), config.n_max);
  if (static_cast<int>(chandra.states.size()) < config.n_max + 1) {
    out.push_back(state_count_check(chandra, config.n_max + 1));
  }
  const auto& tol = config.tolerances;
  for (std::size_t k = 0; k < chandra.states.size(); ++k) {
    out.push_back(check_virial(chandra, k, tol));
    out.push_back(check_momentum_bound(chandra, k, tol));
    for (auto& c : check_proof_chain(chandra, k, config.momentum_threshold, tol)) {
      out.push_back(std::move(c));
    }
    out.push_back(check_coulomb_vs_energy(chandra, k, tol));
    out.push_back(check_coulomb_vs_energy_rearranged(chandra, k, tol));
    out.push_back(check_below_nonrelativistic(chandra, k, tol));
    const auto params = state_parameters(chandra, k);
    auto kato = check_kato(grid, chandra.states[k].samples, ell, params, tol);
    kato.parameters.auxiliary = "eigenstate";
    out.push_back(std::move(kato));
    auto hardy = check_hardy(grid, chandra.states[k].samples, ell, params, tol);
    hardy.parameters.auxiliary = "eigenstate";
    out.push_back(std::move(hardy));
  }
  if (config.include_schroedinger) {
    const auto schro =
        truncated_spectrum(store, grid, gamma, ell, KineticSymbol::schroedinger(), config.n_max);
    if (static_cast<int>(schro.states.size()) < config.n_max + 1) {
      out.push_back(state_count_check(schro, config.n_max + 1));
    }
    for (std::size_t k = 0; k < schro.states.size(); ++k) {
      out.push_back(check_schroedinger_energy(schro, k));
      out.push_back(check_virial(schro, k, tol));
    }
  }
  return out;
}

std::vector<CheckResult> coupling_checks(SpectrumStore& store, const CouplingSuite& suite,
                                         const RadialGrid& grid, const Tolerances& tol) {
  std::vector<CheckResult> out;
  auto get = [&](double gamma, int ell) {
    return truncated_spectrum(store, grid, gamma, ell, KineticSymbol::chandrasekhar(),
                              suite.n_max);
  };
  for (int ell = 0; ell <= suite.ell_max; ++ell) {
    const auto base = get(suite.gamma, ell);
    for (double gp : suite.gamma_primes) {
      const auto other = get(gp, ell);
      for (int n = 0; n <= suite.n_max; ++n) {
        if (static_cast<std::size_t>(n) >= base.states.size() ||
            static_cast<std::size_t>(n) >= other.states.size()) {
          out.push_back(state_count_check(
              base.states.size() < other.states.size() ? base : other, n + 1));
          continue;
        }
        out.push_back(check_coupling_bound(suite.gamma, gp, n, base, other));
      }
    }
    if (suite.kappas.size() >= 2) {
      std::vector<ChannelSpectrum> spectra;
      for (double k : suite.kappas) spectra.push_back(get(k, ell));
      std::size_t available = spectra.front().states.size();
      for (const auto& s : spectra) available = std::min(available, s.states.size());
      for (int n = 0; n <= suite.n_max && static_cast<std::size_t>(n) < available; ++n) {
        for (auto& c : check_log_derivative(suite.kappas, n, spectra, tol)) out.push_back(c);
      }
    }
  }
  return out;
}

std::vector<CheckResult> structural_checks(const SuiteConfig& config) {
  std::vector<CheckResult> out;
  const auto& grid = config.structural_grid;
  const auto vectors = random_test_vectors(grid, config.random_vectors, config.seed);
  for (int ell = 0; ell <= config.ell_max; ++ell) {
    out.push_back(check_kato_global(grid, ell));
    for (std::size_t k = 0; k < vectors.size(); ++k) {
      CheckParameters params{0.0, ell, static_cast<int>(k), "random"};
      out.push_back(check_kato(grid, vectors[k], ell, params, config.tolerances));
      out.push_back(check_hardy(grid, vectors[k], ell, params, config.tolerances));
    }
  }
  return out;
}

template <typename F>
auto with_context(const std::string& context, F&& f) {
  try {
    return f();
  } catch (const Error& e) {
    throw Error(context + ": " + e.what());
  }
}

struct CheckKey {
  std::string name;
  double gamma;
  int ell;
  int n;
  std::string auxiliary;
  friend auto operator<=>(const CheckKey&, const CheckKey&) = default;
};

CheckKey key_of(const CheckResult& c) {
  return {c.name, c.parameters.gamma, c.parameters.ell, c.parameters.n, c.parameters.auxiliary};
}

// Compares failing checks against their values on a refined grid.
void annotate_refinement(std::vector<CheckResult>& coarse, const std::vector<CheckResult>& fine,
                         const RadialGrid& fine_grid) {
  std::map<CheckKey, const CheckResult*> index;
  for (const auto& c : fine) index.emplace(key_of(c), &c);
  for (auto& c : coarse) {
    if (c.pass) continue;
    // the refined grid describes itself; grid-dependent auxiliaries do not match
    auto it = index.find(key_of(c));
    if (it == index.end()) {
      c.note = "refinement at " + fine_grid.describe() + " did not reproduce this check";
      continue;
    }
    const CheckResult& f = *it->second;
    const double before = violation(c);
    const double after = violation(f);
    std::ostringstream os;
    os.precision(6);
    os << "at " << fine_grid.describe() << ": margin " << f.margin
       << (f.pass ? " (passes)" : " (fails)") << "; ";
    if (f.pass || after <= 0.5 * before) {
      os << "discretization artifact";
    } else {
      os << "refinement-stable violation";
    }
    c.note = os.str();
  }
}

bool any_failure(const std::vector<CheckResult>& checks) {
  return std::any_of(checks.begin(), checks.end(), [](const CheckResult& c) { return !c.pass; });
}

}  // namespace

VerificationReport run_suite(const SuiteConfig& config, SpectrumStore& store) {
  VerificationReport report;
  auto refine = [&](std::vector<CheckResult>& checks, const RadialGrid& grid, double gamma,
                    const std::string& purpose, auto&& recompute) {
    if (!config.refine_failures || !any_failure(checks)) return;
    const auto fine = grid.refined();
    if (fine.count() > config.max_refined_points) {
      for (auto& c : checks) {
        if (!c.pass) c.note = "refinement skipped: " + fine.describe() + " exceeds the point cap";
      }
      return;
    }
    report.grids.push_back({purpose + "_refined", gamma, fine.spacing(), fine.count(),
                            fine.r_max()});
    annotate_refinement(checks, recompute(fine), fine);
  };

  for (double gamma : config.gammas) {
    const RadialGrid grid = config.grid_for(gamma);
    report.grids.push_back({"channel", gamma, grid.spacing(), grid.count(), grid.r_max()});
    std::vector<ChannelSpectrum> relativistic;
    for (int ell = 0; ell <= config.ell_max; ++ell) {
      const std::string context = "gamma=" + fmt(gamma) + ", l=" + std::to_string(ell);
      auto checks = with_context(context, [&] { return channel_checks(store, config, grid, gamma, ell); });
      with_context(context + " (refined)", [&] {
        refine(checks, grid, gamma, "channel",
               [&](const RadialGrid& g) { return channel_checks(store, config, g, gamma, ell); });
        return 0;
      });
      report.checks.insert(report.checks.end(), checks.begin(), checks.end());
      relativistic.push_back(truncated_spectrum(store, grid, gamma, ell,
                                                KineticSymbol::chandrasekhar(), config.n_max));
    }
    bool any_state = false;
    for (const auto& s : relativistic) any_state = any_state || !s.states.empty();
    report.constants.push_back(
        make_constants(gamma, any_state ? empirical_c_gamma(relativistic, gamma) : 0.0));
  }

  if (!config.gammas.empty()) {
    const auto& g = config.structural_grid;
    report.grids.push_back({"structural", 0.0, g.spacing(), g.count(), g.r_max()});
    auto checks = with_context("structural checks", [&] { return structural_checks(config); });
    for (auto& c : checks) {
      if (!c.pass) c.note = "structural check on a fixed vector; no refinement";
    }
    report.checks.insert(report.checks.end(), checks.begin(), checks.end());
  }

  if (config.coupling) {
    const auto& suite = *config.coupling;
    const auto& g = suite.grid;
    report.grids.push_back({"coupling", suite.gamma, g.spacing(), g.count(), g.r_max()});
    auto checks = with_context("coupling checks", [&] {
      return coupling_checks(store, suite, g, config.tolerances);
    });
    with_context("coupling checks (refined)", [&] {
      refine(checks, g, suite.gamma, "coupling", [&](const RadialGrid& fine) {
        return coupling_checks(store, suite, fine, config.tolerances);
      });
      return 0;
    });
    report.checks.insert(report.checks.end(), checks.begin(), checks.end());
  }

  sort_checks(report.checks);
  report.pass = !any_failure(report.checks);
  return report;
}

}  // namespace scottlab
