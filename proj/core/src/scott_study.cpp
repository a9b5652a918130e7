#include "scottlab/scott_study.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <boost/math/special_functions/trigamma.hpp>

#include "scottlab/error.hpp"

namespace scottlab {

namespace {

std::string fmt(double x) {
  std::ostringstream os;
  os.precision(6);
  os << x;
  return os.str();
}

std::string fmt17(double x) {
  std::ostringstream os;
  os.precision(17);
  os << x;
  return os.str();
}

ChannelSpec unperturbed(double gamma, int ell) {
  ChannelSpec s;
  s.gamma = gamma;
  s.ell = ell;
  return s;
}

ChannelSpec perturbed_spec(double gamma, int ell, const TestPotential& u, double lambda) {
  ChannelSpec s = unperturbed(gamma, ell);
  if (lambda != 0.0) {
    s.lambda = lambda;
    s.potential = u;
  }
  return s;
}

std::shared_ptr<const ChannelSpectrum> chandrasekhar_spectrum(SpectrumStore& store,
                                                              const RadialGrid& grid,
                                                              const ChannelSpec& spec) {
  return store.spectrum(grid, spec, KineticSymbol::chandrasekhar());
}

double max_on_grid(const TestPotential& u, const RadialGrid& grid) {
  const auto v = u.sample(grid);
  return v.empty() ? 0.0 : *std::max_element(v.begin(), v.end());
}

void require_lemma_range(double lambda, double b, double gamma, const char* what) {
  const double limit = t0(gamma) / b;
  if (!(std::abs(lambda) <= limit * (1.0 + 1e-12))) {
    throw DomainError(std::string(what) + ": |lambda| = " + fmt17(std::abs(lambda)) +
                      " exceeds t0/b = " + fmt17(limit));
  }
}

CheckResult missing_state(const std::string& name, double gamma, int ell, int n,
                          const std::string& aux) {
  return make_inequality(name + "_state_missing", {gamma, ell, n, aux}, 0.0, 1.0,
                         Relation::greater_equal, 0.0);
}

}  // namespace

// ---------------------------------------------------------------- form bound

double form_bound_constant(const TestPotential& u, double gamma, int ell,
                           const RadialGrid& grid) {
  ChannelSpec spec = unperturbed(gamma, ell);
  spec.sign = CoulombSign::repulsive;
  const auto op = assemble_channel_operator(spec, grid, KineticSymbol::chandrasekhar());
  const auto values = u.sample(grid);
  if (std::all_of(values.begin(), values.end(), [](double x) { return x == 0.0; })) return 0.0;
  return linalg::generalized_max_eigenvalue(linalg::SymmetricMatrix::diagonal(values),
                                            op.matrix());
}

double form_bound_constant(const TestPotential& u, double gamma, int ell, const RadialGrid& grid,
                           SpectrumStore& store) {
  const std::string key = "form_bound|" + grid.describe() + "|gamma=" + fmt17(gamma) +
                          "|ell=" + std::to_string(ell) + "|U=" + u.to_string();
  return store.scalar(key, [&] { return form_bound_constant(u, gamma, ell, grid); });
}

FormBoundTrend form_bound_trend(const TestPotential& u, double gamma, int ell,
                                const RadialGrid& grid, SpectrumStore& store) {
  return {form_bound_constant(u, gamma, ell, grid, store),
          form_bound_constant(u, gamma, ell, grid.refined(), store)};
}

// ------------------------------------------------------------ scaling step

double scaled_coupling(double gamma, double b, double lambda) {
  return gamma * (1.0 + b * lambda) / (1.0 - b * lambda);
}

CheckResult check_scaling_step(double gamma, int ell, const TestPotential& u, double lambda,
                               double b, const RadialGrid& grid) {
  if (!(lambda > 0.0)) throw DomainError("check_scaling_step needs lambda > 0");
  require_lemma_range(lambda, b, gamma, "check_scaling_step");
  const double gamma_prime = scaled_coupling(gamma, b, lambda);
  const auto symbol = KineticSymbol::chandrasekhar();
  const auto lhs = assemble_channel_operator(perturbed_spec(gamma, ell, u, lambda), grid, symbol);
  const auto rhs = assemble_channel_operator(unperturbed(gamma_prime, ell), grid, symbol);
  auto difference = lhs.matrix();
  difference.add_scaled(rhs.matrix(), -(1.0 - b * lambda));
  const double scale = lambda * max_on_grid(u, grid);
  CheckParameters params{gamma, ell, 0, "U=" + u.to_string() + ",lambda=" + fmt(lambda)};
  return make_inequality("scaling_step", params, 0.0, linalg::min_eigenvalue(difference),
                         Relation::less_equal, 1e-3 * scale);
}

std::vector<CheckResult> check_scaling_corollary(double gamma, int ell, const TestPotential& u,
                                                 double lambda, double b, const RadialGrid& grid,
                                                 SpectrumStore& store, int n_max) {
  if (!(lambda > 0.0)) throw DomainError("check_scaling_corollary needs lambda > 0");
  require_lemma_range(lambda, b, gamma, "check_scaling_corollary");
  const double gamma_prime = scaled_coupling(gamma, b, lambda);
  const auto perturbed = chandrasekhar_spectrum(store, grid, perturbed_spec(gamma, ell, u, lambda));
  const auto scaled = chandrasekhar_spectrum(store, grid, unperturbed(gamma_prime, ell));
  std::vector<CheckResult> out;
  const std::string aux = "U=" + u.to_string() + ",lambda=" + fmt(lambda);
  for (int n = 0; n <= n_max; ++n) {
    const auto k = static_cast<std::size_t>(n);
    if (k >= perturbed->states.size() || k >= scaled->states.size()) {
      out.push_back(missing_state("scaling_corollary", gamma, ell, n, aux));
      continue;
    }
    out.push_back(make_inequality("scaling_corollary", {gamma, ell, n, aux},
                                  perturbed->states[k].energy,
                                  (1.0 - b * lambda) * scaled->states[k].energy,
                                  Relation::greater_equal));
  }
  return out;
}

// ---------------------------------------------------------------- majorant

MajorantCase make_majorant_case(double gamma, int ell, int n, const TestPotential& u, double b,
                                double lambda, double e0, double e_lambda,
                                const ConstantsBundle& constants) {
  if (b > 0.0) require_lemma_range(lambda, b, gamma, "majorant case");
  MajorantCase c;
  c.gamma = gamma;
  c.ell = ell;
  c.n = n;
  c.potential = u;
  c.b = b;
  c.lambda = lambda;
  c.e0 = e0;
  c.e_lambda = e_lambda;
  const double principal = n + ell + 1.0;
  c.sharp_rhs = constants.m_tilde * b * std::abs(lambda) * std::abs(e0);
  c.paper_rhs = constants.m * b * std::abs(lambda) * gamma * gamma / (principal * principal);
  return c;
}

MajorantChecks check_majorant(const MajorantCase& c, const Tolerances& tolerances) {
  const CheckParameters params{c.gamma, c.ell, c.n,
                               "U=" + c.potential.to_string() + ",lambda=" + fmt(c.lambda)};
  const double shift = std::abs(c.e_lambda - c.e0);
  return {make_inequality("majorant_sharp", params, shift, c.sharp_rhs, Relation::less_equal,
                          tolerances),
          make_inequality("majorant_paper", params, shift, c.paper_rhs, Relation::less_equal,
                          tolerances)};
}

CheckResult check_summability(std::span<const MajorantCase> cases, const std::string& label,
                              const Tolerances& tolerances) {
  double shifts = 0.0;
  double bound = 0.0;
  int max_level = 0;
  for (const auto& c : cases) {
    shifts += std::abs(c.e_lambda - c.e0);
    bound += c.paper_rhs;
    max_level = std::max(max_level, c.n + c.ell);
  }
  const double gamma = cases.empty() ? 0.0 : cases.front().gamma;
  return make_inequality("majorant_summability", {gamma, 0, max_level, label}, shifts, bound,
                         Relation::less_equal, tolerances);
}

// ------------------------------------------------------- Hellmann-Feynman

SlopeResult hellmann_feynman_slope(double gamma, int ell, int n, const TestPotential& u,
                                   std::span<const double> lambdas, double b,
                                   const RadialGrid& grid, SpectrumStore& store) {
  if (lambdas.empty()) throw DomainError("hellmann_feynman_slope: empty lambda sequence");
  for (std::size_t i = 0; i < lambdas.size(); ++i) {
    if (lambdas[i] == 0.0) throw DomainError("hellmann_feynman_slope: lambda = 0 in sequence");
    require_lemma_range(lambdas[i], b, gamma, "hellmann_feynman_slope");
    if (i > 0 && !(std::abs(lambdas[i]) < std::abs(lambdas[i - 1]))) {
      throw DomainError("hellmann_feynman_slope: |lambda| must decrease along the sequence");
    }
  }
  const auto base = chandrasekhar_spectrum(store, grid, unperturbed(gamma, ell));
  const auto k = static_cast<std::size_t>(n);
  if (k >= base->states.size()) {
    throw DomainError("hellmann_feynman_slope: state n=" + std::to_string(n) +
                      " not bound on grid " + grid.describe());
  }
  const auto& psi = base->states[k];
  SlopeResult r;
  r.target = expectation(psi, u.sample(grid));
  for (double lambda : lambdas) {
    const auto pert = chandrasekhar_spectrum(store, grid, perturbed_spec(gamma, ell, u, lambda));
    if (k >= pert->states.size()) {
      throw ConvergenceError("hellmann_feynman_slope: state n=" + std::to_string(n) +
                             " lost at lambda=" + fmt17(lambda));
    }
    // the continuation of state n must overlap most with unperturbed state n
    std::size_t best = 0;
    double best_overlap = -1.0;
    for (std::size_t m = 0; m < base->states.size(); ++m) {
      const double o =
          std::abs(inner_product(grid, base->states[m].samples, pert->states[k].samples));
      if (o > best_overlap) {
        best_overlap = o;
        best = m;
      }
    }
    if (best != k) {
      throw ConvergenceError("hellmann_feynman_slope: eigenvalue crossing at lambda=" +
                             fmt17(lambda) + " (state " + std::to_string(n) +
                             " continues unperturbed state " + std::to_string(best) + ")");
    }
    r.lambdas.push_back(lambda);
    r.slopes.push_back((psi.energy - pert->states[k].energy) / lambda);
  }
  // Neville's scheme evaluated at lambda = 0
  std::vector<double> p = r.slopes;
  const auto& x = r.lambdas;
  for (std::size_t level = 1; level < p.size(); ++level) {
    for (std::size_t i = p.size() - 1; i >= level; --i) {
      p[i] = (x[i] * p[i - 1] - x[i - level] * p[i]) / (x[i] - x[i - level]);
    }
  }
  r.extrapolated = p.back();
  return r;
}

CheckResult check_hellmann_feynman(const SlopeResult& slope, double gamma, int ell, int n,
                                   const TestPotential& u, double relative_tolerance) {
  const double lambda0 = slope.lambdas.empty() ? 0.0 : slope.lambdas.front();
  return make_inequality("hellmann_feynman", {gamma, ell, n,
                          "U=" + u.to_string() + ",lambda0=" + fmt(lambda0)},
                         slope.extrapolated, slope.target, Relation::equal,
                         relative_tolerance * std::abs(slope.target));
}

// -------------------------------------------------------- linear response

double inverse_square_tail(int first) {
  if (first < 1) throw DomainError("inverse_square_tail needs first >= 1");
  return boost::math::trigamma(static_cast<double>(first));
}

LinearResponse linear_response(double gamma, int ell, const TestPotential& u, double lambda,
                               int n_max, double b, const ConstantsBundle& constants,
                               const RadialGrid& grid, SpectrumStore& store) {
  if (lambda == 0.0) throw DomainError("linear_response needs lambda != 0");
  if (b > 0.0) require_lemma_range(lambda, b, gamma, "linear_response");
  const auto base = chandrasekhar_spectrum(store, grid, unperturbed(gamma, ell));
  const auto pert = chandrasekhar_spectrum(store, grid, perturbed_spec(gamma, ell, u, lambda));
  const std::size_t k = std::min({base->states.size(), pert->states.size(),
                                  static_cast<std::size_t>(n_max + 1)});
  if (k == 0) throw DomainError("linear_response: no bound states on grid " + grid.describe());
  LinearResponse r;
  r.lambda = lambda;
  r.states = static_cast<int>(k);
  double sum = 0.0;
  for (std::size_t n = 0; n < k; ++n) sum += base->states[n].energy - pert->states[n].energy;
  const double multiplicity = 2.0 * ell + 1.0;
  r.lhs = multiplicity * sum / lambda;
  const auto density = channel_density(base->truncated(static_cast<int>(k) - 1));
  r.rhs = integrate_against(density, u);
  r.tail_allowance = multiplicity * constants.m * b * gamma * gamma *
                     inverse_square_tail(static_cast<int>(k) + ell + 1);
  return r;
}

CheckResult check_linear_response(const LinearResponse& r, double gamma, int ell,
                                  const TestPotential& u) {
  const CheckParameters params{gamma, ell, r.states - 1,
                               "U=" + u.to_string() + ",lambda=" + fmt(r.lambda)};
  if (r.lambda > 0.0) {
    return make_inequality("linear_response", params, r.lhs, r.rhs - r.tail_allowance,
                           Relation::greater_equal, 0.0);
  }
  return make_inequality("linear_response", params, r.lhs, r.rhs + r.tail_allowance,
                         Relation::less_equal, 0.0);
}

CheckResult check_response_convergence(const LinearResponse& full, const LinearResponse& half,
                                       double gamma, int ell, const TestPotential& u,
                                       double min_ratio) {
  const double ratio = half.gap() > 0.0 ? full.gap() / half.gap() : INFINITY;
  return make_inequality("linear_response_convergence",
                         {gamma, ell, full.states - 1,
                          "U=" + u.to_string() + ",lambda=" + fmt(full.lambda)},
                         ratio, min_ratio, Relation::greater_equal, 0.0);
}

// ------------------------------------------------------------ Scott filling

std::vector<Level> aufbau(std::span<const ChannelSpectrum> channels, double electrons) {
  if (electrons < 0.0) throw DomainError("aufbau: negative electron count");
  const double budget = filling_budget(channels);
  if (electrons > budget * (1.0 + 1e-12)) {
    std::ostringstream os;
    os << "aufbau: " << electrons << " electrons exceed the computed-state budget of " << budget
       << " (levels below the highest computed level of every channel)";
    throw DomainError(os.str());
  }
  std::vector<Level> levels;
  for (const auto& ch : channels) {
    for (const auto& s : ch.states) levels.push_back({s.n, ch.channel.ell, s.energy, 0.0});
  }
  std::stable_sort(levels.begin(), levels.end(), [](const Level& a, const Level& b) {
    if (a.energy != b.energy) return a.energy < b.energy;
    return a.ell < b.ell;
  });
  std::vector<Level> filled;
  double left = electrons;
  for (auto& l : levels) {
    if (left <= 0.0) break;
    const double capacity = 2.0 * l.ell + 1.0;
    l.occupation = std::min(capacity, left);
    left -= l.occupation;
    filled.push_back(l);
  }
  return filled;
}

double filling_budget(std::span<const ChannelSpectrum> channels) {
  if (channels.empty()) return 0.0;
  double cut = INFINITY;
  for (const auto& ch : channels) {
    if (ch.states.empty()) return 0.0;
    cut = std::min(cut, ch.states.back().energy);
  }
  double budget = 0.0;
  for (const auto& ch : channels) {
    for (const auto& s : ch.states) {
      if (s.energy <= cut) budget += 2.0 * ch.channel.ell + 1.0;
    }
  }
  return budget;
}

std::vector<DensityProfile> filled_channel_densities(std::span<const ChannelSpectrum> channels,
                                                     std::span<const Level> levels) {
  std::vector<DensityProfile> out;
  for (const auto& ch : channels) {
    if (ch.channel.perturbed()) throw DomainError("filled densities need unperturbed channels");
    DensityProfile p;
    p.grid = ch.grid;
    p.radii = ch.grid.nodes();
    p.values.assign(ch.grid.count(), 0.0);
    p.ell = ch.channel.ell;
    p.ell_max = ch.channel.ell;
    p.gamma = ch.channel.gamma;
    p.n_max = -1;
    for (const auto& l : levels) {
      if (l.ell != ch.channel.ell) continue;
      const auto& s = ch.states.at(static_cast<std::size_t>(l.n));
      for (std::size_t i = 0; i < p.values.size(); ++i) {
        p.values[i] += l.occupation * s.samples[i] * s.samples[i];
      }
      p.n_max = std::max(p.n_max, l.n);
    }
    for (std::size_t i = 0; i < p.values.size(); ++i) {
      p.values[i] /= 4.0 * kPi * p.radii[i] * p.radii[i];
    }
    out.push_back(std::move(p));
  }
  return out;
}

ScottTable scott_density_convergence(double gamma, std::span<const double> fill_counts,
                                     int ell_max, std::span<const TestPotential> potentials,
                                     const RadialGrid& grid, SpectrumStore& store) {
  for (std::size_t i = 1; i < fill_counts.size(); ++i) {
    if (!(fill_counts[i] > fill_counts[i - 1])) {
      throw DomainError("scott_density_convergence: fill counts must ascend");
    }
  }
  std::vector<ChannelSpectrum> channels;
  for (int ell = 0; ell <= ell_max; ++ell) {
    channels.push_back(*chandrasekhar_spectrum(store, grid, unperturbed(gamma, ell)));
  }
  ScottTable table;
  table.budget = filling_budget(channels);

  std::vector<DensityProfile> hydrogenic;
  for (const auto& ch : channels) {
    if (!ch.states.empty()) hydrogenic.push_back(channel_density(ch));
  }
  const auto rho_h = total_density(hydrogenic);

  std::vector<std::vector<double>> integrals(potentials.size());
  for (double electrons : fill_counts) {
    const auto levels = aufbau(channels, electrons);
    const auto components = filled_channel_densities(channels, levels);
    const auto total = total_density(components);
    double defect = 0.0;
    for (std::size_t i = 0; i < total.values.size(); ++i) {
      double s = 0.0;
      for (const auto& c : components) s += c.values[i];
      defect = std::max(defect, std::abs(s - total.values[i]));
    }
    table.checks.push_back(make_inequality("scott_channel_sum", {gamma, ell_max,
                                           static_cast<int>(electrons), ""},
                                           defect, 0.0, Relation::equal, 0.0));
    table.checks.push_back(make_inequality("scott_filled_mass",
                                           {gamma, ell_max, static_cast<int>(electrons), ""},
                                           total.mass(), electrons, Relation::equal,
                                           1e-6 * electrons));
    for (std::size_t k = 0; k < potentials.size(); ++k) {
      FillRow row;
      row.electrons = electrons;
      row.potential = potentials[k].to_string();
      row.integral = integrate_against(total, potentials[k]);
      row.increment = integrals[k].empty() ? 0.0 : row.integral - integrals[k].back();
      row.hydrogenic_integral = integrate_against(rho_h, potentials[k]);
      integrals[k].push_back(row.integral);
      table.rows.push_back(row);
    }
  }

  // increments over the last three fill counts: positive and decreasing
  for (std::size_t k = 0; k < potentials.size(); ++k) {
    const auto& values = integrals[k];
    if (values.size() < 4) continue;
    const std::string aux = "U=" + potentials[k].to_string();
    std::vector<double> increments;
    for (std::size_t i = values.size() - 3; i < values.size(); ++i) {
      const double inc = values[i] - values[i - 1];
      const int n = static_cast<int>(fill_counts[i]);
      table.checks.push_back(make_inequality("scott_increment_positive", {gamma, ell_max, n, aux},
                                             inc, 0.0, Relation::greater_equal, 0.0));
      if (!increments.empty()) {
        table.checks.push_back(make_inequality("scott_increment_decreasing",
                                               {gamma, ell_max, n, aux}, inc, increments.back(),
                                               Relation::less_equal, 0.0));
      }
      increments.push_back(inc);
    }
  }
  sort_checks(table.checks);
  return table;
}

// ------------------------------------------------------ majorant study

MajorantStudy run_majorant_study(const MajorantStudyConfig& config, SpectrumStore& store) {
  const double gamma = config.gamma;
  const auto& grid = config.grid;
  const int levels = std::max(config.max_level, config.summability_level);

  std::vector<std::shared_ptr<const ChannelSpectrum>> base;
  std::vector<ChannelSpectrum> truncated;
  for (int ell = 0; ell <= levels; ++ell) {
    base.push_back(chandrasekhar_spectrum(store, grid, unperturbed(gamma, ell)));
    truncated.push_back(base.back()->truncated(levels - ell));
  }
  MajorantStudy study;
  study.constants = make_constants(gamma, empirical_c_gamma(truncated, gamma));
  const double t = study.constants.t0;

  for (const auto& u : config.potentials) {
    for (int ell = 0; ell <= levels; ++ell) {
      const double b = form_bound_constant(u, gamma, ell, grid, store);
      if (ell <= config.trend_max_ell) {
        study.trends.emplace_back("U=" + u.to_string() + ",ell=" + std::to_string(ell),
                                  form_bound_trend(u, gamma, ell, grid, store));
      }
      if (b <= 0.0) continue;
      for (double fraction : config.fractions) {
        const double lambda = fraction * t / b;
        const auto pert = chandrasekhar_spectrum(store, grid, perturbed_spec(gamma, ell, u, lambda));
        for (int n = 0; n + ell <= levels; ++n) {
          const auto k = static_cast<std::size_t>(n);
          const std::string aux = "U=" + u.to_string() + ",lambda=" + fmt(lambda);
          if (k >= base[ell]->states.size() || k >= pert->states.size()) {
            study.checks.push_back(missing_state("majorant", gamma, ell, n, aux));
            continue;
          }
          study.cases.push_back(make_majorant_case(gamma, ell, n, u, b, lambda,
                                                   base[ell]->states[k].energy,
                                                   pert->states[k].energy, study.constants));
          if (n + ell <= config.max_level) {
            auto checks = check_majorant(study.cases.back());
            study.checks.push_back(checks.sharp);
            study.checks.push_back(checks.paper);
          }
        }
        if (fraction > 0.0 && ell <= 2) {
          study.checks.push_back(check_scaling_step(gamma, ell, u, lambda, b, grid));
          for (auto& c : check_scaling_corollary(gamma, ell, u, lambda, b, grid, store,
                                                 config.scaling_n_max)) {
            study.checks.push_back(std::move(c));
          }
        }
      }
    }
    for (double fraction : config.fractions) {
      std::vector<MajorantCase> selected;
      for (const auto& c : study.cases) {
        if (c.potential == u && c.n + c.ell <= config.summability_level &&
            std::abs(c.lambda * c.b / t - fraction) < 1e-9) {
          selected.push_back(c);
        }
      }
      study.checks.push_back(check_summability(
          selected, "U=" + u.to_string() + ",fraction=" + fmt(fraction)));
    }
  }
  sort_checks(study.checks);
  return study;
}

}  // namespace scottlab
