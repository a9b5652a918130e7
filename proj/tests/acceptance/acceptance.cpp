// Acceptance criteria, one per invocation:  scottlab_acceptance <1..9>
// Prints detail lines for failed sub-checks and a final
//   criterion N: PASS|FAIL  <summary>
// line. Exit status 0 on PASS.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "scottlab/constants.hpp"
#include "scottlab/error.hpp"
#include "scottlab/inequality_lab.hpp"
#include "scottlab/scott_study.hpp"
#include "scottlab/spectrum_store.hpp"

namespace {

using namespace scottlab;

struct Outcome {
  bool pass = true;
  std::size_t checks = 0;
  std::size_t failures = 0;
  std::ostringstream detail;

  void record(bool ok, const std::string& what) {
    ++checks;
    if (ok) return;
    pass = false;
    ++failures;
    detail << "  fail: " << what << '\n';
  }
};

std::string describe(const CheckResult& c) {
  std::ostringstream os;
  os.precision(8);
  os << c.name << " gamma=" << c.parameters.gamma << " l=" << c.parameters.ell
     << " n=" << c.parameters.n;
  if (!c.parameters.auxiliary.empty()) os << " " << c.parameters.auxiliary;
  os << " lhs=" << c.lhs << " rhs=" << c.rhs << " margin=" << c.margin << " tol=" << c.tolerance;
  if (!c.note.empty()) os << " [" << c.note << "]";
  return os.str();
}

void record(Outcome& o, const CheckResult& c) { o.record(c.pass, describe(c)); }

std::string counts(const Outcome& o) {
  return std::to_string(o.checks - o.failures) + "/" + std::to_string(o.checks) + " checks pass";
}

ChannelSpec channel(double gamma, int ell) {
  ChannelSpec spec;
  spec.gamma = gamma;
  spec.ell = ell;
  return spec;
}

const std::vector<double> kGammas{0.3, 0.5, 0.6};
constexpr int kEllMax = 2;
constexpr int kNMax = 3;

// -- 1 ----------------------------------------------------------------------
Outcome schroedinger_oracle(SpectrumStore& store) {
  Outcome o;
  const auto start = std::chrono::steady_clock::now();
  double worst = 0.0;
  for (double g : kGammas) {
    for (int l = 0; l <= kEllMax; ++l) {
      const auto s = store.spectrum(default_grid(g), channel(g, l), KineticSymbol::schroedinger())
                         ->truncated(kNMax);
      o.record(s.states.size() == kNMax + 1,
               "gamma=" + std::to_string(g) + " l=" + std::to_string(l) + ": only " +
                   std::to_string(s.states.size()) + " localized states");
      for (std::size_t i = 0; i < s.states.size(); ++i) {
        const auto c = check_schroedinger_energy(s, i, 1e-3);
        worst = std::max(worst, c.margin / std::abs(c.rhs));
        record(o, c);
      }
    }
  }
  const double seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  o.record(seconds <= 300.0, "runtime " + std::to_string(seconds) + " s exceeds 300 s");
  o.detail << "  worst relative error " << worst << ", " << seconds << " s\n";
  return o;
}

// -- 2 ----------------------------------------------------------------------
Outcome virial(SpectrumStore& store) {
  Outcome o;
  double worst = 0.0;
  double worst_ratio_gap = 0.0;
  for (double g : kGammas) {
    const auto fine = default_grid(g);
    const RadialGrid coarse(fine.spacing() * 2, (fine.count() - 1) / 2);
    for (int l = 0; l <= kEllMax; ++l) {
      const auto symbol = KineticSymbol::chandrasekhar();
      const auto sf = store.spectrum(fine, channel(g, l), symbol)->truncated(kNMax);
      const auto sc = store.spectrum(coarse, channel(g, l), symbol)->truncated(kNMax);
      o.record(sf.states.size() == kNMax + 1,
               "gamma=" + std::to_string(g) + " l=" + std::to_string(l) + ": only " +
                   std::to_string(sf.states.size()) + " localized states");
      for (std::size_t i = 0; i < sf.states.size(); ++i) {
        const auto cf = check_virial(sf, i);
        worst = std::max(worst, cf.margin / std::abs(cf.rhs));
        record(o, cf);
        if (i >= sc.states.size()) {
          o.record(false, "coarse grid lacks state n=" + std::to_string(i));
          continue;
        }
        const auto cc = check_virial(sc, i);
        const double ratio = cc.margin / cf.margin;
        worst_ratio_gap = std::max(worst_ratio_gap, std::abs(ratio - 4.0));
        std::ostringstream os;
        os << "halving ratio gamma=" << g << " l=" << l << " n=" << i << ": " << ratio
           << " (errors " << cc.margin << " -> " << cf.margin << ")";
        o.record(ratio >= 3.0 && ratio <= 5.0, os.str());
      }
    }
  }
  o.detail << "  worst relative virial defect " << worst << ", worst |ratio - 4| "
           << worst_ratio_gap << '\n';
  return o;
}

// -- 3 ----------------------------------------------------------------------
Outcome inequality_suite(SpectrumStore& store) {
  static const std::set<std::string> kInequalities{
      "kato",
      "hardy",
      "kato_global",
      "momentum_bound",
      "coulomb_vs_energy",
      "coulomb_vs_energy_rearranged",
      "below_nonrelativistic",
      "proof_chain_low",
      "proof_chain_kato",
      "proof_chain_hardy",
      "proof_chain_collected"};
  SuiteConfig config;
  config.coupling.reset();
  const auto report = run_suite(config, store);
  Outcome o;
  std::map<std::string, int> per_name;
  std::size_t stable = 0;
  for (const auto& c : report.checks) {
    if (!kInequalities.contains(c.name)) continue;
    ++per_name[c.name];
    if (c.note.find("refinement-stable violation") != std::string::npos) ++stable;
    record(o, c);
  }
  for (const auto& name : kInequalities) {
    o.record(per_name[name] > 0, "no " + name + " checks were produced");
  }
  o.record(per_name["kato"] >= config.random_vectors && per_name["hardy"] >= config.random_vectors,
           "fewer than 20 random vectors per structural inequality");
  o.record(stable == 0, std::to_string(stable) + " refinement-stable violations");
  for (const auto& [name, n] : per_name) o.detail << "  " << name << ": " << n << '\n';
  return o;
}

// -- 4 ----------------------------------------------------------------------
Outcome coupling(SpectrumStore& store) {
  SuiteConfig config;
  config.gammas.clear();
  config.coupling = CouplingSuite{};
  const auto report = run_suite(config, store);
  Outcome o;
  int bounds = 0, derivatives = 0;
  for (const auto& c : report.checks) {
    if (c.name == "coupling_bound") ++bounds;
    if (c.name == "log_derivative") ++derivatives;
    record(o, c);
  }
  // 4 couplings x 3 levels x 2 channels, 3 midpoints x 3 levels x 2 channels
  o.record(bounds == 24, "expected 24 coupling_bound checks, got " + std::to_string(bounds));
  o.record(derivatives == 18,
           "expected 18 log_derivative checks, got " + std::to_string(derivatives));
  return o;
}

// -- 5 ----------------------------------------------------------------------
Outcome constants() {
  Outcome o;
  double worst_forms = 0.0;
  for (int i = 0; i < 50; ++i) {
    const double g = (i + 0.5) / 50.0 * kCriticalCoupling;
    const double pole = 1.0 / pole_factor(g);
    for (int j = 0; j < 50; ++j) {
      const double t = -0.99 + (j + 0.5) / 50.0 * (0.99 * pole + 0.99);
      const double a = f_gamma_quotient_form(g, t);
      const double b = f_gamma_product_form(g, t);
      const double rel = std::abs(a - b) / std::abs(a);
      worst_forms = std::max(worst_forms, rel);
      o.record(rel <= 1e-12, "forms differ at gamma=" + std::to_string(g) +
                                 " t=" + std::to_string(t) + " by " + std::to_string(rel));
    }
  }
  const double a = constant_a();
  o.record(std::abs(a - 4.17356) <= 1e-4, "A = " + std::to_string(a));
  const double t = t0(0.5);
  o.record(std::abs(t - 0.06010) <= 1e-5, "t0(0.5) = " + std::to_string(t));

  double worst_derivative = 0.0;
  for (double g : {0.1, 0.3, 0.5, 0.6}) {
    const double range = t0(g);
    for (int k = 0; k <= 20; ++k) {
      const double x = -range + 2.0 * range * k / 20.0;
      // Richardson-extrapolated central difference; F varies on the scale of
      // the distance to the pole, so the step follows it
      const double step = 1e-3 * (1.0 / pole_factor(g) - x);
      auto central = [&](double s) { return (f_gamma(g, x + s) - f_gamma(g, x - s)) / (2 * s); };
      const double fd = (4 * central(step / 2) - central(step)) / 3;
      const double exact = f_gamma_derivative(g, x);
      const double rel = std::abs(fd - exact) / std::abs(exact);
      worst_derivative = std::max(worst_derivative, rel);
      o.record(rel <= 1e-6, "F' at gamma=" + std::to_string(g) + " t=" + std::to_string(x) +
                                " off by " + std::to_string(rel));
    }
  }
  o.detail.precision(12);
  o.detail << "  A=" << a << " t0(0.5)=" << t << " worst form gap " << worst_forms
           << " worst F' gap " << worst_derivative << '\n';
  return o;
}

// -- 6 ----------------------------------------------------------------------
Outcome majorant(SpectrumStore& store) {
  const auto study = run_majorant_study(MajorantStudyConfig{}, store);
  Outcome o;
  std::map<std::string, int> per_name;
  for (const auto& c : study.checks) {
    ++per_name[c.name];
    record(o, c);
  }
  o.record(!study.cases.empty(), "no majorant cases");
  for (const auto& [name, n] : per_name) o.detail << "  " << name << ": " << n << '\n';
  o.detail << "  c_emp=" << study.constants.c_emp << " m_tilde=" << study.constants.m_tilde
           << '\n';
  return o;
}

// -- 7 ----------------------------------------------------------------------
Outcome hellmann_feynman(SpectrumStore& store) {
  const MajorantStudyConfig scenario;
  Outcome o;
  const double range = t0(scenario.gamma);
  for (const auto& u : scenario.potentials) {
    for (int l = 0; l <= 1; ++l) {
      const double b = form_bound_constant(u, scenario.gamma, l, scenario.grid, store);
      for (double fraction : scenario.fractions) {
        const double lambda0 = fraction * range / b;
        const std::vector<double> lambdas{lambda0, lambda0 / 2, lambda0 / 4};
        try {
          const auto slope =
              hellmann_feynman_slope(scenario.gamma, l, 0, u, lambdas, b, scenario.grid, store);
          auto c = check_hellmann_feynman(slope, scenario.gamma, l, 0, u, 1e-3);
          o.detail << "  " << u.to_string() << " l=" << l << " f=" << fraction
                   << ": slope " << slope.extrapolated << " vs " << slope.target << '\n';
          record(o, c);
        } catch (const Error& e) {
          o.record(false, u.to_string() + " l=" + std::to_string(l) + ": " + e.what());
        }
      }
    }
  }
  return o;
}

// -- 8 ----------------------------------------------------------------------
Outcome linear_response_study(SpectrumStore& store) {
  const MajorantStudyConfig scenario;
  const auto constants = run_majorant_study(scenario, store).constants;
  const auto u = TestPotential::exponential(1.0);
  constexpr int kLevels = 20;
  const double b = form_bound_constant(u, scenario.gamma, 0, scenario.grid, store);
  Outcome o;
  for (double sign : {1.0, -1.0}) {
    const double lambda = sign * constants.t0 / (4 * b);
    const auto full = linear_response(scenario.gamma, 0, u, lambda, kLevels, b, constants,
                                      scenario.grid, store);
    const auto half = linear_response(scenario.gamma, 0, u, lambda / 2, kLevels, b, constants,
                                      scenario.grid, store);
    record(o, check_linear_response(full, scenario.gamma, 0, u));
    record(o, check_linear_response(half, scenario.gamma, 0, u));
    record(o, check_response_convergence(full, half, scenario.gamma, 0, u, 1.5));
    o.detail << "  lambda=" << lambda << ": " << full.states << " states, gap " << full.gap()
             << " -> " << half.gap() << " (ratio " << full.gap() / half.gap() << ")\n";
  }
  return o;
}

// -- 9 ----------------------------------------------------------------------
std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

Outcome determinism(const std::string& cli, const std::filesystem::path& cache) {
  Outcome o;
  const auto dir = cache / "determinism";
  std::filesystem::create_directories(dir);
  auto run = [&](const std::string& name, const std::string& extra) {
    const auto out = dir / name;
    const std::string command = "\"" + cli + "\" verify --quiet --cache-dir \"" +
                                cache.string() + "\" --out \"" + out.string() + "\"" + extra +
                                " 2> \"" + out.string() + ".log\"";
    const int status = std::system(command.c_str());
    o.detail << "  " << name << ": exit status " << status << '\n';
    return slurp(out);
  };
  const auto warmup = run("warmup.json", " --jobs 4");
  const auto first = run("first.json", "");
  const auto second = run("second.json", "");
  o.record(!first.empty(), "verify produced no report");
  o.record(first == second, "warm reports differ");
  o.record(first == warmup, "warm report differs from the warm-up run");
  o.detail << "  report size " << first.size() << " bytes\n";
  return o;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"scottlab acceptance criteria"};
  int criterion = 0;
  std::filesystem::path cache = std::filesystem::temp_directory_path() / "scottlab-acceptance";
  std::string cli = "scottlab";
  app.add_option("criterion", criterion, "1..9")->required()->check(CLI::Range(1, 9));
  app.add_option("--cache-dir", cache, "spectrum cache shared between criteria");
  app.add_option("--cli", cli, "scottlab executable (criterion 9)");
  CLI11_PARSE(app, argc, argv);

  static const char* kTitles[] = {"",
                                  "schroedinger oracle",
                                  "virial identity",
                                  "inequality suite",
                                  "coupling dependence",
                                  "constants",
                                  "majorant",
                                  "hellmann-feynman",
                                  "linear response",
                                  "determinism"};
  Outcome o;
  try {
    std::filesystem::create_directories(cache);
    SpectrumStore store(cache);
    switch (criterion) {
      case 1: o = schroedinger_oracle(store); break;
      case 2: o = virial(store); break;
      case 3: o = inequality_suite(store); break;
      case 4: o = coupling(store); break;
      case 5: o = constants(); break;
      case 6: o = majorant(store); break;
      case 7: o = hellmann_feynman(store); break;
      case 8: o = linear_response_study(store); break;
      case 9: o = determinism(cli, cache); break;
    }
  } catch (const std::exception& e) {
    o.record(false, std::string("exception: ") + e.what());
  }
  std::cout << o.detail.str();
  std::cout << "criterion " << criterion << ": " << (o.pass ? "PASS" : "FAIL") << "  "
            << kTitles[criterion] << ", " << counts(o) << std::endl;
  return o.pass ? 0 : 1;
}
