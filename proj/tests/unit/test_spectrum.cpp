#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>
#include <string>

#include "scottlab/error.hpp"
#include "scottlab/spectrum.hpp"
#include "scottlab/spectrum_store.hpp"

using namespace scottlab;

namespace {

ChannelSpec channel(double gamma, int ell) {
  return ChannelSpec{gamma, ell, 0.0, std::nullopt, CoulombSign::attractive};
}

ChannelSpectrum solve(double gamma, int ell, const RadialGrid& grid, const KineticSymbol& symbol,
                      int n_max = 3) {
  return bound_states(assemble_channel_operator(channel(gamma, ell), grid, symbol), n_max);
}

double hydrogen(double gamma, int n, int ell) {
  const double q = n + ell + 1;
  return -gamma * gamma / (2.0 * q * q);
}

std::filesystem::path scratch_dir(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() /
             ("scottlab_test_" + name + "_" + std::to_string(::testing::UnitTest::GetInstance()->random_seed()));
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace

TEST(Spectrum, SchroedingerMatchesHydrogen) {
  const RadialGrid grid(0.05 / 0.5, 3999);
  for (int ell = 0; ell <= 2; ++ell) {
    const auto s = solve(0.5, ell, grid, KineticSymbol::schroedinger());
    ASSERT_EQ(s.states.size(), 4u);
    for (const auto& st : s.states) {
      EXPECT_NEAR(st.energy, hydrogen(0.5, st.n, ell), 1e-3 * std::abs(hydrogen(0.5, st.n, ell)))
          << "l=" << ell << " n=" << st.n;
    }
  }
}

TEST(Spectrum, SchroedingerDegeneracyInPrincipalNumber) {
  const RadialGrid grid(0.1, 1999);
  const auto s0 = solve(0.5, 0, grid, KineticSymbol::schroedinger());
  const auto s1 = solve(0.5, 1, grid, KineticSymbol::schroedinger());
  // (n=1, l=0) and (n=0, l=1) share n+l+1 = 2
  EXPECT_NEAR(s0.states[1].energy, s1.states[0].energy, 1e-3 * std::abs(s1.states[0].energy));
}

TEST(Spectrum, ChandrasekharBelowNonrelativistic) {
  const RadialGrid grid(0.2, 999);
  for (double gamma : {0.3, 0.5, 0.6}) {
    const auto s = solve(gamma, 0, grid, KineticSymbol::chandrasekhar(), 0);
    ASSERT_EQ(s.states.size(), 1u);
    EXPECT_LE(s.states[0].energy, hydrogen(gamma, 0, 0));
    EXPECT_GT(s.states[0].energy, -gamma);
  }
}

TEST(Spectrum, StatesNormalizedOrthogonalAndNodeOrdered) {
  const RadialGrid grid(0.2, 999);
  const auto s = solve(0.5, 1, grid, KineticSymbol::chandrasekhar(), 3);
  ASSERT_GE(s.states.size(), 3u);
  for (std::size_t a = 0; a < s.states.size(); ++a) {
    EXPECT_NEAR(norm_squared(grid, s.states[a].samples), 1.0, 1e-10);
    EXPECT_EQ(s.states[a].nodes, static_cast<int>(a));
    EXPECT_GE(s.states[a].localization, 0.99);
    for (std::size_t b = 0; b < a; ++b)
      EXPECT_NEAR(inner_product(grid, s.states[a].samples, s.states[b].samples), 0.0, 1e-8);
  }
}

TEST(Spectrum, NmaxZeroGivesGroundStateOnly) {
  const RadialGrid grid(0.1, 400);
  const auto s = solve(0.5, 0, grid, KineticSymbol::chandrasekhar(), 0);
  EXPECT_EQ(s.states.size(), 1u);
  EXPECT_EQ(s.states[0].n, 0);
}

TEST(Spectrum, MonotoneInCouplingAndEll) {
  const RadialGrid grid(0.2, 999);
  double previous = 0.0;
  for (double gamma : {0.3, 0.4, 0.5, 0.6}) {
    const double e = solve(gamma, 0, grid, KineticSymbol::chandrasekhar(), 0).states[0].energy;
    EXPECT_LT(e, previous);
    previous = e;
  }
  const double e0 = solve(0.5, 0, grid, KineticSymbol::chandrasekhar(), 0).states[0].energy;
  const double e1 = solve(0.5, 1, grid, KineticSymbol::chandrasekhar(), 0).states[0].energy;
  const double e2 = solve(0.5, 2, grid, KineticSymbol::chandrasekhar(), 0).states[0].energy;
  EXPECT_LT(e0, e1);
  EXPECT_LT(e1, e2);
}

TEST(Spectrum, EnergyEqualsKineticPlusPotential) {
  const RadialGrid grid(0.2, 999);
  const auto s = solve(0.5, 1, grid, KineticSymbol::chandrasekhar(), 2);
  const auto t = SpectralObservable::of(grid, 1, KineticSymbol::chandrasekhar());
  for (const auto& st : s.states) {
    const double kinetic = expectation(st, t);
    const double coulomb = expectation(st, [](double r) { return 0.5 / r; });
    EXPECT_NEAR(kinetic - coulomb, st.energy, 1e-10);
  }
}

TEST(Spectrum, PerturbationLowersEnergy) {
  const RadialGrid grid(0.2, 999);
  auto spec = channel(0.5, 0);
  const double e = bound_states(assemble_channel_operator(spec, grid, KineticSymbol::chandrasekhar()), 0)
                       .states[0].energy;
  spec.lambda = 0.05;
  spec.potential = TestPotential::exponential(1.0);
  const double el = bound_states(assemble_channel_operator(spec, grid, KineticSymbol::chandrasekhar()), 0)
                        .states[0].energy;
  EXPECT_LT(el, e);
}

// The discretization error of the s-wave ground state should shrink by ~4 per
// halving of h (ratio in [3, 5] over three refinements).
TEST(Spectrum, GroundStateRefinementIsSecondOrder) {
  for (int ell : {0, 1}) {
    std::vector<double> energies;
    for (double h : {0.3, 0.15, 0.075, 0.0375}) {
      const auto grid = RadialGrid::from_extent(60.0, static_cast<std::size_t>(std::lround(60.0 / h)) - 1);
      energies.push_back(solve(0.5, ell, grid, KineticSymbol::chandrasekhar(), 0).states[0].energy);
    }
    for (int k = 0; k + 2 < 4; ++k) {
      const double ratio = (energies[k] - energies[k + 1]) / (energies[k + 1] - energies[k + 2]);
      EXPECT_GE(ratio, 3.0) << "l=" << ell << " step " << k;
      EXPECT_LE(ratio, 5.0) << "l=" << ell << " step " << k;
    }
  }
}

TEST(Split, ExtremeThresholdsAndPythagoras) {
  const RadialGrid grid(0.1, 400);
  const auto s = solve(0.5, 0, grid, KineticSymbol::chandrasekhar(), 1);
  const auto d = centrifugal_decomposition(grid, 0);
  const auto& st = s.states[0];
  const auto all_low = split_state(st, *d, 1e6);
  const auto all_high = split_state(st, *d, 1e-6);
  for (std::size_t i = 0; i < grid.count(); ++i) {
    EXPECT_NEAR(all_low.low[i], st.samples[i], 1e-10);
    EXPECT_NEAR(all_low.high[i], 0.0, 1e-10);
    EXPECT_NEAR(all_high.high[i], st.samples[i], 1e-10);
  }
  const auto split = split_state(st, *d, 1.0);
  EXPECT_NEAR(norm_squared(grid, split.low) + norm_squared(grid, split.high), 1.0, 1e-10);
  EXPECT_NEAR(inner_product(grid, split.low, split.high), 0.0, 1e-10);
  for (std::size_t i = 0; i < grid.count(); ++i)
    EXPECT_NEAR(split.low[i] + split.high[i], st.samples[i], 1e-12);
  EXPECT_THROW(split_state(st, *d, 0.0), DomainError);
}

TEST(Observables, GridMismatch) {
  const RadialGrid grid(0.1, 400);
  std::vector<double> u(100, 1.0);
  EXPECT_THROW(norm_squared(grid, u), GridMismatch);
  const auto s = solve(0.5, 0, grid, KineticSymbol::chandrasekhar(), 0);
  const auto other = SpectralObservable::of(RadialGrid(0.1, 300), 0, KineticSymbol::massless());
  EXPECT_THROW(expectation(s.states[0], other), GridMismatch);
}

TEST(Observables, ConstantExpectationIsNorm) {
  const RadialGrid grid(0.2, 999);
  const auto s = solve(0.5, 2, grid, KineticSymbol::chandrasekhar(), 1);
  for (const auto& st : s.states) EXPECT_NEAR(expectation(st, [](double) { return 1.0; }), 1.0, 1e-12);
}

TEST(SpectrumStore, SerializationRoundTripIsExact) {
  const RadialGrid grid(0.1, 300);
  const auto s = solve(0.5, 0, grid, KineticSymbol::chandrasekhar(), 2);
  const auto back = deserialize_states(serialize_states(s.states), grid);
  ASSERT_EQ(back.size(), s.states.size());
  for (std::size_t k = 0; k < back.size(); ++k) {
    EXPECT_EQ(back[k].energy, s.states[k].energy);
    EXPECT_EQ(back[k].samples, s.states[k].samples);
    EXPECT_EQ(back[k].nodes, s.states[k].nodes);
  }
}

TEST(SpectrumStore, DiskCacheHitIsBitIdentical) {
  const auto dir = scratch_dir("cache_hit");
  const RadialGrid grid(0.2, 299);
  const auto spec = channel(0.5, 1);
  std::vector<double> first;
  {
    SpectrumStore store(dir);
    first = store.spectrum(grid, spec, KineticSymbol::chandrasekhar())->states[0].samples;
    EXPECT_EQ(store.stats().computed, 1u);
  }
  std::vector<std::string> lines;
  SpectrumStore store(dir, [&](const std::string& m) { lines.push_back(m); });
  const auto again = store.spectrum(grid, spec, KineticSymbol::chandrasekhar());
  EXPECT_EQ(store.stats().disk_hits, 1u);
  EXPECT_EQ(store.stats().computed, 0u);
  EXPECT_EQ(again->states[0].samples, first);
  ASSERT_FALSE(lines.empty());
  EXPECT_NE(lines.back().find("cache hit"), std::string::npos);
  std::filesystem::remove_all(dir);
}

TEST(SpectrumStore, CorruptFileIsRecomputed) {
  const auto dir = scratch_dir("corrupt");
  const RadialGrid grid(0.1, 300);
  const auto spec = channel(0.4, 0);
  double energy = 0.0;
  {
    SpectrumStore store(dir);
    energy = store.spectrum(grid, spec, KineticSymbol::chandrasekhar())->states[0].energy;
  }
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    std::fstream f(entry.path(), std::ios::in | std::ios::out | std::ios::binary);
    f.seekp(-12, std::ios::end);
    f.put('\x5a');
  }
  SpectrumStore store(dir);
  const auto again = store.spectrum(grid, spec, KineticSymbol::chandrasekhar());
  EXPECT_EQ(store.stats().rejected_files, 1u);
  EXPECT_EQ(store.stats().computed, 1u);
  EXPECT_EQ(again->states[0].energy, energy);
  std::filesystem::remove_all(dir);
}

TEST(SpectrumStore, KeysSeparateSymbolsAndGrids) {
  const auto spec = channel(0.5, 0);
  const RadialGrid a(0.1, 300), b(0.1, 301);
  EXPECT_NE(spectrum_key(a, spec, KineticSymbol::chandrasekhar()),
            spectrum_key(a, spec, KineticSymbol::schroedinger()));
  EXPECT_NE(spectrum_key(a, spec, KineticSymbol::chandrasekhar()),
            spectrum_key(b, spec, KineticSymbol::chandrasekhar()));
  auto other = spec;
  other.lambda = 0.1;
  other.potential = TestPotential::exponential(1.0);
  EXPECT_NE(spectrum_key(a, spec, KineticSymbol::chandrasekhar()),
            spectrum_key(a, other, KineticSymbol::chandrasekhar()));
}

TEST(SpectrumStore, ScalarMemoized) {
  const auto dir = scratch_dir("scalar");
  int calls = 0;
  {
    SpectrumStore store(dir);
    EXPECT_EQ(store.scalar("x", [&] { ++calls; return 0.1 + 0.2; }), 0.1 + 0.2);
    EXPECT_EQ(store.scalar("x", [&] { ++calls; return 0.0; }), 0.1 + 0.2);
  }
  SpectrumStore store(dir);
  EXPECT_EQ(store.scalar("x", [&] { ++calls; return 0.0; }), 0.1 + 0.2);
  EXPECT_EQ(calls, 1);
  std::filesystem::remove_all(dir);
}

TEST(SpectrumStore, AtomicWriteReplacesContents) {
  const auto dir = scratch_dir("atomic");
  const auto path = dir / "out.txt";
  write_file_atomically(path, "first");
  write_file_atomically(path, "second");
  std::ifstream in(path);
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  EXPECT_EQ(text, "second");
  std::size_t files = 0;
  for ([[maybe_unused]] const auto& e : std::filesystem::directory_iterator(dir)) ++files;
  EXPECT_EQ(files, 1u);
  std::filesystem::remove_all(dir);
}
