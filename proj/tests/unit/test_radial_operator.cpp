#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "scottlab/error.hpp"
#include "scottlab/radial_operator.hpp"

using namespace scottlab;

TEST(RadialGrid, NodesAndRefinement) {
  RadialGrid g(0.1, 99);
  EXPECT_DOUBLE_EQ(g.r_max(), 10.0);
  EXPECT_DOUBLE_EQ(g.node(0), 0.1);
  EXPECT_DOUBLE_EQ(g.node(98), 9.9);
  const auto f = g.refined();
  EXPECT_EQ(f.count(), 199u);
  EXPECT_DOUBLE_EQ(f.r_max(), g.r_max());
  // every coarse node is a fine node
  for (std::size_t i = 0; i < g.count(); ++i) EXPECT_DOUBLE_EQ(f.node(2 * i + 1), g.node(i));
  EXPECT_THROW(RadialGrid(0.0, 10), DomainError);
  EXPECT_THROW(RadialGrid(0.1, 0), DomainError);
}

TEST(Laplacian, StencilRows) {
  RadialGrid g(0.5, 6);
  for (int ell : {0, 1, 3}) {
    const auto t = build_centrifugal_laplacian(g, ell);
    ASSERT_EQ(t.diagonal.size(), 6u);
    ASSERT_EQ(t.off_diagonal.size(), 5u);
    for (std::size_t i = 0; i < 6; ++i) {
      const double r = g.node(i);
      EXPECT_DOUBLE_EQ(t.diagonal[i], 2.0 / 0.25 + ell * (ell + 1) / (r * r));
    }
    for (double o : t.off_diagonal) EXPECT_DOUBLE_EQ(o, -1.0 / 0.25);
  }
}

TEST(Laplacian, DirichletGroundStateOnZeroToPi) {
  // -u'' on (0, pi) with u(0) = u(pi) = 0 has lowest eigenvalue 1
  const auto g = RadialGrid::from_extent(kPi, 2000);
  const auto d = decompose_centrifugal(g, 0);
  EXPECT_NEAR(d.spectrum.eigenvalues.front(), 1.0, 1e-3);
  EXPECT_NEAR(d.spectrum.eigenvalues[1], 4.0, 4e-3);
}

TEST(Laplacian, PositiveAndIncreasingInEll) {
  RadialGrid g(0.1, 300);
  double previous = 0.0;
  for (int ell = 0; ell <= 3; ++ell) {
    const auto d = centrifugal_decomposition(g, ell);
    EXPECT_GT(d->spectrum.eigenvalues.front(), previous);
    previous = d->spectrum.eigenvalues.front();
  }
}

TEST(Laplacian, DecompositionCacheSharesInstances) {
  RadialGrid g(0.1, 200);
  const auto a = centrifugal_decomposition(g, 1);
  const auto b = centrifugal_decomposition(g, 1);
  EXPECT_EQ(a.get(), b.get());
  const auto c = centrifugal_decomposition(g, 2);
  EXPECT_NE(a.get(), c.get());
}

TEST(KineticSymbol, Values) {
  const double s = 3.0;
  EXPECT_DOUBLE_EQ(KineticSymbol::chandrasekhar()(s), 1.0);
  EXPECT_DOUBLE_EQ(KineticSymbol::schroedinger()(s), 1.5);
  EXPECT_DOUBLE_EQ(KineticSymbol::massless()(s), std::sqrt(3.0));
  EXPECT_DOUBLE_EQ(KineticSymbol::weight()(s), 0.5);
  EXPECT_DOUBLE_EQ(KineticSymbol::virial()(s), 1.5);
  EXPECT_DOUBLE_EQ(KineticSymbol::low_momentum_cut(1.0)(0.9), 1.0);
  EXPECT_DOUBLE_EQ(KineticSymbol::low_momentum_cut(1.0)(1.1), 0.0);
  EXPECT_DOUBLE_EQ(KineticSymbol::high_momentum_cut(1.0)(1.1), 1.0);
  EXPECT_EQ(KineticSymbol::parse("schroedinger"), KineticSymbol::schroedinger());
  EXPECT_THROW(KineticSymbol::parse("dirac"), DomainError);
}

TEST(KineticSymbol, PointwiseDominance) {
  // weight <= chandrasekhar <= schroedinger, chandrasekhar <= massless
  for (double k = 0.0; k <= 50.0; k += 0.01) {
    const double s = k * k;
    const double t = KineticSymbol::chandrasekhar()(s);
    EXPECT_LE(KineticSymbol::weight()(s), t + 1e-15);
    EXPECT_LE(t, KineticSymbol::schroedinger()(s) + 1e-15);
    EXPECT_LE(t, KineticSymbol::massless()(s) + 1e-15);
  }
}

TEST(Kinetic, OperatorDominanceCarriesOver) {
  RadialGrid g(0.1, 250);
  const auto d = centrifugal_decomposition(g, 0);
  const auto t = build_kinetic(d->spectrum, KineticSymbol::chandrasekhar());
  const auto w = build_kinetic(d->spectrum, KineticSymbol::weight());
  const auto s = build_kinetic(d->spectrum, KineticSymbol::schroedinger());
  auto diff = t;
  diff.add_scaled(w, -1.0);
  EXPECT_GE(linalg::min_eigenvalue(diff), -1e-10);
  diff = s;
  diff.add_scaled(t, -1.0);
  EXPECT_GE(linalg::min_eigenvalue(diff), -1e-10);
}

TEST(Kinetic, SchroedingerIsHalfTheLaplacian) {
  RadialGrid g(0.2, 120);
  const auto lap = build_centrifugal_laplacian(g, 2).to_dense();
  const auto s = build_kinetic(centrifugal_decomposition(g, 2)->spectrum,
                               KineticSymbol::schroedinger());
  for (std::size_t i = 0; i < g.count(); ++i)
    for (std::size_t j = 0; j < g.count(); ++j)
      EXPECT_NEAR(s(i, j), 0.5 * lap(i, j), 1e-9 * lap.max_abs());
}

TEST(Kinetic, CutsAreComplementaryProjections) {
  RadialGrid g(0.1, 200);
  const auto d = centrifugal_decomposition(g, 1);
  auto low = build_kinetic(d->spectrum, KineticSymbol::low_momentum_cut(1.0));
  const auto high = build_kinetic(d->spectrum, KineticSymbol::high_momentum_cut(1.0));
  low.add_scaled(high, 1.0);
  for (std::size_t i = 0; i < g.count(); ++i)
    for (std::size_t j = 0; j < g.count(); ++j) EXPECT_NEAR(low(i, j), i == j ? 1.0 : 0.0, 1e-11);
}

TEST(Potentials, SamplesAndParse) {
  RadialGrid g(0.5, 4);
  const auto c = TestPotential::parse("coulomb:2");
  EXPECT_DOUBLE_EQ(c(0.5), 4.0);
  EXPECT_DOUBLE_EQ(TestPotential::parse("exp:1")(1.0), std::exp(-1.0));
  EXPECT_DOUBLE_EQ(TestPotential::parse("yukawa:1")(2.0), std::exp(-2.0) / 2.0);
  EXPECT_EQ(TestPotential::parse(c.to_string()), c);
  for (double v : TestPotential::exponential(0.3).sample(g)) EXPECT_GE(v, 0.0);
  EXPECT_THROW(TestPotential::parse("exp"), DomainError);
  EXPECT_THROW(TestPotential::parse("gauss:1"), DomainError);
  EXPECT_THROW(TestPotential::exponential(-1.0), DomainError);
}

TEST(ChannelSpec, Validation) {
  ChannelSpec ok{0.5, 0, 0.0, std::nullopt, CoulombSign::attractive};
  EXPECT_NO_THROW(ok.validate());
  auto bad = ok;
  bad.gamma = 0.7;
  EXPECT_THROW(bad.validate(), DomainError);
  bad = ok;
  bad.ell = -1;
  EXPECT_THROW(bad.validate(), DomainError);
  bad = ok;
  bad.lambda = 0.1;
  EXPECT_THROW(bad.validate(), DomainError);
}

TEST(Assembly, RepulsiveOperatorIsPositiveDefinite) {
  RadialGrid g(0.1, 300);
  for (int ell : {0, 1}) {
    ChannelSpec spec{0.6, ell, 0.0, std::nullopt, CoulombSign::repulsive};
    const auto op = assemble_channel_operator(spec, g, KineticSymbol::chandrasekhar());
    EXPECT_GT(op.decomposition().eigenvalues.front(), 0.0);
  }
}

TEST(Assembly, PotentialDiagonal) {
  RadialGrid g(0.25, 40);
  ChannelSpec spec{0.5, 1, 0.2, TestPotential::exponential(1.0), CoulombSign::attractive};
  const auto v = channel_potential(spec, g);
  for (std::size_t i = 0; i < g.count(); ++i) {
    const double r = g.node(i);
    EXPECT_DOUBLE_EQ(v[i], -0.5 / r - 0.2 * std::exp(-r));
  }
  const auto op = assemble_channel_operator(spec, g, KineticSymbol::schroedinger());
  EXPECT_TRUE(op.tridiagonal());
}

TEST(Assembly, Deterministic) {
  RadialGrid g(0.1, 250);
  ChannelSpec spec{0.5, 0, 0.0, std::nullopt, CoulombSign::attractive};
  const auto a = assemble_channel_operator(spec, g, KineticSymbol::chandrasekhar());
  const auto b = assemble_channel_operator(spec, g, KineticSymbol::chandrasekhar());
  EXPECT_TRUE(a.matrix() == b.matrix());
  EXPECT_EQ(a.decomposition().eigenvalues, b.decomposition().eigenvalues);
}
