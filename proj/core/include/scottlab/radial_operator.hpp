#pragma once

// Discretized radial operators in a fixed angular-momentum channel.
//
// The half-line (0, inf) is replaced by (0, r_max) with Dirichlet walls and a
// uniform grid r_i = i*h, i = 1..N, r_max = (N+1)*h. The centrifugal
// Laplacian -d^2/dr^2 + l(l+1)/r^2 is the three-point stencil; every nonlocal
// kinetic energy is a function of that matrix.

#include <cstddef>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "scottlab/dense_linalg.hpp"

namespace scottlab {

inline constexpr double kPi = 3.141592653589793238462643383279502884;
inline constexpr double kCriticalCoupling = 2.0 / kPi;

class RadialGrid {
 public:
  RadialGrid(double spacing, std::size_t count);
  static RadialGrid from_extent(double r_max, std::size_t count);

  double spacing() const noexcept { return h_; }
  std::size_t count() const noexcept { return n_; }
  double r_max() const noexcept { return static_cast<double>(n_ + 1) * h_; }
  // 0-based index i refers to r = (i+1) h.
  double node(std::size_t i) const noexcept { return static_cast<double>(i + 1) * h_; }
  std::vector<double> nodes() const;

  // Same node count, half the spacing (r_max halves too).
  RadialGrid refined_same_count() const { return RadialGrid(h_ / 2, n_); }
  // Half the spacing at fixed r_max.
  RadialGrid refined() const { return RadialGrid(h_ / 2, 2 * n_ + 1); }

  std::string describe() const;

  friend bool operator==(const RadialGrid&, const RadialGrid&) = default;

 private:
  double h_;
  std::size_t n_;
};

class KineticSymbol {
 public:
  enum class Kind {
    chandrasekhar,        // sqrt(s+1) - 1
    schroedinger,         // s/2
    massless,             // sqrt(s)
    weight,               // 1 - (s+1)^{-1/2}
    virial,               // s / sqrt(s+1)
    low_momentum_cut,     // 1{sqrt(s) <= threshold}
    high_momentum_cut,    // 1{sqrt(s) > threshold}
  };

  static KineticSymbol chandrasekhar() { return KineticSymbol(Kind::chandrasekhar); }
  static KineticSymbol schroedinger() { return KineticSymbol(Kind::schroedinger); }
  static KineticSymbol massless() { return KineticSymbol(Kind::massless); }
  static KineticSymbol weight() { return KineticSymbol(Kind::weight); }
  static KineticSymbol virial() { return KineticSymbol(Kind::virial); }
  static KineticSymbol low_momentum_cut(double threshold);
  static KineticSymbol high_momentum_cut(double threshold);
  static KineticSymbol parse(const std::string& name);

  Kind kind() const noexcept { return kind_; }
  double threshold() const noexcept { return threshold_; }
  // Image of s = k^2 >= 0.
  double operator()(double s) const noexcept;
  std::string name() const;

  friend bool operator==(const KineticSymbol&, const KineticSymbol&) = default;

 private:
  explicit KineticSymbol(Kind kind, double threshold = 0.0) : kind_(kind), threshold_(threshold) {}
  Kind kind_;
  double threshold_;
};

// Nonnegative radial test potentials U(r).
class TestPotential {
 public:
  enum class Kind {
    coulomb_tail,  // s / r
    exponential,   // exp(-a r)
    yukawa,        // exp(-a r) / r
  };

  static TestPotential coulomb_tail(double strength);
  static TestPotential exponential(double decay);
  static TestPotential yukawa(double decay);
  // "exp:1.0", "coulomb:1.0", "yukawa:1.0"
  static TestPotential parse(const std::string& text);

  Kind kind() const noexcept { return kind_; }
  double parameter() const noexcept { return parameter_; }
  double operator()(double r) const noexcept;
  std::vector<double> sample(const RadialGrid& grid) const;
  std::string to_string() const;

  friend bool operator==(const TestPotential&, const TestPotential&) = default;

 private:
  TestPotential(Kind kind, double parameter) : kind_(kind), parameter_(parameter) {}
  Kind kind_;
  double parameter_;
};

enum class CoulombSign { attractive, repulsive };

struct ChannelSpec {
  double gamma = 0.5;
  int ell = 0;
  double lambda = 0.0;
  std::optional<TestPotential> potential;
  // repulsive builds the kinetic term plus +gamma/r (used for form bounds)
  CoulombSign sign = CoulombSign::attractive;

  void validate() const;
  bool perturbed() const noexcept { return lambda != 0.0; }
  std::string describe() const;

  friend bool operator==(const ChannelSpec&, const ChannelSpec&) = default;
};

linalg::TridiagonalMatrix build_centrifugal_laplacian(const RadialGrid& grid, int ell);

// Spectral decomposition of the centrifugal Laplacian with eigenvalues in
// [-1e-8, 0) clamped to 0.
struct CentrifugalDecomposition {
  RadialGrid grid;
  int ell;
  linalg::EigenDecomposition spectrum;
};

// Raw decomposition of the tridiagonal Laplacian (no clamping).
CentrifugalDecomposition decompose_centrifugal(const RadialGrid& grid, int ell);

// Shared, memoized decompositions: LRU keyed by grid and l, bounded by the
// total size of the stored eigenvectors.
std::shared_ptr<const CentrifugalDecomposition> centrifugal_decomposition(const RadialGrid& grid,
                                                                          int ell);
void set_decomposition_cache_budget(std::size_t bytes);

// f(L) for a kinetic symbol f. Throws DomainError if L has an eigenvalue below
// -1e-8 (a discretization defect); smaller negative values are clamped.
linalg::SymmetricMatrix build_kinetic(const linalg::EigenDecomposition& l_decomposition,
                                      const KineticSymbol& symbol);

class DiscretizedOperator {
 public:
  DiscretizedOperator(RadialGrid grid, ChannelSpec spec, KineticSymbol symbol,
                      linalg::SymmetricMatrix matrix);
  DiscretizedOperator(RadialGrid grid, ChannelSpec spec, KineticSymbol symbol,
                      linalg::TridiagonalMatrix matrix);

  const RadialGrid& grid() const noexcept { return grid_; }
  const ChannelSpec& spec() const noexcept { return spec_; }
  const KineticSymbol& symbol() const noexcept { return symbol_; }
  std::size_t dimension() const noexcept { return grid_.count(); }
  bool tridiagonal() const noexcept { return tridiagonal_.has_value(); }

  // Dense form; materialized on first use for tridiagonal operators.
  const linalg::SymmetricMatrix& matrix() const;
  // Full eigendecomposition, computed once.
  const linalg::EigenDecomposition& decomposition() const;
  // Eigenpairs strictly below `upper` (not cached).
  linalg::EigenDecomposition eigenpairs_below(double upper) const;

 private:
  struct Lazy {
    std::once_flag matrix_once;
    std::once_flag decomposition_once;
    std::optional<linalg::SymmetricMatrix> matrix;
    std::optional<linalg::EigenDecomposition> decomposition;
  };

  RadialGrid grid_;
  ChannelSpec spec_;
  KineticSymbol symbol_;
  std::optional<linalg::TridiagonalMatrix> tridiagonal_;
  std::shared_ptr<Lazy> lazy_;
};

// Kinetic term (symbol applied to the centrifugal Laplacian) plus
// diag(-gamma/r_i - lambda U(r_i)); +gamma/r_i for the repulsive sign.
DiscretizedOperator assemble_channel_operator(const ChannelSpec& spec, const RadialGrid& grid,
                                              const KineticSymbol& symbol);

// The diagonal (potential) part of the assembled operator.
std::vector<double> channel_potential(const ChannelSpec& spec, const RadialGrid& grid);

}  // namespace scottlab
