#pragma once

// Dense symmetric eigenproblems and spectral function calculus.
//
// All matrices are real symmetric. Eigenvectors are stored column-major
// (eigenvector k occupies the contiguous range [k*n, (k+1)*n)), which is
// also the LAPACK layout, so no transposition happens at the boundary.

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace scottlab::linalg {

// Default numerical tolerances; every entry point takes an overriding copy.
struct Tolerances {
  double orthonormality = 1e-10;     // per unit of dimension
  double reconstruction = 1e-8;      // relative to max|A|
  double positive_definite = 1e-12;  // relative to max|B|
  double commutation = 1e-8;         // relative to scale
};

inline constexpr Tolerances kDefaultTolerances{};

class SymmetricMatrix {
 public:
  SymmetricMatrix() = default;
  explicit SymmetricMatrix(std::size_t dimension);

  static SymmetricMatrix identity(std::size_t dimension);
  static SymmetricMatrix diagonal(std::span<const double> values);
  // Takes row-major n x n storage; the lower triangle is mirrored into the
  // upper one so the result is exactly symmetric.
  static SymmetricMatrix from_lower(std::size_t dimension, std::vector<double> storage);

  std::size_t dimension() const noexcept { return n_; }
  double operator()(std::size_t i, std::size_t j) const noexcept {
    return a_[i * n_ + j];
  }
  // Writes (i,j) and (j,i).
  void set(std::size_t i, std::size_t j, double value) noexcept {
    a_[i * n_ + j] = value;
    a_[j * n_ + i] = value;
  }
  void add_to_diagonal(std::span<const double> values);
  void scale(double factor) noexcept;
  // this += factor * other
  void add_scaled(const SymmetricMatrix& other, double factor);

  double max_abs() const noexcept;
  double trace() const noexcept;
  bool is_finite() const noexcept;

  // Full row-major storage; symmetric, so equally valid column-major.
  std::span<const double> data() const noexcept { return a_; }

  std::vector<double> multiply(std::span<const double> x) const;
  // x^T A x
  double quadratic_form(std::span<const double> x) const;

  friend bool operator==(const SymmetricMatrix&, const SymmetricMatrix&) = default;

 private:
  std::size_t n_ = 0;
  std::vector<double> a_;
};

// Symmetric tridiagonal matrix: main diagonal of size n, off-diagonal n-1.
struct TridiagonalMatrix {
  std::vector<double> diagonal;
  std::vector<double> off_diagonal;

  std::size_t dimension() const noexcept { return diagonal.size(); }
  SymmetricMatrix to_dense() const;
};

struct EigenDecomposition {
  std::size_t dimension = 0;
  std::vector<double> eigenvalues;   // ascending
  std::vector<double> eigenvectors;  // column-major, dimension x count()

  std::size_t count() const noexcept { return eigenvalues.size(); }
  std::span<const double> vector(std::size_t k) const noexcept {
    return {eigenvectors.data() + k * dimension, dimension};
  }
  // V^T x (coefficients of x in the eigenbasis)
  std::vector<double> project(std::span<const double> x) const;
  // V c
  std::vector<double> expand(std::span<const double> coefficients) const;

  // max |V^T V - I|
  double orthonormality_defect() const;
  // max |V diag(w) V^T - A| / max|A|
  double reconstruction_defect(const SymmetricMatrix& a) const;
};

EigenDecomposition eigh(const SymmetricMatrix& a);
EigenDecomposition eigh(const TridiagonalMatrix& t);

// Only the eigenpairs with eigenvalue strictly below `upper`.
EigenDecomposition eigh_below(const SymmetricMatrix& a, double upper);
EigenDecomposition eigh_below(const TridiagonalMatrix& t, double upper);

// The `count` lowest eigenpairs (all of them if count >= dimension).
EigenDecomposition eigh_lowest(const SymmetricMatrix& a, std::size_t count);

double min_eigenvalue(const SymmetricMatrix& a);
double max_eigenvalue(const SymmetricMatrix& a);

// Largest mu with A v = mu B v, B positive definite. Reduces through the
// Cholesky factor B = R^T R to the standard problem R^{-T} A R^{-1}.
double generalized_max_eigenvalue(const SymmetricMatrix& a, const SymmetricMatrix& b,
                                  const Tolerances& tol = kDefaultTolerances);

// V f(Lambda) V^T. Throws DomainError naming the eigenvalue if f is not
// finite there.
SymmetricMatrix operator_function(const EigenDecomposition& d,
                                  const std::function<double(double)>& f);

// V diag(values) V^T for precomputed spectral values (size == d.count()).
SymmetricMatrix spectral_synthesis(const EigenDecomposition& d,
                                   std::span<const double> values);

// dgemm at n = 256 against a plain triple loop on a fixed random pair. Some
// OpenBLAS kernel selections return garbage above a block-size threshold;
// OPENBLAS_CORETYPE=Haswell (or another core) works around it.
struct BlasHealth {
  bool ok = false;
  double max_error = 0.0;  // relative to the largest product entry
};
BlasHealth blas_self_test();
// Runs the self test once per process; throws Error if it failed.
void require_working_blas();

}  // namespace scottlab::linalg
