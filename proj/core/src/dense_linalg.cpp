#include "scottlab/dense_linalg.hpp"

#include <cblas.h>
#include <lapacke.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>
#include <string>

#include "scottlab/error.hpp"

namespace scottlab::linalg {

namespace {

using lapack_size = lapack_int;

lapack_size to_lapack(std::size_t n) {
  if (n > static_cast<std::size_t>(std::numeric_limits<lapack_size>::max())) {
    throw Error("matrix dimension exceeds LAPACK index range");
  }
  return static_cast<lapack_size>(n);
}

[[noreturn]] void throw_convergence(const char* routine, std::size_t n, lapack_int info) {
  std::ostringstream os;
  os << routine << " failed (info=" << info << ") for matrix of dimension " << n;
  throw ConvergenceError(os.str());
}

// Lower bound on the spectrum via Gershgorin row sums.
double gershgorin_lower(const SymmetricMatrix& a) {
  const std::size_t n = a.dimension();
  double bound = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < n; ++i) {
    double radius = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      if (j != i) radius += std::abs(a(i, j));
    }
    bound = std::min(bound, a(i, i) - radius);
  }
  return bound;
}

double gershgorin_lower(const TridiagonalMatrix& t) {
  const std::size_t n = t.dimension();
  double bound = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < n; ++i) {
    double radius = 0.0;
    if (i > 0) radius += std::abs(t.off_diagonal[i - 1]);
    if (i + 1 < n) radius += std::abs(t.off_diagonal[i]);
    bound = std::min(bound, t.diagonal[i] - radius);
  }
  return bound;
}

enum class Range { all, value, index };

struct Selection {
  Range range = Range::all;
  double lower = 0.0;
  double upper = 0.0;
  lapack_size first = 1;
  lapack_size last = 1;
};

EigenDecomposition dense_solve(const SymmetricMatrix& a, const Selection& sel) {
  require_working_blas();
  const std::size_t n = a.dimension();
  if (n == 0) throw DomainError("eigh: empty matrix");
  if (!a.is_finite()) throw DomainError("eigh: matrix has non-finite entries");
  const lapack_size nn = to_lapack(n);
  std::vector<double> work(a.data().begin(), a.data().end());
  std::size_t capacity = n;
  if (sel.range == Range::index) capacity = static_cast<std::size_t>(sel.last - sel.first + 1);
  EigenDecomposition out;
  out.dimension = n;
  out.eigenvalues.assign(n, 0.0);
  out.eigenvectors.assign(n * capacity, 0.0);
  std::vector<lapack_int> support(2 * n);
  lapack_int found = 0;
  const char range = sel.range == Range::all ? 'A' : (sel.range == Range::value ? 'V' : 'I');
  const lapack_int info = LAPACKE_dsyevr(
      LAPACK_COL_MAJOR, 'V', range, 'L', nn, work.data(), nn, sel.lower, sel.upper, sel.first,
      sel.last, LAPACKE_dlamch('S'), &found, out.eigenvalues.data(), out.eigenvectors.data(), nn,
      support.data());
  if (info != 0) throw_convergence("dsyevr", n, info);
  out.eigenvalues.resize(static_cast<std::size_t>(found));
  out.eigenvectors.resize(n * static_cast<std::size_t>(found));
  return out;
}

EigenDecomposition tridiagonal_solve(const TridiagonalMatrix& t, const Selection& sel) {
  require_working_blas();
  const std::size_t n = t.dimension();
  if (n == 0) throw DomainError("eigh: empty matrix");
  if (t.off_diagonal.size() + 1 != n) throw DomainError("tridiagonal: off-diagonal size must be n-1");
  const lapack_size nn = to_lapack(n);
  std::vector<double> d = t.diagonal;
  std::vector<double> e(n, 0.0);
  std::copy(t.off_diagonal.begin(), t.off_diagonal.end(), e.begin());
  EigenDecomposition out;
  out.dimension = n;
  out.eigenvalues.assign(n, 0.0);
  out.eigenvectors.assign(n * n, 0.0);
  std::vector<lapack_int> support(2 * n);
  lapack_int found = 0;
  const char range = sel.range == Range::all ? 'A' : (sel.range == Range::value ? 'V' : 'I');
  if (sel.range == Range::index) {
    out.eigenvectors.assign(n * static_cast<std::size_t>(sel.last - sel.first + 1), 0.0);
  }
  const lapack_int info = LAPACKE_dstevr(LAPACK_COL_MAJOR, 'V', range, nn, d.data(), e.data(),
                                         sel.lower, sel.upper, sel.first, sel.last,
                                         LAPACKE_dlamch('S'), &found, out.eigenvalues.data(),
                                         out.eigenvectors.data(), nn, support.data());
  if (info != 0) throw_convergence("dstevr", n, info);
  out.eigenvalues.resize(static_cast<std::size_t>(found));
  out.eigenvectors.resize(n * static_cast<std::size_t>(found));
  return out;
}

void drop_at_or_above(EigenDecomposition& d, double upper) {
  std::size_t keep = 0;
  while (keep < d.count() && d.eigenvalues[keep] < upper) ++keep;
  d.eigenvalues.resize(keep);
  d.eigenvectors.resize(keep * d.dimension);
}

}  // namespace

SymmetricMatrix::SymmetricMatrix(std::size_t dimension)
    : n_(dimension), a_(dimension * dimension, 0.0) {}

SymmetricMatrix SymmetricMatrix::identity(std::size_t dimension) {
  SymmetricMatrix m(dimension);
  for (std::size_t i = 0; i < dimension; ++i) m.a_[i * dimension + i] = 1.0;
  return m;
}

SymmetricMatrix SymmetricMatrix::diagonal(std::span<const double> values) {
  SymmetricMatrix m(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) m.a_[i * values.size() + i] = values[i];
  return m;
}

SymmetricMatrix SymmetricMatrix::from_lower(std::size_t dimension, std::vector<double> storage) {
  if (storage.size() != dimension * dimension) {
    throw DomainError("SymmetricMatrix: storage size does not match dimension");
  }
  SymmetricMatrix m;
  m.n_ = dimension;
  m.a_ = std::move(storage);
  for (std::size_t i = 0; i < dimension; ++i) {
    for (std::size_t j = 0; j < i; ++j) m.a_[j * dimension + i] = m.a_[i * dimension + j];
  }
  return m;
}

void SymmetricMatrix::add_to_diagonal(std::span<const double> values) {
  if (values.size() != n_) throw DomainError("add_to_diagonal: size mismatch");
  for (std::size_t i = 0; i < n_; ++i) a_[i * n_ + i] += values[i];
}

void SymmetricMatrix::scale(double factor) noexcept {
  for (double& x : a_) x *= factor;
}

void SymmetricMatrix::add_scaled(const SymmetricMatrix& other, double factor) {
  if (other.n_ != n_) throw DomainError("add_scaled: dimension mismatch");
  for (std::size_t k = 0; k < a_.size(); ++k) a_[k] += factor * other.a_[k];
}

double SymmetricMatrix::max_abs() const noexcept {
  double m = 0.0;
  for (double x : a_) m = std::max(m, std::abs(x));
  return m;
}

double SymmetricMatrix::trace() const noexcept {
  double t = 0.0;
  for (std::size_t i = 0; i < n_; ++i) t += a_[i * n_ + i];
  return t;
}

bool SymmetricMatrix::is_finite() const noexcept {
  return std::all_of(a_.begin(), a_.end(), [](double x) { return std::isfinite(x); });
}

std::vector<double> SymmetricMatrix::multiply(std::span<const double> x) const {
  if (x.size() != n_) throw DomainError("multiply: size mismatch");
  std::vector<double> y(n_, 0.0);
  const lapack_size nn = to_lapack(n_);
  cblas_dsymv(CblasRowMajor, CblasLower, nn, 1.0, a_.data(), nn, x.data(), 1, 0.0, y.data(), 1);
  return y;
}

double SymmetricMatrix::quadratic_form(std::span<const double> x) const {
  const auto y = multiply(x);
  double s = 0.0;
  for (std::size_t i = 0; i < n_; ++i) s += x[i] * y[i];
  return s;
}

SymmetricMatrix TridiagonalMatrix::to_dense() const {
  const std::size_t n = dimension();
  SymmetricMatrix m(n);
  for (std::size_t i = 0; i < n; ++i) {
    m.set(i, i, diagonal[i]);
    if (i + 1 < n) m.set(i, i + 1, off_diagonal[i]);
  }
  return m;
}

std::vector<double> EigenDecomposition::project(std::span<const double> x) const {
  if (x.size() != dimension) throw DomainError("project: size mismatch");
  std::vector<double> c(count(), 0.0);
  if (count() == 0) return c;
  cblas_dgemv(CblasColMajor, CblasTrans, to_lapack(dimension), to_lapack(count()), 1.0,
              eigenvectors.data(), to_lapack(dimension), x.data(), 1, 0.0, c.data(), 1);
  return c;
}

std::vector<double> EigenDecomposition::expand(std::span<const double> coefficients) const {
  if (coefficients.size() != count()) throw DomainError("expand: size mismatch");
  std::vector<double> x(dimension, 0.0);
  if (count() == 0) return x;
  cblas_dgemv(CblasColMajor, CblasNoTrans, to_lapack(dimension), to_lapack(count()), 1.0,
              eigenvectors.data(), to_lapack(dimension), coefficients.data(), 1, 0.0, x.data(),
              1);
  return x;
}

double EigenDecomposition::orthonormality_defect() const {
  const std::size_t k = count();
  std::vector<double> gram(k * k, 0.0);
  if (k == 0) return 0.0;
  cblas_dgemm(CblasColMajor, CblasTrans, CblasNoTrans, to_lapack(k), to_lapack(k),
              to_lapack(dimension), 1.0, eigenvectors.data(), to_lapack(dimension),
              eigenvectors.data(), to_lapack(dimension), 0.0, gram.data(), to_lapack(k));
  double defect = 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = 0; j < k; ++j) {
      defect = std::max(defect, std::abs(gram[i * k + j] - (i == j ? 1.0 : 0.0)));
    }
  }
  return defect;
}

double EigenDecomposition::reconstruction_defect(const SymmetricMatrix& a) const {
  const SymmetricMatrix rebuilt = spectral_synthesis(*this, eigenvalues);
  double defect = 0.0;
  for (std::size_t i = 0; i < a.data().size(); ++i) {
    defect = std::max(defect, std::abs(rebuilt.data()[i] - a.data()[i]));
  }
  const double scale = a.max_abs();
  return scale > 0.0 ? defect / scale : defect;
}

EigenDecomposition eigh(const SymmetricMatrix& a) { return dense_solve(a, Selection{}); }

EigenDecomposition eigh(const TridiagonalMatrix& t) { return tridiagonal_solve(t, Selection{}); }

EigenDecomposition eigh_below(const SymmetricMatrix& a, double upper) {
  const double lower = gershgorin_lower(a) - 1.0;
  if (!(lower < upper)) {
    EigenDecomposition empty;
    empty.dimension = a.dimension();
    return empty;
  }
  auto d = dense_solve(a, Selection{Range::value, lower, upper, 1, 1});
  drop_at_or_above(d, upper);
  return d;
}

EigenDecomposition eigh_below(const TridiagonalMatrix& t, double upper) {
  const double lower = gershgorin_lower(t) - 1.0;
  if (!(lower < upper)) {
    EigenDecomposition empty;
    empty.dimension = t.dimension();
    return empty;
  }
  auto d = tridiagonal_solve(t, Selection{Range::value, lower, upper, 1, 1});
  drop_at_or_above(d, upper);
  return d;
}

EigenDecomposition eigh_lowest(const SymmetricMatrix& a, std::size_t count) {
  const std::size_t n = a.dimension();
  if (count == 0) {
    EigenDecomposition empty;
    empty.dimension = n;
    return empty;
  }
  count = std::min(count, n);
  return dense_solve(a, Selection{Range::index, 0.0, 0.0, 1, to_lapack(count)});
}

double min_eigenvalue(const SymmetricMatrix& a) { return eigh_lowest(a, 1).eigenvalues.front(); }

double max_eigenvalue(const SymmetricMatrix& a) {
  const lapack_size n = to_lapack(a.dimension());
  return dense_solve(a, Selection{Range::index, 0.0, 0.0, n, n}).eigenvalues.front();
}

double generalized_max_eigenvalue(const SymmetricMatrix& a, const SymmetricMatrix& b,
                                  const Tolerances& tol) {
  const std::size_t n = a.dimension();
  if (b.dimension() != n) throw DomainError("generalized eigenproblem: dimension mismatch");
  const double threshold = tol.positive_definite * b.max_abs();
  const lapack_size nn = to_lapack(n);

  std::vector<double> factor(b.data().begin(), b.data().end());
  lapack_int info = LAPACKE_dpotrf(LAPACK_COL_MAJOR, 'L', nn, factor.data(), nn);
  bool suspicious = info != 0;
  if (!suspicious) {
    for (std::size_t i = 0; i < n; ++i) {
      const double r = factor[i * n + i];
      if (r * r <= threshold) suspicious = true;
    }
  }
  if (suspicious) {
    const double smallest = min_eigenvalue(b);
    if (info != 0 || smallest <= threshold) {
      std::ostringstream os;
      os << "generalized eigenproblem: B is not positive definite (smallest eigenvalue "
         << smallest << ", threshold " << threshold << ")";
      throw NotPositiveDefinite(os.str(), smallest);
    }
  }

  std::vector<double> reduced(a.data().begin(), a.data().end());
  info = LAPACKE_dsygst(LAPACK_COL_MAJOR, 1, 'L', nn, reduced.data(), nn, factor.data(), nn);
  if (info != 0) throw_convergence("dsygst", n, info);
  return max_eigenvalue(SymmetricMatrix::from_lower(n, [&] {
    // dsygst leaves the result in the column-major lower triangle, which is
    // the row-major upper triangle; transpose into row-major lower.
    std::vector<double> lower(n * n, 0.0);
    for (std::size_t j = 0; j < n; ++j) {
      for (std::size_t i = j; i < n; ++i) lower[i * n + j] = reduced[j * n + i];
    }
    return lower;
  }()));
}

SymmetricMatrix spectral_synthesis(const EigenDecomposition& d, std::span<const double> values) {
  require_working_blas();
  if (values.size() != d.count()) throw DomainError("spectral_synthesis: size mismatch");
  const std::size_t n = d.dimension;
  const std::size_t k = d.count();
  std::vector<double> result(n * n, 0.0);
  if (k == 0) return SymmetricMatrix::from_lower(n, std::move(result));
  const lapack_size nn = to_lapack(n);
  const lapack_size kk = to_lapack(k);
  const bool nonnegative =
      std::all_of(values.begin(), values.end(), [](double v) { return v >= 0.0; });
  std::vector<double> scaled(d.eigenvectors);
  if (nonnegative) {
    // V diag(v) V^T = W W^T with W = V diag(sqrt v)
    for (std::size_t c = 0; c < k; ++c) {
      const double s = std::sqrt(values[c]);
      for (std::size_t i = 0; i < n; ++i) scaled[c * n + i] *= s;
    }
    // Column-major upper triangle == row-major lower triangle.
    cblas_dsyrk(CblasColMajor, CblasUpper, CblasNoTrans, nn, kk, 1.0, scaled.data(), nn, 0.0,
                result.data(), nn);
  } else {
    for (std::size_t c = 0; c < k; ++c) {
      for (std::size_t i = 0; i < n; ++i) scaled[c * n + i] *= values[c];
    }
    cblas_dgemm(CblasColMajor, CblasNoTrans, CblasTrans, nn, nn, kk, 1.0, scaled.data(), nn,
                d.eigenvectors.data(), nn, 0.0, result.data(), nn);
  }
  return SymmetricMatrix::from_lower(n, std::move(result));
}

SymmetricMatrix operator_function(const EigenDecomposition& d,
                                  const std::function<double(double)>& f) {
  std::vector<double> values(d.count());
  for (std::size_t k = 0; k < d.count(); ++k) {
    values[k] = f(d.eigenvalues[k]);
    if (!std::isfinite(values[k])) {
      std::ostringstream os;
      os.precision(17);
      os << "operator_function: f is not finite at eigenvalue " << d.eigenvalues[k]
         << " (index " << k << ")";
      throw DomainError(os.str());
    }
  }
  return spectral_synthesis(d, values);
}

BlasHealth blas_self_test() {
  constexpr std::size_t n = 256;
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  std::vector<double> a(n * n), b(n * n), c(n * n, 0.0), ref(n * n, 0.0);
  for (double& x : a) x = dist(rng);
  for (double& x : b) x = dist(rng);
  cblas_dgemm(CblasColMajor, CblasNoTrans, CblasNoTrans, static_cast<int>(n), static_cast<int>(n),
              static_cast<int>(n), 1.0, a.data(), static_cast<int>(n), b.data(),
              static_cast<int>(n), 0.0, c.data(), static_cast<int>(n));
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t k = 0; k < n; ++k) {
      const double bkj = b[j * n + k];
      for (std::size_t i = 0; i < n; ++i) ref[j * n + i] += a[k * n + i] * bkj;
    }
  double scale = 0.0;
  double err = 0.0;
  for (std::size_t i = 0; i < n * n; ++i) {
    scale = std::max(scale, std::abs(ref[i]));
    err = std::max(err, std::abs(c[i] - ref[i]));
  }
  BlasHealth h;
  h.max_error = err / scale;
  h.ok = std::isfinite(h.max_error) && h.max_error < 1e-12;
  return h;
}

void require_working_blas() {
  static const BlasHealth health = blas_self_test();
  if (!health.ok) {
    std::ostringstream os;
    os << "BLAS self test failed: dgemm at n=256 is off by " << health.max_error
       << " (relative). The linked BLAS kernel is broken on this CPU; for OpenBLAS try "
          "OPENBLAS_CORETYPE=Haswell";
    throw Error(os.str());
  }
}

}  // namespace scottlab::linalg
