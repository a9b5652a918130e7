#include "scottlab/radial_operator.hpp"

#include <algorithm>
#include <cmath>
#include <charconv>
#include <list>
#include <sstream>

#include "scottlab/error.hpp"

namespace scottlab {

namespace {

constexpr double kClampTolerance = 1e-8;

std::string format_double(double x) {
  std::ostringstream os;
  os.precision(17);
  os << x;
  return os.str();
}

double parse_number(const std::string& text, const std::string& context) {
  double value = 0.0;
  const char* first = text.data();
  const char* last = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc{} || ptr != last) {
    throw DomainError("cannot parse number '" + text + "' in " + context);
  }
  return value;
}

}  // namespace

// ---------------------------------------------------------------- RadialGrid

RadialGrid::RadialGrid(double spacing, std::size_t count) : h_(spacing), n_(count) {
  if (!(spacing > 0.0) || !std::isfinite(spacing)) throw DomainError("RadialGrid: spacing must be > 0");
  if (count < 1) throw DomainError("RadialGrid: need at least one node");
}

RadialGrid RadialGrid::from_extent(double r_max, std::size_t count) {
  if (!(r_max > 0.0)) throw DomainError("RadialGrid: r_max must be > 0");
  return RadialGrid(r_max / static_cast<double>(count + 1), count);
}

std::vector<double> RadialGrid::nodes() const {
  std::vector<double> r(n_);
  for (std::size_t i = 0; i < n_; ++i) r[i] = node(i);
  return r;
}

std::string RadialGrid::describe() const {
  return "h=" + format_double(h_) + ",N=" + std::to_string(n_);
}

// ------------------------------------------------------------- KineticSymbol

KineticSymbol KineticSymbol::low_momentum_cut(double threshold) {
  if (!(threshold > 0.0)) throw DomainError("momentum cut threshold must be > 0");
  return KineticSymbol(Kind::low_momentum_cut, threshold);
}

KineticSymbol KineticSymbol::high_momentum_cut(double threshold) {
  if (!(threshold > 0.0)) throw DomainError("momentum cut threshold must be > 0");
  return KineticSymbol(Kind::high_momentum_cut, threshold);
}

KineticSymbol KineticSymbol::parse(const std::string& name) {
  if (name == "chandrasekhar") return chandrasekhar();
  if (name == "schroedinger") return schroedinger();
  if (name == "massless") return massless();
  if (name == "weight") return weight();
  if (name == "virial") return virial();
  throw DomainError("unknown kinetic symbol '" + name + "'");
}

double KineticSymbol::operator()(double s) const noexcept {
  switch (kind_) {
    case Kind::chandrasekhar:
      // sqrt(s+1)-1 without cancellation for small s
      return s / (std::sqrt(s + 1.0) + 1.0);
    case Kind::schroedinger:
      return 0.5 * s;
    case Kind::massless:
      return std::sqrt(s);
    case Kind::weight: {
      const double root = std::sqrt(s + 1.0);
      return s / (root * (root + 1.0));
    }
    case Kind::virial:
      return s / std::sqrt(s + 1.0);
    case Kind::low_momentum_cut:
      return std::sqrt(s) <= threshold_ ? 1.0 : 0.0;
    case Kind::high_momentum_cut:
      return std::sqrt(s) > threshold_ ? 1.0 : 0.0;
  }
  return 0.0;
}

std::string KineticSymbol::name() const {
  switch (kind_) {
    case Kind::chandrasekhar: return "chandrasekhar";
    case Kind::schroedinger: return "schroedinger";
    case Kind::massless: return "massless";
    case Kind::weight: return "weight";
    case Kind::virial: return "virial";
    case Kind::low_momentum_cut: return "low_cut(" + format_double(threshold_) + ")";
    case Kind::high_momentum_cut: return "high_cut(" + format_double(threshold_) + ")";
  }
  return "?";
}

// ------------------------------------------------------------- TestPotential

TestPotential TestPotential::coulomb_tail(double strength) {
  if (!(strength >= 0.0)) throw DomainError("coulomb_tail strength must be >= 0");
  return TestPotential(Kind::coulomb_tail, strength);
}

TestPotential TestPotential::exponential(double decay) {
  if (!(decay >= 0.0)) throw DomainError("exponential decay rate must be >= 0");
  return TestPotential(Kind::exponential, decay);
}

TestPotential TestPotential::yukawa(double decay) {
  if (!(decay >= 0.0)) throw DomainError("yukawa decay rate must be >= 0");
  return TestPotential(Kind::yukawa, decay);
}

TestPotential TestPotential::parse(const std::string& text) {
  const auto colon = text.find(':');
  if (colon == std::string::npos) {
    throw DomainError("potential '" + text + "' must look like kind:parameter");
  }
  const std::string kind = text.substr(0, colon);
  const double p = parse_number(text.substr(colon + 1), "potential '" + text + "'");
  if (kind == "exp" || kind == "exponential") return exponential(p);
  if (kind == "coulomb" || kind == "coulomb_tail") return coulomb_tail(p);
  if (kind == "yukawa") return yukawa(p);
  throw DomainError("unknown potential kind '" + kind + "'");
}

double TestPotential::operator()(double r) const noexcept {
  switch (kind_) {
    case Kind::coulomb_tail: return parameter_ / r;
    case Kind::exponential: return std::exp(-parameter_ * r);
    case Kind::yukawa: return std::exp(-parameter_ * r) / r;
  }
  return 0.0;
}

std::vector<double> TestPotential::sample(const RadialGrid& grid) const {
  std::vector<double> u(grid.count());
  for (std::size_t i = 0; i < u.size(); ++i) {
    u[i] = (*this)(grid.node(i));
    if (!std::isfinite(u[i])) {
      throw DomainError("potential " + to_string() + " is not finite at r=" +
                        format_double(grid.node(i)));
    }
  }
  return u;
}

std::string TestPotential::to_string() const {
  switch (kind_) {
    case Kind::coulomb_tail: return "coulomb:" + format_double(parameter_);
    case Kind::exponential: return "exp:" + format_double(parameter_);
    case Kind::yukawa: return "yukawa:" + format_double(parameter_);
  }
  return "?";
}

// --------------------------------------------------------------- ChannelSpec

void ChannelSpec::validate() const {
  if (!(gamma > 0.0 && gamma < kCriticalCoupling)) {
    throw DomainError("coupling gamma=" + format_double(gamma) +
                      " outside (0, 2/pi); the Coulomb form is unbounded below beyond 2/pi "
                      "= 0.63662");
  }
  if (ell < 0) throw DomainError("angular momentum must be >= 0");
  if (!std::isfinite(lambda)) throw DomainError("lambda must be finite");
  if (lambda != 0.0 && !potential) throw DomainError("lambda != 0 requires a potential");
}

std::string ChannelSpec::describe() const {
  std::string s = "gamma=" + format_double(gamma) + ",ell=" + std::to_string(ell) +
                  ",lambda=" + format_double(lambda);
  s += ",U=" + (potential ? potential->to_string() : std::string("none"));
  s += sign == CoulombSign::repulsive ? ",repulsive" : ",attractive";
  return s;
}

// ------------------------------------------------------------------ builders

linalg::TridiagonalMatrix build_centrifugal_laplacian(const RadialGrid& grid, int ell) {
  if (ell < 0) throw DomainError("angular momentum must be >= 0");
  const std::size_t n = grid.count();
  const double h = grid.spacing();
  const double inv_h2 = 1.0 / (h * h);
  const double centrifugal = static_cast<double>(ell) * static_cast<double>(ell + 1);
  linalg::TridiagonalMatrix t;
  t.diagonal.resize(n);
  t.off_diagonal.assign(n > 0 ? n - 1 : 0, -inv_h2);
  for (std::size_t i = 0; i < n; ++i) {
    const double r = grid.node(i);
    t.diagonal[i] = 2.0 * inv_h2 + centrifugal / (r * r);
  }
  return t;
}

CentrifugalDecomposition decompose_centrifugal(const RadialGrid& grid, int ell) {
  return CentrifugalDecomposition{grid, ell, linalg::eigh(build_centrifugal_laplacian(grid, ell))};
}

namespace {

struct DecompositionCache {
  std::mutex mutex;
  std::size_t budget = std::size_t{2} << 30;
  std::size_t used = 0;
  std::list<std::shared_ptr<const CentrifugalDecomposition>> entries;  // most recent first
};

DecompositionCache& decomposition_cache() {
  static DecompositionCache cache;
  return cache;
}

std::size_t footprint(const CentrifugalDecomposition& d) {
  return d.spectrum.eigenvectors.size() * sizeof(double);
}

void evict_to_budget(DecompositionCache& cache) {
  while (cache.used > cache.budget && !cache.entries.empty()) {
    cache.used -= footprint(*cache.entries.back());
    cache.entries.pop_back();
  }
}

}  // namespace

std::shared_ptr<const CentrifugalDecomposition> centrifugal_decomposition(const RadialGrid& grid,
                                                                          int ell) {
  auto& cache = decomposition_cache();
  {
    std::lock_guard lock(cache.mutex);
    for (auto it = cache.entries.begin(); it != cache.entries.end(); ++it) {
      if ((*it)->grid == grid && (*it)->ell == ell) {
        auto hit = *it;
        cache.entries.splice(cache.entries.begin(), cache.entries, it);
        return hit;
      }
    }
  }
  auto d = decompose_centrifugal(grid, ell);
  for (double& lam : d.spectrum.eigenvalues) {
    if (lam < 0.0 && lam >= -kClampTolerance) lam = 0.0;
  }
  auto fresh = std::make_shared<const CentrifugalDecomposition>(std::move(d));
  std::lock_guard lock(cache.mutex);
  for (const auto& e : cache.entries) {
    if (e->grid == grid && e->ell == ell) return e;
  }
  cache.entries.push_front(fresh);
  cache.used += footprint(*fresh);
  evict_to_budget(cache);
  return fresh;
}

void set_decomposition_cache_budget(std::size_t bytes) {
  auto& cache = decomposition_cache();
  std::lock_guard lock(cache.mutex);
  cache.budget = bytes;
  evict_to_budget(cache);
}

linalg::SymmetricMatrix build_kinetic(const linalg::EigenDecomposition& l_decomposition,
                                      const KineticSymbol& symbol) {
  std::vector<double> values(l_decomposition.count());
  for (std::size_t k = 0; k < values.size(); ++k) {
    const double lam = l_decomposition.eigenvalues[k];
    if (lam < -kClampTolerance) {
      throw DomainError("centrifugal Laplacian has eigenvalue " + format_double(lam) +
                        " < -1e-8; discretization defect");
    }
    values[k] = symbol(std::max(lam, 0.0));
  }
  return linalg::spectral_synthesis(l_decomposition, values);
}

// ------------------------------------------------------- DiscretizedOperator

DiscretizedOperator::DiscretizedOperator(RadialGrid grid, ChannelSpec spec, KineticSymbol symbol,
                                         linalg::SymmetricMatrix matrix)
    : grid_(grid), spec_(std::move(spec)), symbol_(symbol), lazy_(std::make_shared<Lazy>()) {
  if (matrix.dimension() != grid_.count()) throw DomainError("operator dimension != grid count");
  std::call_once(lazy_->matrix_once, [&] { lazy_->matrix = std::move(matrix); });
}

DiscretizedOperator::DiscretizedOperator(RadialGrid grid, ChannelSpec spec, KineticSymbol symbol,
                                         linalg::TridiagonalMatrix matrix)
    : grid_(grid),
      spec_(std::move(spec)),
      symbol_(symbol),
      tridiagonal_(std::move(matrix)),
      lazy_(std::make_shared<Lazy>()) {
  if (tridiagonal_->dimension() != grid_.count()) {
    throw DomainError("operator dimension != grid count");
  }
}

const linalg::SymmetricMatrix& DiscretizedOperator::matrix() const {
  std::call_once(lazy_->matrix_once, [&] { lazy_->matrix = tridiagonal_->to_dense(); });
  return *lazy_->matrix;
}

const linalg::EigenDecomposition& DiscretizedOperator::decomposition() const {
  std::call_once(lazy_->decomposition_once, [&] {
    lazy_->decomposition = tridiagonal_ ? linalg::eigh(*tridiagonal_) : linalg::eigh(matrix());
  });
  return *lazy_->decomposition;
}

linalg::EigenDecomposition DiscretizedOperator::eigenpairs_below(double upper) const {
  return tridiagonal_ ? linalg::eigh_below(*tridiagonal_, upper)
                      : linalg::eigh_below(matrix(), upper);
}

std::vector<double> channel_potential(const ChannelSpec& spec, const RadialGrid& grid) {
  const double coulomb = spec.sign == CoulombSign::attractive ? -spec.gamma : spec.gamma;
  std::vector<double> v(grid.count());
  std::vector<double> u;
  if (spec.lambda != 0.0) u = spec.potential->sample(grid);
  for (std::size_t i = 0; i < v.size(); ++i) {
    v[i] = coulomb / grid.node(i);
    if (!u.empty()) v[i] -= spec.lambda * u[i];
  }
  return v;
}

DiscretizedOperator assemble_channel_operator(const ChannelSpec& spec, const RadialGrid& grid,
                                              const KineticSymbol& symbol) {
  spec.validate();
  const auto potential = channel_potential(spec, grid);
  if (symbol.kind() == KineticSymbol::Kind::schroedinger) {
    // f(s) = s/2 is linear, so f(L) = L/2 exactly; keep the band structure.
    auto t = build_centrifugal_laplacian(grid, spec.ell);
    for (double& d : t.diagonal) d *= 0.5;
    for (double& e : t.off_diagonal) e *= 0.5;
    for (std::size_t i = 0; i < potential.size(); ++i) t.diagonal[i] += potential[i];
    return DiscretizedOperator(grid, spec, symbol, std::move(t));
  }
  const auto l = centrifugal_decomposition(grid, spec.ell);
  auto matrix = build_kinetic(l->spectrum, symbol);
  matrix.add_to_diagonal(potential);
  return DiscretizedOperator(grid, spec, symbol, std::move(matrix));
}

}  // namespace scottlab
