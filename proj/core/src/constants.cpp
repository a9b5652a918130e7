#include "scottlab/constants.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "scottlab/error.hpp"

namespace scottlab {

namespace {

void require_coupling(double gamma) {
  if (!(gamma > 0.0 && gamma < kCriticalCoupling)) {
    std::ostringstream os;
    os << "coupling " << gamma << " outside (0, 2/pi)";
    throw DomainError(os.str());
  }
}

void require_f_domain(double gamma, double t) {
  require_coupling(gamma);
  const double pole = 1.0 / pole_factor(gamma);
  if (!(t > -1.0 && t < pole)) {
    std::ostringstream os;
    os.precision(17);
    os << "F_gamma(t) needs -1 < t < " << pole << " for gamma=" << gamma << ", got t=" << t;
    throw DomainError(os.str());
  }
}

}  // namespace

double constant_a() {
  const double sqrt2 = std::sqrt(2.0);
  return 2.0 + 2.0 * sqrt2 / (kPi * (sqrt2 - 1.0));
}

double t0(double gamma) {
  require_coupling(gamma);
  return (1.0 / kPi - gamma / 2.0) / (gamma + 2.0 / kPi);
}

double pole_factor(double gamma) {
  require_coupling(gamma);
  return (kCriticalCoupling + gamma) / (kCriticalCoupling - gamma);
}

double f_gamma_quotient_form(double gamma, double t) {
  require_f_domain(gamma, t);
  const double a = constant_a();
  const double q = pole_factor(gamma);
  return std::pow(1.0 + t, 1.0 + a) / std::pow(1.0 - q * t, a);
}

double f_gamma_product_form(double gamma, double t) {
  require_f_domain(gamma, t);
  const double a = constant_a();
  const double ratio = (1.0 + t) / (1.0 - t);
  const double coupling_factor =
      (kCriticalCoupling - gamma) / (kCriticalCoupling - ratio * gamma);
  return (1.0 - t) * std::pow(ratio, 1.0 + a) * std::pow(coupling_factor, a);
}

double f_gamma(double gamma, double t) {
  const double quotient = f_gamma_quotient_form(gamma, t);
  const double product = f_gamma_product_form(gamma, t);
  if (std::abs(quotient - product) > 1e-12 * std::abs(quotient)) {
    std::ostringstream os;
    os.precision(17);
    os << "F_gamma forms disagree at gamma=" << gamma << ", t=" << t << ": " << quotient
       << " vs " << product;
    throw Error(os.str());
  }
  return quotient;
}

double f_gamma_derivative(double gamma, double t) {
  const double a = constant_a();
  const double q = pole_factor(gamma);
  return f_gamma_quotient_form(gamma, t) * ((1.0 + a) / (1.0 + t) + a * q / (1.0 - q * t));
}

Maximum m_tilde(double gamma) {
  const double bound = t0(gamma);
  constexpr int kSamples = 10000;
  const double step = 2.0 * bound / kSamples;
  int best = 0;
  double best_value = f_gamma_derivative(gamma, -bound);
  for (int k = 1; k <= kSamples; ++k) {
    const double t = k == kSamples ? bound : -bound + k * step;
    const double v = f_gamma_derivative(gamma, t);
    if (v > best_value) {
      best_value = v;
      best = k;
    }
  }
  double lo = -bound + std::max(best - 1, 0) * step;
  double hi = best + 1 >= kSamples ? bound : -bound + (best + 1) * step;
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double x1 = hi - inv_phi * (hi - lo);
  double x2 = lo + inv_phi * (hi - lo);
  double f1 = f_gamma_derivative(gamma, x1);
  double f2 = f_gamma_derivative(gamma, x2);
  while (hi - lo > 1e-10) {
    if (f1 < f2) {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + inv_phi * (hi - lo);
      f2 = f_gamma_derivative(gamma, x2);
    } else {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - inv_phi * (hi - lo);
      f1 = f_gamma_derivative(gamma, x1);
    }
  }
  Maximum result{best_value, best == kSamples ? bound : -bound + best * step};
  // Golden-section refines interior maxima; endpoints are kept if larger.
  for (double t : {lo, hi, 0.5 * (lo + hi)}) {
    const double v = f_gamma_derivative(gamma, t);
    if (v > result.value) result = Maximum{v, t};
  }
  return result;
}

double schroedinger_energy(double gamma, int n, int ell) {
  const double principal = n + ell + 1.0;
  return -gamma * gamma / (2.0 * principal * principal);
}

std::vector<EigenvalueRatio> eigenvalue_ratios(std::span<const ChannelSpectrum> relativistic,
                                               double gamma) {
  std::vector<EigenvalueRatio> out;
  for (const auto& spectrum : relativistic) {
    if (spectrum.symbol.kind() != KineticSymbol::Kind::chandrasekhar) {
      throw DomainError("empirical C_gamma needs chandrasekhar spectra");
    }
    if (spectrum.channel.perturbed()) throw DomainError("empirical C_gamma needs lambda = 0");
    if (spectrum.channel.gamma != gamma) throw DomainError("spectrum coupling differs from gamma");
    for (const auto& s : spectrum.states) {
      const double ref = schroedinger_energy(gamma, s.n, spectrum.channel.ell);
      out.push_back({s.n, spectrum.channel.ell, s.energy, ref, s.energy / ref});
    }
  }
  return out;
}

double empirical_c_gamma(std::span<const ChannelSpectrum> relativistic, double gamma) {
  const auto ratios = eigenvalue_ratios(relativistic, gamma);
  if (ratios.empty()) throw DomainError("empirical C_gamma: no eigenvalues supplied");
  double c = ratios.front().ratio;
  for (const auto& r : ratios) c = std::max(c, r.ratio);
  return c;
}

ConstantsBundle make_constants(double gamma, double c_emp) {
  ConstantsBundle b;
  b.gamma = gamma;
  b.a = constant_a();
  b.t0 = t0(gamma);
  const auto mt = m_tilde(gamma);
  b.m_tilde = mt.value;
  b.m_tilde_argmax = mt.argmax;
  b.c_emp = c_emp;
  b.m = c_emp * mt.value;
  b.d = kCriticalCoupling * b.a / (kCriticalCoupling - gamma);
  return b;
}

}  // namespace scottlab
