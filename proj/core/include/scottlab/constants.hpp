#pragma once

#include <span>
#include <vector>

#include "scottlab/spectrum.hpp"

namespace scottlab {

// A = 2 + 2^{3/2} / (pi (sqrt 2 - 1))
double constant_a();

// (1/pi - gamma/2) / (gamma + 2/pi)
double t0(double gamma);

// (2/pi + gamma) / (2/pi - gamma); F_gamma has its pole at t = 1/q.
double pole_factor(double gamma);

// F_gamma(t) = (1+t)^{1+A} / (1 - q t)^A, checked against the product form
// (1-t) ((1+t)/(1-t))^{1+A} ((2/pi - gamma) / (2/pi - gamma (1+t)/(1-t)))^A
// to 1e-12 relative. Domain: -1 < t < 1/q, 0 < gamma < 2/pi.
double f_gamma(double gamma, double t);
double f_gamma_product_form(double gamma, double t);
double f_gamma_quotient_form(double gamma, double t);

// F'(t) = F(t) ((1+A)/(1+t) + A q / (1 - q t))
double f_gamma_derivative(double gamma, double t);

struct Maximum {
  double value;
  double argmax;
};

// max of F' over [-t0, t0]: 1e4-point scan, then golden-section to 1e-10 in t.
Maximum m_tilde(double gamma);

// max over the computed (n, l) of e_n / (-gamma^2 / (2 (n+l+1)^2)).
double empirical_c_gamma(std::span<const ChannelSpectrum> relativistic, double gamma);

struct EigenvalueRatio {
  int n;
  int ell;
  double chandrasekhar;
  double schroedinger;
  double ratio;
};
std::vector<EigenvalueRatio> eigenvalue_ratios(std::span<const ChannelSpectrum> relativistic,
                                               double gamma);

struct ConstantsBundle {
  double gamma = 0.0;
  double a = 0.0;
  double t0 = 0.0;
  double m_tilde = 0.0;
  double m_tilde_argmax = 0.0;
  double c_emp = 0.0;
  double m = 0.0;  // c_emp * m_tilde
  double d = 0.0;  // (2/pi) A / (2/pi - gamma)
};

ConstantsBundle make_constants(double gamma, double c_emp);

double schroedinger_energy(double gamma, int n, int ell);

}  // namespace scottlab
