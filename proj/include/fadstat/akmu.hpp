#pragma once

#include <cstddef>
#include <vector>

#include "fadstat/rng.hpp"

namespace fadstat {

// One alpha-kappa-mu shadowed variable in the power domain, mean gamma_bar.
struct FadingParams {
  double alpha;      // non-linearity, > 0
  double kappa;      // dominant-to-scattered power ratio, >= 0
  double mu;         // multipath clusters, > 0
  double m;          // Nakagami shadowing shape, > 0
  double gamma_bar;  // mean power, linear units, > 0

  FadingParams(double alpha, double kappa, double mu, double m, double gamma_bar);
};

struct DerivedConstants {
  double theta;
  double beta;  // mu*kappa / (mu*kappa + m), always in [0, 1)
  double c;
  double ln_theta;  // log-space copies; theta and c^mu overflow for large m
  double ln_c;
};

DerivedConstants derive_constants(const FadingParams& p);

// Density of the power variable at x >= 0.
double pdf_power(const FadingParams& p, double x);

// Distribution function of the power variable; Humbert Phi2 closed form for
// small kernel arguments, kernel quadrature beyond its stable range.
double cdf_power(const FadingParams& p, double x);

// Distribution function of the envelope r = sqrt(power).
double cdf_envelope(const FadingParams& p, double r);

// Mellin transform of the power density at real s with mu + (s-1)*2/alpha > 0.
double mellin(const FadingParams& p, double s);
double ln_mellin(const FadingParams& p, double s);

// n-th moment, n >= 0 real (half orders included), = mellin(p, n+1).
double moment(const FadingParams& p, double n);

// i.i.d. power-domain draws via the Poisson-Gamma mixture:
// xi^2 ~ Gamma(m, 1/m), P ~ Poisson(mu*kappa*xi^2), W ~ Gamma(mu+P, 1),
// X = gamma_bar * (c W)^(2/alpha). Valid for all real mu, m > 0.
void sample(const FadingParams& p, RngStream& rng, std::vector<double>& out);
std::vector<double> sample(const FadingParams& p, RngStream& rng, std::size_t count);

namespace detail {
// integral_0^X v^(mu-1) e^(-v) 1F1(m; mu; beta*v) dv, the CDF kernel shared by
// the single-variable CDF and the product/ratio Fubini forms.
double cdf_kernel(double mu, double m, double beta, double X);
// Its complete value Gamma(mu) (1-beta)^(-m); theta * complete == 1.
double ln_cdf_kernel_complete(double mu, double m, double beta);
// cdf_power with constants already derived (hot loops).
double cdf_power_with(const FadingParams& p, const DerivedConstants& d, double x);
}  // namespace detail

}  // namespace fadstat
