#pragma once

#include "fadstat/prodratio.hpp"

namespace fadstat {

// Moment-matched Gamma surrogate for the product.
struct GammaFit {
  double k;      // shape
  double theta;  // scale
};

// Per-link Gamma fits whose ratio is Beta-prime in (theta2/theta1) z.
struct BetaPrimeFit {
  double k1;
  double theta1;
  double k2;
  double theta2;
};

GammaFit fit_gamma_product(const PairStats& ps);
BetaPrimeFit fit_beta_prime_ratio(const PairStats& ps);

double gamma_pdf(const GammaFit& fit, double y);
double gamma_cdf(const GammaFit& fit, double y);

double beta_prime_pdf(const BetaPrimeFit& fit, double z);
double beta_prime_cdf(const BetaPrimeFit& fit, double z);

}  // namespace fadstat
