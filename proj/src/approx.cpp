#include "fadstat/approx.hpp"

#include <cmath>

#include "fadstat/errors.hpp"
#include "fadstat/specfun.hpp"

namespace fadstat {

namespace {

// E[X^2]/E[X]^2 - 1 for one link, computed as expm1 of log-moments so the
// small-variance regime keeps full precision
double link_c(const FadingParams& p) {
  const double ln_m2 = ln_mellin(p, 3.0);
  return std::expm1(ln_m2 - 2.0 * std::log(p.gamma_bar));
}

}  // namespace

GammaFit fit_gamma_product(const PairStats& ps) {
  const double mean = ps.p1.gamma_bar * ps.p2.gamma_bar;
  const double ln_m2 = ln_mellin(ps.p1, 3.0) + ln_mellin(ps.p2, 3.0);
  const double c_pro = std::expm1(ln_m2 - 2.0 * std::log(mean));
  if (!(c_pro > 0.0))
    throw std::runtime_error("fit_gamma_product: non-positive second-moment excess");
  return {1.0 / c_pro, mean * c_pro};
}

BetaPrimeFit fit_beta_prime_ratio(const PairStats& ps) {
  const double c1 = link_c(ps.p1);
  const double c2 = link_c(ps.p2);
  if (!(c1 > 0.0) || !(c2 > 0.0))
    throw std::runtime_error("fit_beta_prime_ratio: non-positive second-moment excess");
  return {1.0 / c1, ps.p1.gamma_bar * c1, 1.0 / c2, ps.p2.gamma_bar * c2};
}

double gamma_pdf(const GammaFit& fit, double y) {
  if (!(y > 0.0)) throw DomainError("gamma_pdf: requires y > 0");
  const double ln = (fit.k - 1.0) * std::log(y) - y / fit.theta - std::lgamma(fit.k) -
                    fit.k * std::log(fit.theta);
  return std::exp(ln);
}

double gamma_cdf(const GammaFit& fit, double y) {
  if (!(y >= 0.0)) throw DomainError("gamma_cdf: requires y >= 0");
  return y == 0.0 ? 0.0 : specfun::gamma_p(fit.k, y / fit.theta);
}

double beta_prime_pdf(const BetaPrimeFit& fit, double z) {
  if (!(z > 0.0)) throw DomainError("beta_prime_pdf: requires z > 0");
  const double r = fit.theta2 / fit.theta1;
  const double w = r * z;
  const double ln_b = std::lgamma(fit.k1) + std::lgamma(fit.k2) - std::lgamma(fit.k1 + fit.k2);
  const double ln = std::log(r) + (fit.k1 - 1.0) * std::log(w) - ln_b -
                    (fit.k1 + fit.k2) * std::log1p(w);
  return std::exp(ln);
}

double beta_prime_cdf(const BetaPrimeFit& fit, double z) {
  if (!(z >= 0.0)) throw DomainError("beta_prime_cdf: requires z >= 0");
  if (z == 0.0) return 0.0;
  const double w = fit.theta2 / fit.theta1 * z;
  return specfun::beta_inc(fit.k1, fit.k2, w / (1.0 + w));
}

}  // namespace fadstat
