#include "fadstat/akmu.hpp"

#include <cmath>
#include <limits>

#include "fadstat/errors.hpp"
#include "fadstat/quadrature.hpp"
#include "fadstat/specfun.hpp"

namespace fadstat {

namespace {

constexpr double kLnTiny = -700.0;

void check_finite(double v, const char* name) {
  if (!std::isfinite(v)) throw ParameterError(std::string("FadingParams: ") + name + " must be finite");
}

}  // namespace

FadingParams::FadingParams(double alpha_, double kappa_, double mu_, double m_, double gamma_bar_)
    : alpha(alpha_), kappa(kappa_), mu(mu_), m(m_), gamma_bar(gamma_bar_) {
  check_finite(alpha, "alpha");
  check_finite(kappa, "kappa");
  check_finite(mu, "mu");
  check_finite(m, "m");
  check_finite(gamma_bar, "gamma_bar");
  if (!(alpha > 0.0)) throw ParameterError("FadingParams: alpha must be > 0");
  if (!(kappa >= 0.0)) throw ParameterError("FadingParams: kappa must be >= 0");
  if (!(mu > 0.0)) throw ParameterError("FadingParams: mu must be > 0");
  if (!(m > 0.0)) throw ParameterError("FadingParams: m must be > 0");
  if (!(gamma_bar > 0.0)) throw ParameterError("FadingParams: gamma_bar must be > 0");
}

DerivedConstants derive_constants(const FadingParams& p) {
  DerivedConstants d;
  const double mk = p.mu * p.kappa;
  d.beta = p.kappa == 0.0 ? 0.0 : mk / (mk + p.m);
  // theta = m^m / (Gamma(mu) (mu kappa + m)^m), kept in logs to survive m^m
  d.ln_theta = p.m * (std::log(p.m) - std::log(mk + p.m)) - std::lgamma(p.mu);
  d.theta = std::exp(d.ln_theta);
  const double b = p.mu + 2.0 / p.alpha;
  const double f21 = d.beta == 0.0 ? 1.0 : specfun::gauss_2f1_unit(p.m, b, p.mu, d.beta).value;
  d.ln_c = -(p.alpha / 2.0) * (d.ln_theta + std::lgamma(b) + std::log(f21));
  d.c = std::exp(d.ln_c);
  return d;
}

double pdf_power(const FadingParams& p, double x) {
  if (!(x >= 0.0)) throw DomainError("pdf_power: requires x >= 0");
  const DerivedConstants d = derive_constants(p);
  const double amu2 = p.alpha * p.mu / 2.0;
  if (x == 0.0) {
    if (amu2 > 1.0) return 0.0;
    if (amu2 == 1.0) return std::exp(d.ln_theta + std::log(p.alpha / 2.0) - p.mu * d.ln_c) / p.gamma_bar;
    return std::numeric_limits<double>::infinity();
  }
  const double lnx = std::log(x) - std::log(p.gamma_bar);
  const double lnL = (p.alpha / 2.0) * lnx - d.ln_c;  // ln(lambda/c)
  if (lnL > 690.0) return 0.0;                        // exp(-L) underflows everything
  const double L = std::exp(lnL);
  const double arg = d.beta * L;
  const double ln1f1 = d.beta == 0.0 ? 0.0 : specfun::log_kummer_1f1_pos(p.m, p.mu, arg);
  const double lnf = d.ln_theta + std::log(p.alpha / 2.0) - p.mu * d.ln_c - std::log(p.gamma_bar) +
                     (amu2 - 1.0) * lnx - L + ln1f1;
  return lnf < kLnTiny ? 0.0 : std::exp(lnf);
}

namespace detail {

namespace {

// upper limit beyond which the remaining kernel mass is below 1e-18
double kernel_cutoff(double mu, double m, double beta) {
  double V = 50.0 / (1.0 - beta);
  for (int i = 0; i < 4; ++i)
    V = (48.0 + std::abs(m - 1.0) * std::log(std::max(V, 2.0)) + std::abs(mu - 1.0)) / (1.0 - beta);
  return V;
}

}  // namespace

double ln_cdf_kernel_complete(double mu, double m, double beta) {
  return std::lgamma(mu) - m * std::log1p(-beta);
}

namespace {

// Phi2 closed form when its series is well conditioned (the conditioning
// shows up in abs_err_est); negative result signals the caller to integrate.
double try_phi2_kernel(double mu, double m, double beta, double X) {
  if (X > 20.0) return -1.0;
  const EvalResult phi2 =
      specfun::humbert_phi2(mu - m, m, mu + 1.0, -X, -X * (1.0 - beta));
  if (!(phi2.value > 0.0) || phi2.abs_err_est > 1e-12 * phi2.value) return -1.0;
  return phi2.value;
}

double quad_kernel(double ln_theta, double mu, double m, double beta, double X) {
  // integrate in w = v^mu: the v^(mu-1) factor is absorbed exactly, so the
  // integrand stays bounded at the origin for any mu > 0
  const double hi = std::min(X, kernel_cutoff(mu, m, beta));
  std::vector<double> bps = graded_breakpoints(hi, 1.0 / (1.0 - beta), 42);
  for (double& b : bps) b = std::pow(b, mu);
  const QuadratureRule rule = composite_rule(32, bps);
  double acc = 0.0;
  for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
    const double v = std::pow(rule.nodes[i], 1.0 / mu);
    double ln = ln_theta - v - std::log(mu);
    if (beta > 0.0) ln += specfun::log_kummer_1f1_pos(m, mu, beta * v);
    if (ln > kLnTiny) acc += rule.weights[i] * std::exp(ln);
  }
  return acc;
}

}  // namespace

double cdf_kernel(double mu, double m, double beta, double X) {
  if (!(X >= 0.0)) throw DomainError("cdf_kernel: requires X >= 0");
  if (X == 0.0) return 0.0;
  const double phi2 = try_phi2_kernel(mu, m, beta, X);
  if (phi2 >= 0.0) return std::pow(X, mu) / mu * phi2;
  return quad_kernel(0.0, mu, m, beta, X);
}

}  // namespace detail

namespace {

// normalized kernel CDF theta * int_0^X ..., i.e. the power CDF at lambda/c = X
double cdf_kernel_normalized(const DerivedConstants& d, double mu, double m, double X) {
  if (X <= 0.0) return 0.0;
  // past the kernel cutoff the remaining mass is below 1e-18 of the total,
  // which normalizes to exactly 1; returning 1 keeps grids monotone there
  if (X >= detail::kernel_cutoff(mu, m, d.beta)) return 1.0;
  const double phi2 = detail::try_phi2_kernel(mu, m, d.beta, X);
  if (phi2 >= 0.0) {
    const double lnv = d.ln_theta + mu * std::log(X) - std::log(mu);
    return lnv < kLnTiny ? 0.0 : std::exp(lnv) * phi2;
  }
  return std::min(detail::quad_kernel(d.ln_theta, mu, m, d.beta, X), 1.0);
}

}  // namespace

namespace detail {

double cdf_power_with(const FadingParams& p, const DerivedConstants& d, double x) {
  if (!(x >= 0.0)) throw DomainError("cdf_power: requires x >= 0");
  if (x == 0.0) return 0.0;
  const double lnL = (p.alpha / 2.0) * (std::log(x) - std::log(p.gamma_bar)) - d.ln_c;
  if (lnL > 690.0) return 1.0;
  return cdf_kernel_normalized(d, p.mu, p.m, std::exp(lnL));
}

}  // namespace detail

double cdf_power(const FadingParams& p, double x) {
  return detail::cdf_power_with(p, derive_constants(p), x);
}

double cdf_envelope(const FadingParams& p, double r) {
  if (!(r >= 0.0)) throw DomainError("cdf_envelope: requires r >= 0");
  return cdf_power(p, r * r);
}

double ln_mellin(const FadingParams& p, double s) {
  const double b = p.mu + (s - 1.0) * 2.0 / p.alpha;
  if (!(b > 0.0)) throw DomainError("mellin: requires mu + (s-1)*2/alpha > 0");
  const DerivedConstants d = derive_constants(p);
  const double f21 = d.beta == 0.0 ? 1.0 : specfun::gauss_2f1_unit(p.m, b, p.mu, d.beta).value;
  return d.ln_theta + (s - 1.0) * std::log(p.gamma_bar) + (2.0 * (s - 1.0) / p.alpha) * d.ln_c +
         std::lgamma(b) + std::log(f21);
}

double mellin(const FadingParams& p, double s) { return std::exp(ln_mellin(p, s)); }

double moment(const FadingParams& p, double n) {
  if (!(n >= 0.0)) throw DomainError("moment: requires n >= 0");
  return mellin(p, n + 1.0);
}

void sample(const FadingParams& p, RngStream& rng, std::vector<double>& out) {
  const DerivedConstants d = derive_constants(p);
  std::gamma_distribution<double> shadow(p.m, 1.0 / p.m);
  std::gamma_distribution<double> cluster;
  std::poisson_distribution<long> pois;
  using gamma_param = std::gamma_distribution<double>::param_type;
  using pois_param = std::poisson_distribution<long>::param_type;
  const double two_over_alpha = 2.0 / p.alpha;
  auto& eng = rng.engine();
  for (double& x : out) {
    double shape = p.mu;
    if (p.kappa > 0.0) {
      const double xi2 = shadow(eng);
      shape += static_cast<double>(pois(eng, pois_param(p.mu * p.kappa * xi2)));
    }
    const double w = cluster(eng, gamma_param(shape, 1.0));
    x = p.gamma_bar * std::pow(d.c * w, two_over_alpha);
  }
}

std::vector<double> sample(const FadingParams& p, RngStream& rng, std::size_t count) {
  if (count < 1) throw ParameterError("sample: count must be >= 1");
  std::vector<double> out(count);
  sample(p, rng, out);
  return out;
}

}  // namespace fadstat
