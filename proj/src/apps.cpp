#include "fadstat/apps.hpp"

#include <cmath>

#include "fadstat/errors.hpp"
#include "fadstat/quadrature.hpp"
#include "fadstat/specfun.hpp"

namespace fadstat {

EvalResult cascade_outage(const PairStats& ps, double gamma_th) {
  if (!(gamma_th > 0.0)) throw DomainError("cascade_outage: requires gamma_th > 0");
  return product_cdf(ps, gamma_th);
}

double amount_of_fading(const PairStats& ps) {
  const double m2 = product_moment(ps, 2.0);
  const double m1 = ps.p1.gamma_bar * ps.p2.gamma_bar;
  return m2 / (m1 * m1) - 1.0;
}

SecrecyScenario::SecrecyScenario(const FadingParams& sd_, const FadingParams& se_,
                                 double rate_rs_, PairPolicy policy)
    : sd(sd_), se(se_), rate_rs(rate_rs_), pair_(sd_, se_, policy) {
  if (!(rate_rs >= 0.0)) throw ParameterError("SecrecyScenario: rate_rs must be >= 0");
}

EvalResult secrecy_outage(const SecrecyScenario& sc) {
  return ratio_cdf(sc.pair(), std::exp2(sc.rate_rs));
}

EvalResult spsc(const SecrecyScenario& sc) {
  EvalResult r = ratio_cdf(sc.pair(), 1.0);
  r.value = 1.0 - r.value;
  return r;
}

namespace {

double dist(Vec2 a, Vec2 b) { return std::hypot(a.x - b.x, a.y - b.y); }

FadingParams make_link(const LinkShape& s, double d, double pl_beta) {
  return FadingParams(s.alpha, s.kappa, s.mu, s.m, std::pow(d, -pl_beta));
}

}  // namespace

IrsScenario::IrsScenario(const LinkShape& sd_, const LinkShape& sr_, const LinkShape& rd_,
                         int n, double gs_db, Vec2 ps_, Vec2 pr_, Vec2 pd_, double plb)
    : sd(make_link(sd_, dist(ps_, pd_), plb)),
      sr(make_link(sr_, dist(ps_, pr_), plb)),
      rd(make_link(rd_, dist(pr_, pd_), plb)),
      n_elements(n),
      gamma_s_db(gs_db),
      gamma_s(std::pow(10.0, gs_db / 10.0)),
      pos_s(ps_),
      pos_r(pr_),
      pos_d(pd_),
      pathloss_beta(plb) {
  if (n_elements < 0) throw ParameterError("IrsScenario: n_elements must be >= 0");
  if (!(plb > 0.0)) throw ParameterError("IrsScenario: pathloss_beta must be > 0");
}

IrsGammaParams irs_gamma_params(const IrsScenario& sc) {
  if (sc.n_elements < 1)
    throw ParameterError("irs_gamma_params: needs n_elements >= 1 (n = 0 is simulation-only)");
  const double mu_half = moment(sc.sr, 0.5) * moment(sc.rd, 0.5);
  const double sigma2 = sc.sr.gamma_bar * sc.rd.gamma_bar - mu_half * mu_half;
  if (!(sigma2 > 0.0))
    throw std::runtime_error("irs_gamma_params: degenerate per-element variance");
  const double n = static_cast<double>(sc.n_elements);
  return {n * mu_half * mu_half / sigma2, sigma2 / mu_half, mu_half, sigma2};
}

namespace {

// Both outage integrands reduce to a weight times the SD envelope CDF; the
// lambda^mu * Phi2 factor of the displayed equations is mu c^mu / theta times
// that CDF, which is how it is evaluated here (stable for any argument).
struct SdEnvelope {
  const FadingParams& p;
  DerivedConstants d;
  explicit SdEnvelope(const FadingParams& link) : p(link), d(derive_constants(link)) {}
  double operator()(double r) const {
    return r <= 0.0 ? 0.0 : detail::cdf_power_with(p, d, r * r);
  }
};

}  // namespace

EvalResult irs_outage_gamma(const IrsScenario& sc, double gamma_th) {
  if (!(gamma_th > 0.0)) throw DomainError("irs_outage_gamma: requires gamma_th > 0");
  const IrsGammaParams gp = irs_gamma_params(sc);
  if (gp.k_mom > sc.k_switch)
    throw DegenerateCaseError(
        "irs_outage_gamma: k_mom exceeds k_switch; use irs_outage_gaussian");
  const SdEnvelope env(sc.sd);
  const double w = std::sqrt(gamma_th / sc.gamma_s);
  const double T = w / gp.theta_mom;
  const double k = gp.k_mom;
  const double ln_gk = std::lgamma(k);
  auto integrand = [&](double t) {
    const double ln_w = (k - 1.0) * std::log(t) - t - ln_gk;
    if (ln_w < -700.0) return 0.0;
    return std::exp(ln_w) * env(w - t * gp.theta_mom);
  };
  const double hi_lim = std::min(T, k + 14.0 * std::sqrt(k) + 20.0);
  const auto bps = graded_breakpoints(hi_lim, std::max(std::sqrt(k) / 2.0, 0.5), 40);
  const QuadratureRule rh = composite_rule(24, bps);
  const QuadratureRule rl = composite_rule(16, bps);
  const double vh = std::min(rh.apply(integrand), 1.0);
  const double vl = rl.apply(integrand);
  return {vh, std::abs(vh - vl) + 1e-12, static_cast<int>(rh.nodes.size()), Fallback::none};
}

EvalResult irs_outage_gaussian(const IrsScenario& sc, double gamma_th) {
  if (!(gamma_th > 0.0)) throw DomainError("irs_outage_gaussian: requires gamma_th > 0");
  const IrsGammaParams gp = irs_gamma_params(sc);
  const SdEnvelope env(sc.sd);
  const double w = std::sqrt(gamma_th / sc.gamma_s);
  const double n = static_cast<double>(sc.n_elements);
  const double shift = n * gp.mu_half - w;     // N*mu - sqrt(gamma_th/gamma_s)
  const double s = std::sqrt(2.0 * n * gp.sigma2);
  const double L = shift / s;
  // envelope argument s*t - shift is zero at the lower limit and the Gaussian
  // weight is spent beyond |t| ~ 9
  const double lo = std::max(L, -9.5);
  const double hi = std::max(L, 0.0) + 9.5;
  if (!(lo < hi)) return {0.0, 0.0, 0, Fallback::none};
  auto integrand = [&](double t) {
    const double x = s * t - shift;
    if (x <= 0.0) return 0.0;
    const double e = -t * t;
    return e < -700.0 ? 0.0 : std::exp(e) * env(x);
  };
  const int cells = std::max(16, static_cast<int>(std::ceil((hi - lo) / 0.25)));
  const QuadratureRule rh = gauss_legendre(12, lo, hi, cells);
  const QuadratureRule rl = gauss_legendre(8, lo, hi, cells);
  const double vh = std::min(rh.apply(integrand) / std::sqrt(M_PI), 1.0);
  const double vl = rl.apply(integrand) / std::sqrt(M_PI);
  return {vh, std::abs(vh - vl) + 1e-12, static_cast<int>(rh.nodes.size()), Fallback::none};
}

}  // namespace fadstat
