#include "fadstat/prodratio.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "fadstat/errors.hpp"
#include "fadstat/quadrature.hpp"
#include "fadstat/specfun.hpp"

namespace fadstat {

namespace {

constexpr double kLnTiny = -700.0;
constexpr double kInf = std::numeric_limits<double>::infinity();

double log1f1_pos(double a, double b, double x) {
  return x == 0.0 ? 0.0 : specfun::log_kummer_1f1_pos(a, b, x);
}

// d/dx ln 1F1(a;b;x) for a,b > 0, x >= 0
double dlog1f1_pos(double a, double b, double x) {
  if (x == 0.0) return a / b;
  if (x > 600.0) return 1.0 + (a - b) / x;
  return (a / b) * std::exp(log1f1_pos(a + 1.0, b + 1.0, x) - log1f1_pos(a, b, x));
}

}  // namespace

namespace detail {

// Normalized CDF of the single-link kernel: R(X) = theta * int_0^X v^(mu-1)
// e^(-v) 1F1(m; mu; beta v) dv, tabulated once per link. R is the link's own
// power CDF expressed in the kernel variable, R(inf) = 1 exactly.
class KernelCdf {
 public:
  KernelCdf(double mu, double m, double beta, double ln_theta)
      : mu_(mu), m_(m), beta_(beta), ln_theta_(ln_theta) {
    build_low();
    build_high();
  }

  double operator()(double X) const {
    if (X <= 0.0) return 0.0;
    if (X <= lo_edge_) return asymptote(X);
    if (X <= mid_edge_) return eval_low(X);
    if (X >= hx_.back()) return 1.0;
    return eval_high(X);
  }

 private:
  double ln_f(double v) const {
    double ln = ln_theta_ + (mu_ - 1.0) * std::log(v) - v;
    if (beta_ > 0.0) ln += log1f1_pos(m_, mu_, beta_ * v);
    return ln;
  }
  double f(double v) const {
    const double ln = ln_f(v);
    return ln < kLnTiny ? 0.0 : std::exp(ln);
  }
  double fprime(double v) const {
    const double g = (mu_ - 1.0) / v - 1.0 + (beta_ > 0.0 ? beta_ * dlog1f1_pos(m_, mu_, beta_ * v) : 0.0);
    return f(v) * g;
  }

  double asymptote(double X) const {
    // leading behaviour theta X^mu / mu with the first Phi2 correction
    const double ln = ln_theta_ + mu_ * std::log(X) - std::log(mu_);
    if (ln < kLnTiny) return 0.0;
    const double corr = 1.0 - X * (mu_ - m_ * beta_ + (1.0 - beta_) * 0.0) / (mu_ + 1.0);
    return std::exp(ln) * std::max(corr, 0.5);
  }

  void build_low() {
    const int n = 1200;
    lo_edge_ = 1e-6;
    mid_edge_ = 20.0;
    lx_.resize(n);
    lr_.resize(n);
    ld_.resize(n);
    const double l0 = std::log(lo_edge_), l1 = std::log(mid_edge_);
    const auto& [xb, wb] = gauss_legendre_base(16);
    double acc = asymptote(lo_edge_), comp = 0.0;
    for (int i = 0; i < n; ++i) {
      lx_[i] = l0 + (l1 - l0) * i / (n - 1);
      if (i > 0) {
        const double a = std::exp(lx_[i - 1]), b = std::exp(lx_[i]);
        const double mid = 0.5 * (a + b), hw = 0.5 * (b - a);
        double part = 0.0;
        for (int k = 0; k < 16; ++k) part += hw * wb[k] * f(mid + hw * xb[k]);
        // Kahan update keeps the long cumulative sum tight
        const double yk = part - comp, tk = acc + yk;
        comp = (tk - acc) - yk;
        acc = tk;
      }
      lr_[i] = std::log(acc);
      const double X = std::exp(lx_[i]);
      ld_[i] = X * f(X) / acc;  // d ln R / d ln X
    }
  }

  void build_high() {
    double V = 50.0 / (1.0 - beta_);
    for (int i = 0; i < 4; ++i)
      V = (48.0 + std::abs(m_ - 1.0) * std::log(std::max(V, 2.0)) + std::abs(mu_ - 1.0)) /
          (1.0 - beta_);
    V = std::max(V, 40.0);
    const double h = 0.5 / (1.0 - beta_);
    const int cells = std::max(40, static_cast<int>(std::ceil((V - mid_edge_) / h)));
    const auto& [xb, wb] = gauss_legendre_base(16);
    hx_.resize(cells + 1);
    hr_.resize(cells + 1);
    hf_.resize(cells + 1);
    hfp_.resize(cells + 1);
    double acc = std::exp(lr_.back()), comp = 0.0;
    for (int i = 0; i <= cells; ++i) {
      hx_[i] = mid_edge_ + (V - mid_edge_) * i / cells;
      if (i > 0) {
        const double mid = 0.5 * (hx_[i - 1] + hx_[i]), hw = 0.5 * (hx_[i] - hx_[i - 1]);
        double part = 0.0;
        for (int k = 0; k < 16; ++k) part += hw * wb[k] * f(mid + hw * xb[k]);
        const double yk = part - comp, tk = acc + yk;
        comp = (tk - acc) - yk;
        acc = tk;
      }
      hr_[i] = std::min(acc, 1.0);
      hf_[i] = f(hx_[i]);
      hfp_[i] = fprime(hx_[i]);
    }
  }

  double eval_low(double X) const {
    const double lx = std::log(X);
    const auto it = std::upper_bound(lx_.begin(), lx_.end(), lx);
    const std::size_t j = std::min<std::size_t>(
        lx_.size() - 2, static_cast<std::size_t>(std::max<std::ptrdiff_t>(0, it - lx_.begin() - 1)));
    const double h = lx_[j + 1] - lx_[j];
    const double t = (lx - lx_[j]) / h;
    // cubic Hermite in (ln X, ln R)
    const double t2 = t * t, t3 = t2 * t;
    const double h00 = 2 * t3 - 3 * t2 + 1, h10 = t3 - 2 * t2 + t;
    const double h01 = -2 * t3 + 3 * t2, h11 = t3 - t2;
    const double lr = h00 * lr_[j] + h10 * h * ld_[j] + h01 * lr_[j + 1] + h11 * h * ld_[j + 1];
    return std::exp(lr);
  }

  double eval_high(double X) const {
    const auto it = std::upper_bound(hx_.begin(), hx_.end(), X);
    const std::size_t j = std::min<std::size_t>(
        hx_.size() - 2, static_cast<std::size_t>(std::max<std::ptrdiff_t>(0, it - hx_.begin() - 1)));
    const double h = hx_[j + 1] - hx_[j];
    const double t = (X - hx_[j]) / h;
    const double t2 = t * t, t3 = t2 * t, t4 = t3 * t, t5 = t4 * t;
    // quintic Hermite with value/f/f' at both ends
    const double H0 = 1 - 10 * t3 + 15 * t4 - 6 * t5;
    const double H1 = t - 6 * t3 + 8 * t4 - 3 * t5;
    const double H2 = 0.5 * (t2 - 3 * t3 + 3 * t4 - t5);
    const double H3 = 10 * t3 - 15 * t4 + 6 * t5;
    const double H4 = -4 * t3 + 7 * t4 - 3 * t5;
    const double H5 = 0.5 * (t3 - 2 * t4 + t5);
    const double r = H0 * hr_[j] + h * H1 * hf_[j] + h * h * H2 * hfp_[j] + H3 * hr_[j + 1] +
                     h * H4 * hf_[j + 1] + h * h * H5 * hfp_[j + 1];
    return std::min(std::max(r, 0.0), 1.0);
  }

  double mu_, m_, beta_, ln_theta_;
  double lo_edge_ = 1e-6, mid_edge_ = 20.0;
  std::vector<double> lx_, lr_, ld_;        // low range, logs
  std::vector<double> hx_, hr_, hf_, hfp_;  // high range, quintic data
};

// Semi-infinite node set with the t-link field cached at every node.
struct FieldNodes {
  std::vector<double> t, w, lnt;
  std::vector<double> lnf_norm;  // ln[theta_j t^(mu_j - 1) e^(-t) 1F1(m_j; mu_j; beta_j t)]
  int head = 0;                  // node count of the largest-t cell (coverage probe)

  // the field decays like t^(mu+m-1) e^(-(1-beta) t); pick the substitution
  // rate so the node range reaches past that tail
  static double field_rate(const FadingParams& pj, const DerivedConstants& dj, int dyadic) {
    const double lam = std::max(1.0 - dj.beta, 1e-6);
    double T = 50.0 / lam;
    for (int i = 0; i < 5; ++i)
      T = (48.0 + (pj.m + pj.mu + 4.0) * std::log(std::max(T, 2.0))) / lam;
    return std::min(lam, (dyadic + 2.0) * M_LN2 / T);
  }

  FieldNodes() = default;
  FieldNodes(const FadingParams& pj, const DerivedConstants& dj, int order, int panels, int dyadic,
             double rate) {
    const QuadratureRule rule = semi_infinite_rule(order, panels, rate, dyadic);
    const std::size_t n = rule.nodes.size();
    head = order;
    t = rule.nodes;
    w = rule.weights;
    lnt.resize(n);
    lnf_norm.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      lnt[i] = std::log(t[i]);
      lnf_norm[i] = dj.ln_theta + (pj.mu - 1.0) * lnt[i] - t[i] +
                    (dj.beta > 0.0 ? log1f1_pos(pj.m, pj.mu, dj.beta * t[i]) : 0.0);
    }
  }
};

struct PairCache {
  KernelCdf R1, R2;
  FieldNodes f2_hi, f2_lo;  // t-link = link 2 (product, ratio below the branch point)
  FieldNodes f1_hi, f1_lo;  // t-link = link 1 (ratio above the branch point)
  const FadingParams p1, p2;
  const DerivedConstants d1, d2;
  const PairPolicy pol;

  PairCache(const FadingParams& p1_, const DerivedConstants& d1_, const FadingParams& p2_,
            const DerivedConstants& d2_, const PairPolicy& pol_)
      : R1(p1_.mu, p1_.m, d1_.beta, d1_.ln_theta),
        R2(p2_.mu, p2_.m, d2_.beta, d2_.ln_theta),
        f2_hi(p2_, d2_, pol_.quad_order, pol_.quad_panels, pol_.quad_dyadic,
              FieldNodes::field_rate(p2_, d2_, pol_.quad_dyadic)),
        f2_lo(p2_, d2_, std::max(12, pol_.quad_order * 3 / 5), pol_.quad_panels, pol_.quad_dyadic,
              FieldNodes::field_rate(p2_, d2_, pol_.quad_dyadic)),
        f1_hi(p1_, d1_, pol_.quad_order, pol_.quad_panels, pol_.quad_dyadic,
              FieldNodes::field_rate(p1_, d1_, pol_.quad_dyadic)),
        f1_lo(p1_, d1_, std::max(12, pol_.quad_order * 3 / 5), pol_.quad_panels, pol_.quad_dyadic,
              FieldNodes::field_rate(p1_, d1_, pol_.quad_dyadic)),
        p1(p1_),
        p2(p2_),
        d1(d1_),
        d2(d2_),
        pol(pol_) {}

  // deeper replacement when an evaluation detects unspent tail mass
  FieldNodes deepened(bool link2, int level, int order) const {
    const FadingParams& pj = link2 ? p2 : p1;
    const DerivedConstants& dj = link2 ? d2 : d1;
    const int dy = pol.quad_dyadic + 14 * level;
    const double rate = FieldNodes::field_rate(pj, dj, pol.quad_dyadic) / std::pow(2.0, level);
    return FieldNodes(pj, dj, order, pol.quad_panels, dy, rate);
  }
};

}  // namespace detail

PairStats::PairStats(const FadingParams& link1, const FadingParams& link2, PairPolicy pol)
    : p1(link1), p2(link2), d1(derive_constants(link1)), d2(derive_constants(link2)), policy(pol) {
  ln_delta = -(2.0 / p1.alpha) * d1.ln_c - (2.0 / p2.alpha) * d2.ln_c -
             std::log(p1.gamma_bar) - std::log(p2.gamma_bar);
  ln_zeta = std::log(p2.gamma_bar) - std::log(p1.gamma_bar) - (2.0 / p1.alpha) * d1.ln_c +
            (2.0 / p2.alpha) * d2.ln_c;
  delta = std::exp(ln_delta);
  zeta = std::exp(ln_zeta);
  if (!(delta > 0.0) || !std::isfinite(delta) || !(zeta > 0.0) || !std::isfinite(zeta))
    throw ParameterError("PairStats: derived delta/zeta not positive finite");
  cache_ = std::make_shared<const detail::PairCache>(p1, d1, p2, d2, policy);
}

namespace {

struct SumResult {
  double ln_total = -kInf;
  double tail_share = 0.0;  // weight of the largest-t cell; >0 flags truncation
};

// Eq.-(20)-type integral: pref * sum_t w exp(lnf_norm + pw*ln t + ln1F1(m_i;mu_i;beta_i*u) - u)
// with u = bx * t^ex; evaluated as a weighted log-sum-exp.
SumResult laplace_sum(const detail::FieldNodes& nodes, double pw, double ln_bx, double ex,
                      double beta_i, double mi, double mui) {
  const std::size_t n = nodes.t.size();
  std::vector<double> g(n, -kInf);
  double gmax = -kInf;
  for (std::size_t i = 0; i < n; ++i) {
    const double ln_u = ln_bx + ex * nodes.lnt[i];
    if (ln_u > 690.0) continue;  // exp(-u) underflows the term
    const double u = std::exp(ln_u);
    double gi = nodes.lnf_norm[i] + pw * nodes.lnt[i] - u;
    if (beta_i > 0.0 && u > 0.0) gi += log1f1_pos(mi, mui, beta_i * u);
    if (gi == gi) {
      g[i] = gi;
      gmax = std::max(gmax, gi);
    }
  }
  if (gmax == -kInf) return {};
  double acc = 0.0, head = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    if (g[i] == -kInf) continue;
    const double c = nodes.w[i] * std::exp(g[i] - gmax);
    acc += c;
    if (i < static_cast<std::size_t>(nodes.head)) head += c;
  }
  if (!(acc > 0.0)) return {};
  return {gmax + std::log(acc), head / acc};
}

constexpr double kTailShare = 1e-11;
constexpr int kMaxDeepen = 3;

double checked_positive(double x, const char* what) {
  if (!(x > 0.0)) throw DomainError(std::string(what) + ": argument must be > 0");
  return x;
}

// stop after three consecutive terms that decay with a geometric tail bound
// below tol*scale (a single dip is not convergence)
struct TailStop {
  double prev = -1.0;
  int run = 0;
  bool done(double term_abs, double tol, double scale) {
    bool small = false;
    if (prev > 0.0 && term_abs < prev) {
      const double r = term_abs / prev;
      small = term_abs * r / (1.0 - r) < tol * scale;
    }
    prev = term_abs;
    run = small ? run + 1 : 0;
    return run >= 3;
  }
};

}  // namespace

// --- product ---

namespace {

// hi/lo evaluation with automatic deepening when the largest-t cell still
// carries weight (integrand support beyond the cached node range)
template <class Eval>
EvalResult eval_with_retry(const PairStats& ps, bool t_is_link2, Eval&& ev) {
  const auto& C = ps.cache();
  const detail::FieldNodes& hi0 = t_is_link2 ? C.f2_hi : C.f1_hi;
  const detail::FieldNodes& lo0 = t_is_link2 ? C.f2_lo : C.f1_lo;
  std::pair<double, double> rh = ev(hi0);  // (value, tail_share)
  int level = 0;
  detail::FieldNodes deep_hi;
  while (rh.second > kTailShare && level < kMaxDeepen) {
    ++level;
    deep_hi = C.deepened(t_is_link2, level, ps.policy.quad_order);
    rh = ev(deep_hi);
  }
  std::pair<double, double> rl;
  int nodes_used;
  if (level == 0) {
    rl = ev(lo0);
    nodes_used = static_cast<int>(hi0.t.size());
  } else {
    const detail::FieldNodes deep_lo =
        C.deepened(t_is_link2, level, std::max(12, ps.policy.quad_order * 3 / 5));
    rl = ev(deep_lo);
    nodes_used = static_cast<int>(deep_hi.t.size());
  }
  const double v = rh.first, vl = rl.first;
  return {v, std::abs(v - vl) + 1e-15 * std::abs(v), nodes_used, Fallback::none};
}

}  // namespace

EvalResult product_pdf(const PairStats& ps, double y) {
  checked_positive(y, "product_pdf");
  const double rho = ps.p1.alpha / ps.p2.alpha;
  const double ln_b3 = (ps.p1.alpha / 2.0) * (ps.ln_delta + std::log(y));
  // prefactor alpha1 theta1 delta b3^(mu1 - 2/alpha1) / 2; theta2 lives in lnf_norm
  const double ln_pref = std::log(ps.p1.alpha / 2.0) + ps.d1.ln_theta + ps.ln_delta +
                         (ps.p1.mu - 2.0 / ps.p1.alpha) * ln_b3;
  return eval_with_retry(ps, true, [&](const detail::FieldNodes& n) {
    const SumResult s =
        laplace_sum(n, -rho * ps.p1.mu, ln_b3, -rho, ps.d1.beta, ps.p1.m, ps.p1.mu);
    const double ln = ln_pref + s.ln_total;
    return std::make_pair(ln < kLnTiny ? 0.0 : std::exp(ln), s.tail_share);
  });
}

namespace {

std::pair<double, double> product_cdf_sum(const PairStats& ps, double ln_b3,
                                          const detail::FieldNodes& nodes) {
  const auto& C = ps.cache();
  const double rho = ps.p1.alpha / ps.p2.alpha;
  double acc = 0.0, head = 0.0;
  for (std::size_t i = 0; i < nodes.t.size(); ++i) {
    if (nodes.lnf_norm[i] <= kLnTiny) continue;
    const double ln_u = ln_b3 - rho * nodes.lnt[i];
    const double R = ln_u > 690.0 ? 1.0 : C.R1(std::exp(ln_u));
    if (R <= 0.0) continue;
    const double c = nodes.w[i] * std::exp(nodes.lnf_norm[i]) * R;
    acc += c;
    if (i < static_cast<std::size_t>(nodes.head)) head += c;
  }
  return {std::min(acc, 1.0), acc > 0.0 ? head / acc : 0.0};
}

}  // namespace

EvalResult product_cdf(const PairStats& ps, double y) {
  if (!(y >= 0.0)) throw DomainError("product_cdf: requires y >= 0");
  if (y == 0.0) return {0.0, 0.0, 0, Fallback::none};
  const double ln_b3 = (ps.p1.alpha / 2.0) * (ps.ln_delta + std::log(y));
  EvalResult r = eval_with_retry(
      ps, true, [&](const detail::FieldNodes& n) { return product_cdf_sum(ps, ln_b3, n); });
  r.abs_err_est += 2e-9;  // kernel-table interpolation budget
  return r;
}

std::vector<double> product_cdf_grid(const PairStats& ps, std::span<const double> ys) {
  std::vector<double> out(ys.size());
  for (std::size_t i = 0; i < ys.size(); ++i)
    out[i] = ys[i] <= 0.0 ? 0.0 : product_cdf(ps, ys[i]).value;
  return out;
}

EvalResult product_mgf(const PairStats& ps, double s) {
  if (!(s < 0.0)) throw DomainError("product_mgf: requires s < 0");
  // rate floor keeps the node range matched to the density's own scale when
  // s -> 0-, where e^{sy} no longer localizes the integrand
  const double rate = std::max(0.5 * (-s), 0.15 / (ps.p1.gamma_bar * ps.p2.gamma_bar));
  const QuadratureRule outer = semi_infinite_rule(24, 4, rate, 44);
  const QuadratureRule outer_lo = semi_infinite_rule(16, 4, rate, 44);
  double err_inner = 0.0;
  auto integrand = [&](double y) {
    const EvalResult f = product_pdf(ps, y);
    err_inner = std::max(err_inner, f.abs_err_est);
    return std::exp(s * y) * f.value;
  };
  const double vh = outer.apply(integrand);
  const double vl = outer_lo.apply(integrand);
  return {vh, std::abs(vh - vl) + err_inner,
          static_cast<int>(outer.nodes.size() + outer_lo.nodes.size()), Fallback::none};
}

double product_moment(const PairStats& ps, double n) {
  if (!(n >= 0.0)) throw DomainError("product_moment: requires n >= 0");
  return std::exp(ln_mellin(ps.p1, n + 1.0) + ln_mellin(ps.p2, n + 1.0));
}

// --- ratio ---

namespace {

}  // namespace

EvalResult ratio_pdf(const PairStats& ps, double z) {
  checked_positive(z, "ratio_pdf");
  const double ln_zz = ps.ln_zeta + std::log(z);
  if (ln_zz <= 0.0) {
    // Eq. 21 top: t-link is link 2, expansion link is link 1
    const double rho = ps.p1.alpha / ps.p2.alpha;
    const double ln_b5 = (ps.p1.alpha / 2.0) * ln_zz;
    const double ln_pref = std::log(ps.p1.alpha / 2.0) + ps.d1.ln_theta + ps.ln_zeta +
                           (ps.p1.mu - 2.0 / ps.p1.alpha) * ln_b5;
    return eval_with_retry(ps, true, [&](const detail::FieldNodes& n) {
      const SumResult s =
          laplace_sum(n, rho * ps.p1.mu, ln_b5, rho, ps.d1.beta, ps.p1.m, ps.p1.mu);
      const double ln = ln_pref + s.ln_total;
      return std::make_pair(ln < kLnTiny ? 0.0 : std::exp(ln), s.tail_share);
    });
  }
  // Eq. 21 bottom: beta6 = (zeta z)^(-alpha2/2), t-link = link 1
  const double rho = ps.p2.alpha / ps.p1.alpha;
  const double ln_b6 = -(ps.p2.alpha / 2.0) * ln_zz;
  const double ln_pref = std::log(ps.p2.alpha / 2.0) + ps.d2.ln_theta + ps.ln_zeta +
                         (ps.p2.mu + 2.0 / ps.p2.alpha) * ln_b6;
  return eval_with_retry(ps, false, [&](const detail::FieldNodes& n) {
    const SumResult s = laplace_sum(n, rho * ps.p2.mu, ln_b6, rho, ps.d2.beta, ps.p2.m, ps.p2.mu);
    const double ln = ln_pref + s.ln_total;
    return std::make_pair(ln < kLnTiny ? 0.0 : std::exp(ln), s.tail_share);
  });
}

namespace {

std::pair<double, double> ratio_cdf_low_sum(const PairStats& ps, double ln_zz, bool swapped,
                                            const detail::FieldNodes& nodes) {
  // F(z) = sum_t f_norm(t-link) * R_a((zeta z)^(alpha_a/2) t^(alpha_a/alpha_b))
  const auto& C = ps.cache();
  const double alpha_a = swapped ? ps.p2.alpha : ps.p1.alpha;
  const double alpha_b = swapped ? ps.p1.alpha : ps.p2.alpha;
  const double rho = alpha_a / alpha_b;
  const double ln_b5 = (alpha_a / 2.0) * ln_zz;
  double acc = 0.0, head = 0.0;
  for (std::size_t i = 0; i < nodes.t.size(); ++i) {
    if (nodes.lnf_norm[i] <= kLnTiny) continue;
    const double ln_u = ln_b5 + rho * nodes.lnt[i];
    const double u = ln_u > 690.0 ? kInf : std::exp(ln_u);
    const double R = swapped ? C.R2(u) : C.R1(u);
    if (R <= 0.0) continue;
    const double c = nodes.w[i] * std::exp(nodes.lnf_norm[i]) * R;
    acc += c;
    if (i < static_cast<std::size_t>(nodes.head)) head += c;
  }
  return {std::min(acc, 1.0), acc > 0.0 ? head / acc : 0.0};
}

}  // namespace

EvalResult ratio_cdf(const PairStats& ps, double z) {
  if (!(z >= 0.0)) throw DomainError("ratio_cdf: requires z >= 0");
  if (z == 0.0) return {0.0, 0.0, 0, Fallback::none};
  const double ln_zz = ps.ln_zeta + std::log(z);
  EvalResult r;
  if (ln_zz <= 0.0) {
    r = eval_with_retry(ps, true, [&](const detail::FieldNodes& n) {
      return ratio_cdf_low_sum(ps, ln_zz, false, n);
    });
  } else {
    // P(Z<=z) = 1 - P(X2/X1 <= 1/z); the swapped pair sits below its branch point
    r = eval_with_retry(ps, false, [&](const detail::FieldNodes& n) {
      return ratio_cdf_low_sum(ps, -ln_zz, true, n);
    });
    r.value = 1.0 - r.value;
  }
  r.abs_err_est += 2e-9;  // kernel-table interpolation budget
  return r;
}

std::vector<double> ratio_cdf_grid(const PairStats& ps, std::span<const double> zs) {
  std::vector<double> out(zs.size());
  for (std::size_t i = 0; i < zs.size(); ++i)
    out[i] = zs[i] <= 0.0 ? 0.0 : ratio_cdf(ps, zs[i]).value;
  return out;
}

EvalResult ratio_mgf(const PairStats& ps, double s) {
  if (!(s < 0.0)) throw DomainError("ratio_mgf: requires s < 0");
  const double zb = 1.0 / ps.zeta;  // branch point
  double err_inner = 0.0;
  auto f = [&](double z) {
    const EvalResult r = ratio_pdf(ps, z);
    err_inner = std::max(err_inner, r.abs_err_est);
    return std::exp(s * z) * r.value;
  };
  // [0, zb] with end grading, then the tail by the exponential substitution
  const auto bps = graded_breakpoints(zb, std::max(zb / 16.0, 1e-300), 44);
  const QuadratureRule head_hi = composite_rule(32, bps);
  const QuadratureRule head_lo = composite_rule(20, bps);
  const double scale = ps.p1.gamma_bar / ps.p2.gamma_bar + zb;
  const double rate = std::max(0.5 * (-s), 0.15 / scale);
  const QuadratureRule tail_hi = semi_infinite_rule(24, 4, rate, 44);
  const QuadratureRule tail_lo = semi_infinite_rule(16, 4, rate, 44);
  auto ftail = [&](double t) { return f(zb + t); };
  const double vh = head_hi.apply(f) + tail_hi.apply(ftail);
  const double vl = head_lo.apply(f) + tail_lo.apply(ftail);
  return {vh, std::abs(vh - vl) + err_inner,
          static_cast<int>(head_hi.nodes.size() + tail_hi.nodes.size()), Fallback::none};
}

double ratio_moment(const PairStats& ps, double n) {
  if (!(n >= 0.0)) throw DomainError("ratio_moment: requires n >= 0");
  if (!(ps.p2.mu > 2.0 * n / ps.p2.alpha))
    throw MomentUndefinedError("ratio_moment: requires mu2 > 2n/alpha2 (heavy 1/X2 tail)");
  return std::exp(ln_mellin(ps.p1, n + 1.0) + ln_mellin(ps.p2, 1.0 - n));
}

// --- series cross-check paths ---

EvalResult product_pdf_series(const PairStats& ps, double y) {
  checked_positive(y, "product_pdf_series");
  const double x = ps.delta * y;
  const double w1 = 2.0 / ps.p1.alpha, w2 = 2.0 / ps.p2.alpha;
  const double tol = ps.policy.tol;
  double sum = 0.0, herr = 0.0;
  int hcount = 0;
  double au = 1.0;  // (m1)_u beta1^u / ((mu1)_u u!)
  TailStop row_stop;
  for (int u = 0; u < ps.policy.max_uv; ++u) {
    double row = 0.0, auv = au;
    TailStop term_stop;
    for (int v = 0; v < ps.policy.max_uv; ++v) {
      const specfun::HParams hp{ps.p1.mu + u - w1, w1, ps.p2.mu + v - w2, w2};
      const EvalResult h = specfun::mellin_barnes_h(specfun::HCase::H20_02, x, hp);
      ++hcount;
      const double term = auv * h.value;
      row += term;
      herr += auv * h.abs_err_est;
      if (term_stop.done(std::abs(term), tol, std::max(std::abs(sum + row), 1e-300))) break;
      auv *= (ps.p2.m + v) * ps.d2.beta / ((ps.p2.mu + v) * (v + 1.0));
      if (auv == 0.0) break;
      if (v + 1 == ps.policy.max_uv)
        throw AccuracyError("product_pdf_series: inner index budget exceeded",
                            ps.delta * ps.d1.theta * ps.d2.theta * (sum + row), herr);
    }
    sum += row;
    if (row_stop.done(std::abs(row), tol, std::abs(sum))) break;
    au *= (ps.p1.m + u) * ps.d1.beta / ((ps.p1.mu + u) * (u + 1.0));
    if (au == 0.0) break;
    if (u + 1 == ps.policy.max_uv)
      throw AccuracyError("product_pdf_series: row budget exceeded",
                          ps.delta * ps.d1.theta * ps.d2.theta * sum, herr);
  }
  const double pref = std::exp(ps.ln_delta + ps.d1.ln_theta + ps.d2.ln_theta);
  return {pref * sum, pref * (herr + tol * std::abs(sum)), hcount, Fallback::none};
}

namespace {

// one residue n-series: sum_n (-1)^n/n! Gamma(g0 + rho*n) q^n, ln_q < 0
double residue_inner(double g0, double rho, double ln_q, double tol, int cap, int& used) {
  double sum = 0.0;
  double ln_nf = 0.0;  // ln n!
  int small_run = 0;
  for (int n = 0; n < cap; ++n) {
    if (n > 0) ln_nf += std::log(static_cast<double>(n));
    const double ln_t = std::lgamma(g0 + rho * n) + n * ln_q - ln_nf;
    const double term = (n % 2 == 0 ? 1.0 : -1.0) * std::exp(ln_t);
    sum += term;
    ++used;
    if (std::abs(term) < tol * std::abs(sum) + 1e-300) {
      if (++small_run == 3) return sum;
    } else {
      small_run = 0;
    }
  }
  throw AccuracyError("ratio_pdf_series: residue tail did not converge", sum, 0.0);
}

// triple residue expansion of Eq. (15); pa is the link whose pole family is
// expanded (link 1 below the branch point, link 2 above), pow_sign carries the
// -2/alpha vs +2/alpha difference between the two branch exponents
double ratio_residue_series(const PairStats& ps, double abs_ln_zz, bool low, double tol,
                            int max_uv, int& used, double& err) {
  const FadingParams& pa = low ? ps.p1 : ps.p2;
  const FadingParams& pb = low ? ps.p2 : ps.p1;
  const DerivedConstants& da = low ? ps.d1 : ps.d2;
  const DerivedConstants& db = low ? ps.d2 : ps.d1;
  const double rho = pa.alpha / pb.alpha;
  const double w_a = 2.0 / pa.alpha;
  const double pow_base = low ? pa.mu - w_a : pa.mu + w_a;
  const double ln_q = -(pa.alpha / 2.0) * abs_ln_zz;

  double sum = 0.0;
  double au = 1.0;
  TailStop row_stop;
  for (int u = 0; u < max_uv; ++u) {
    double row = 0.0, auv = au;
    TailStop term_stop;
    for (int v = 0; v < max_uv; ++v) {
      const double g0 = pb.mu + v + rho * (pa.mu + u);
      const double inner = residue_inner(g0, rho, ln_q, tol, 4 * max_uv, used);
      const double pow_factor = std::exp(-(pa.alpha / 2.0) * abs_ln_zz * (pow_base + u));
      const double term = auv * inner * pow_factor;
      row += term;
      if (term_stop.done(std::abs(term), tol, std::max(std::abs(sum + row), 1e-300))) break;
      auv *= (pb.m + v) * db.beta / ((pb.mu + v) * (v + 1.0));
      if (auv == 0.0) break;
      if (v + 1 == max_uv)
        throw AccuracyError("ratio_pdf_series: inner index budget exceeded", sum + row, err);
    }
    sum += row;
    if (row_stop.done(std::abs(row), tol, std::abs(sum))) break;
    au *= (pa.m + u) * da.beta / ((pa.mu + u) * (u + 1.0));
    if (au == 0.0) break;
    if (u + 1 == max_uv) throw AccuracyError("ratio_pdf_series: row budget exceeded", sum, err);
  }
  const double ln_pref =
      std::log(pa.alpha / 2.0) + ps.ln_zeta + ps.d1.ln_theta + ps.d2.ln_theta;
  return std::exp(ln_pref) * sum;
}

// Eq. (15) with every H term evaluated on the Mellin-Barnes contour. The
// (u,v) sum of exact H values still diverges eventually on the branch side
// where the residue expansion is asymptotic; persistent term growth is
// treated as that divergence and rejected.
double ratio_h_series(const PairStats& ps, double zz, double tol_in, int max_uv, int& used,
                      double& err) {
  const double w1 = 2.0 / ps.p1.alpha, w2 = 2.0 / ps.p2.alpha;
  const double tol = std::max(tol_in, 1e-9);
  double sum = 0.0;
  double au = 1.0;
  TailStop row_stop;
  double row_min = kInf, row_prev1 = 0.0, row_prev_abs = kInf;
  int row_rise = 0, row_fall = 0;
  for (int u = 0; u < max_uv; ++u) {
    double row = 0.0, auv = au;
    TailStop term_stop;
    double t_min = kInf, t_prev1 = 0.0, t_prev_abs = kInf;
    int rise = 0, fall = 0;
    for (int v = 0; v < max_uv; ++v) {
      const specfun::HParams hp{ps.p1.mu + u - w1, w1, ps.p2.mu + v + w2, w2};
      EvalResult h;
      try {
        h = specfun::mellin_barnes_h(specfun::HCase::H11_11, zz, hp);
      } catch (const AccuracyError&) {
        throw DegenerateCaseError(
            "ratio_pdf_series: H-term expansion diverges on this branch side; use ratio_pdf");
      }
      ++used;
      err += auv * h.abs_err_est;
      const double term = auv * h.value;
      row += term;
      const double at = std::abs(term);
      // the divergence probe fires on consecutive increases after a sustained
      // fall; any series may climb over an initial hump first
      const bool increased = at > t_prev_abs;
      fall = increased ? fall : fall + 1;
      rise = (increased && fall >= 3) ? rise + 1 : 0;
      t_min = std::min(t_min, at);
      t_prev_abs = at;
      if (term_stop.done(at, tol, std::max(std::abs(sum + row), 1e-300))) break;
      if (rise >= 2) {
        // asymptotic inner tail: truncate at the valley when it is deep
        // enough, otherwise the expansion genuinely diverges here
        row -= term + t_prev1;
        err += t_min;
        if (t_min < 1e-7 * std::max(std::abs(sum + row), 1e-300)) break;
        throw DegenerateCaseError(
            "ratio_pdf_series: expansion diverges on this branch side; use ratio_pdf");
      }
      t_prev1 = term;
      auv *= (ps.p2.m + v) * ps.d2.beta / ((ps.p2.mu + v) * (v + 1.0));
      if (auv == 0.0) break;
      if (v + 1 == max_uv)
        throw AccuracyError("ratio_pdf_series: inner index budget exceeded", sum + row, err);
    }
    sum += row;
    const double ar = std::abs(row);
    const bool row_up = ar > row_prev_abs;
    row_fall = row_up ? row_fall : row_fall + 1;
    row_rise = (row_up && row_fall >= 3) ? row_rise + 1 : 0;
    row_min = std::min(row_min, ar);
    row_prev_abs = ar;
    if (row_stop.done(ar, tol, std::abs(sum))) break;
    if (row_rise >= 2) {
      sum -= row + row_prev1;
      err += row_min;
      if (row_min < 1e-7 * std::max(std::abs(sum), 1e-300)) break;
      throw DegenerateCaseError(
          "ratio_pdf_series: expansion diverges on this branch side; use ratio_pdf");
    }
    row_prev1 = row;
    au *= (ps.p1.m + u) * ps.d1.beta / ((ps.p1.mu + u) * (u + 1.0));
    if (au == 0.0) break;
    if (u + 1 == max_uv) throw AccuracyError("ratio_pdf_series: row budget exceeded", sum, err);
  }
  return std::exp(ps.ln_zeta + ps.d1.ln_theta + ps.d2.ln_theta) * sum;
}

}  // namespace

EvalResult ratio_pdf_series(const PairStats& ps, double z) {
  checked_positive(z, "ratio_pdf_series");
  const double ln_zz = ps.ln_zeta + std::log(z);
  if (std::abs(ln_zz) < 1e-9)
    throw DegenerateCaseError("ratio_pdf_series: zeta*z = 1 is the branch boundary; use ratio_pdf");
  const bool low = ln_zz < 0.0;
  const double rho = low ? ps.p1.alpha / ps.p2.alpha : ps.p2.alpha / ps.p1.alpha;
  const double tol = ps.policy.tol;
  int used = 0;
  double err = 0.0;
  if (rho <= 1.0 + 1e-12) {
    const double v = ratio_residue_series(ps, std::abs(ln_zz), low, tol, ps.policy.max_uv,
                                          used, err);
    return {v, err + tol * std::abs(v), used, Fallback::none};
  }
  // the residue expansion on this side is asymptotic (divergent); sum the
  // exact contour integrals instead
  const double v = ratio_h_series(ps, std::exp(ln_zz), tol, ps.policy.max_uv, used, err);
  return {v, err + tol * std::abs(v), used, Fallback::residue_to_integral};
}

EvalResult ratio_pdf_same_alpha(const PairStats& ps, double z) {
  if (std::abs(ps.p1.alpha - ps.p2.alpha) > 1e-12 * std::max(ps.p1.alpha, ps.p2.alpha))
    throw ParameterError("ratio_pdf_same_alpha: requires alpha1 == alpha2");
  checked_positive(z, "ratio_pdf_same_alpha");
  const double alpha = ps.p1.alpha;
  const double ln_b7 = (alpha / 2.0) * (ps.ln_zeta + std::log(z));
  const double b7 = std::exp(ln_b7);
  const double x = ps.d1.beta * b7 / (1.0 + b7);
  const double yv = ps.d2.beta / (1.0 + b7);
  const EvalResult f2 = specfun::appell_f2(ps.p1.mu + ps.p2.mu, ps.p1.m, ps.p2.m, ps.p1.mu,
                                           ps.p2.mu, x, yv);
  const double ln_pref = std::log(alpha / 2.0) + ps.ln_zeta + ps.d1.ln_theta + ps.d2.ln_theta +
                         std::lgamma(ps.p1.mu + ps.p2.mu) +
                         (ps.p1.mu - 2.0 / alpha) * ln_b7 -
                         (ps.p1.mu + ps.p2.mu) * std::log1p(b7);
  const double v = std::exp(ln_pref) * f2.value;
  return {v, std::exp(ln_pref) * f2.abs_err_est + 1e-14 * std::abs(v), f2.terms_used,
          Fallback::none};
}

// --- asymptotics ---

double product_cdf_asymptotic(const PairStats& ps, double y) {
  checked_positive(y, "product_cdf_asymptotic");
  const double g = ps.p2.mu - (ps.p1.alpha / ps.p2.alpha) * ps.p1.mu;
  if (!(g > 0.0))
    throw ParameterError(
        "product_cdf_asymptotic: mu2 - (alpha1/alpha2) mu1 must be > 0; swap link labels");
  const double ln_b3 = (ps.p1.alpha / 2.0) * (ps.ln_delta + std::log(y));
  const double f21 = ps.d2.beta == 0.0
                         ? 1.0
                         : specfun::gauss_2f1_unit(ps.p2.m, g, ps.p2.mu, ps.d2.beta).value;
  const double ln = ps.d1.ln_theta + ps.d2.ln_theta - std::log(ps.p1.mu) + std::lgamma(g) +
                    std::log(f21) + ps.p1.mu * ln_b3;
  return std::exp(ln);
}

double ratio_cdf_asymptotic(const PairStats& ps, double z) {
  checked_positive(z, "ratio_cdf_asymptotic");
  const double g = ps.p2.mu + (ps.p1.alpha / ps.p2.alpha) * ps.p1.mu;
  const double ln_b5 = (ps.p1.alpha / 2.0) * (ps.ln_zeta + std::log(z));
  const double f21 = ps.d2.beta == 0.0
                         ? 1.0
                         : specfun::gauss_2f1_unit(ps.p2.m, g, ps.p2.mu, ps.d2.beta).value;
  const double ln = ps.d1.ln_theta + ps.d2.ln_theta - std::log(ps.p1.mu) + std::lgamma(g) +
                    std::log(f21) + ps.p1.mu * ln_b5;
  return std::exp(ln);
}

}  // namespace fadstat
