#pragma once

#include <memory>
#include <span>
#include <vector>

#include "fadstat/akmu.hpp"
#include "fadstat/eval.hpp"

namespace fadstat {

struct PairPolicy {
  double tol = 1e-11;   // series truncation target (relative)
  int max_uv = 500;     // cap on each summation index of the series paths
  int quad_order = 40;  // Gauss-Legendre order per panel
  int quad_panels = 4;  // equal panels of the semi-infinite substitution
  int quad_dyadic = 38; // dyadic end-refinement depth
};

namespace detail {
struct PairCache;  // precomputed integration nodes and CDF kernel tables
}

// A bound pair of links with the product/ratio constants of the pair.
struct PairStats {
  FadingParams p1;
  FadingParams p2;
  DerivedConstants d1;
  DerivedConstants d2;
  double delta;     // c1^(-2/a1) c2^(-2/a2) / (gbar1 gbar2)
  double zeta;      // gbar2 c1^(-2/a1) c2^(2/a2) / gbar1
  double ln_delta;
  double ln_zeta;
  PairPolicy policy;

  PairStats(const FadingParams& link1, const FadingParams& link2, PairPolicy policy = {});

  const detail::PairCache& cache() const { return *cache_; }

 private:
  std::shared_ptr<const detail::PairCache> cache_;
};

// --- product Y = X1 X2 ---

// Laplace-type single-integral representation (production path).
EvalResult product_pdf(const PairStats& ps, double y);

// Double H-function series (cross-check path; each term is a Mellin-Barnes
// contour integral, independent of the Laplace path).
EvalResult product_pdf_series(const PairStats& ps, double y);

EvalResult product_cdf(const PairStats& ps, double y);
std::vector<double> product_cdf_grid(const PairStats& ps, std::span<const double> ys);

// E[exp(s Y)], s < 0.
EvalResult product_mgf(const PairStats& ps, double s);

// Closed form, n >= 0 real.
double product_moment(const PairStats& ps, double n);

// --- ratio Z = X1 / X2 ---

EvalResult ratio_pdf(const PairStats& ps, double z);

// Residue series where it converges (alpha1 <= alpha2 below the branch point
// and alpha2 <= alpha1 above); otherwise the per-term Mellin-Barnes contour
// with fallback = residue_to_integral. zeta*z = 1 is rejected as degenerate.
EvalResult ratio_pdf_series(const PairStats& ps, double z);

// Appell F2 closed form, requires alpha1 == alpha2.
EvalResult ratio_pdf_same_alpha(const PairStats& ps, double z);

EvalResult ratio_cdf(const PairStats& ps, double z);
std::vector<double> ratio_cdf_grid(const PairStats& ps, std::span<const double> zs);

// E[exp(s Z)], s < 0.
EvalResult ratio_mgf(const PairStats& ps, double s);

// Closed form; requires mu2 > 2n/alpha2, else MomentUndefinedError.
double ratio_moment(const PairStats& ps, double n);

// --- asymptotics (gamma_bar -> inf power laws) ---

// Requires mu2 - (alpha1/alpha2) mu1 > 0; raises ParameterError telling the
// caller to swap link labels otherwise.
double product_cdf_asymptotic(const PairStats& ps, double y);
double ratio_cdf_asymptotic(const PairStats& ps, double z);

}  // namespace fadstat
