#pragma once

#include <complex>

#include "fadstat/eval.hpp"

namespace fadstat::specfun {

// ln Gamma(x), x > 0.
double ln_gamma(double x);

// value = sign * exp(ln). The split survives overflow of Gamma ratios.
struct SignedLog {
  double ln;
  int sign;
  double value() const;
};

// Pochhammer symbol (q)_k with sign tracking for negative non-integer q.
SignedLog ln_pochhammer(double q, int k);
double pochhammer(double q, int k);

// Complex ln Gamma on Re(z) > 0 (Lanczos), used by the Mellin-Barnes contour.
std::complex<double> ln_gamma(std::complex<double> z);

// Kummer confluent hypergeometric 1F1(a; b; x), b > 0.
EvalResult kummer_1f1(double a, double b, double x);

// ln 1F1(a; b; x) for a, b > 0 and x >= 0 (value is positive); switches to the
// e^x-scaled asymptotic form for large x instead of summing the series.
double log_kummer_1f1_pos(double a, double b, double x);

// Gauss hypergeometric 2F1(a, b; c; z) on 0 <= z < 1, c > 0, by direct series.
EvalResult gauss_2f1_unit(double a, double b, double c, double z);

// Appell F2(a, b1, b2; c1, c2; x, y), |x| + |y| < 1, as a single series over k
// of (a)_k (b1)_k x^k / ((c1)_k k!) * 2F1(a+k, b2; c2; y).
EvalResult appell_f2(double a, double b1, double b2, double c1, double c2, double x, double y);

// Humbert Phi2(b1, b2; c; x, y) as a series over k of
// (b1)_k x^k / ((c)_k k!) * 1F1(b2; c+k; y). b1 may be negative.
EvalResult humbert_phi2(double b1, double b2, double c, double x, double y);

// integral_0^inf t^(nu-1) e^(-t) e^(-x t^(-rho)) dt for rho > 0, x >= 0.
// Defined by this integral; reduces to Gamma(nu) at x = 0 (nu > 0 required there).
EvalResult kratzel_like(double nu, double rho, double x);

// Mellin-Barnes cases used as cross-check oracles. Parameter meanings:
//   H20_02: Gamma(b1 + w1 s) Gamma(b2 + w2 s)                      (product PDF kernel)
//   H21_13: Gamma(b1 + w1 s) Gamma(b2 + w2 s) * (-1/s)             (product CDF kernel)
//   H21_12: Gamma(b1 + w1 s) Gamma(b2 + w2 s) Gamma(-s)            (product MGF kernel)
//   H11_11: Gamma(b1 + w1 s) Gamma(b2 - w2 s)                      (ratio PDF kernel)
//   H12_22: Gamma(b1 + w1 s) Gamma(b2 - w2 s) * (-1/s)             (ratio CDF kernel)
// each integrated as (1/2*pi*i) * integral of kernel * x^(-s) ds along a vertical
// line separating the ascending and descending Gamma pole families.
enum class HCase { H20_02, H21_13, H21_12, H11_11, H12_22 };

struct HParams {
  double b1 = 0.0;
  double w1 = 1.0;
  double b2 = 0.0;
  double w2 = 1.0;
};

EvalResult mellin_barnes_h(HCase case_id, double x, const HParams& p);

// Regularized lower incomplete gamma P(k, x).
double gamma_p(double k, double x);

// Regularized incomplete beta I_x(a, b).
double beta_inc(double a, double b, double x);

}  // namespace fadstat::specfun
