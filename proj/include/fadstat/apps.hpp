#pragma once

#include <array>

#include "fadstat/eval.hpp"
#include "fadstat/prodratio.hpp"

namespace fadstat {

// --- cascaded two-tap channel ---

// P(Y <= gamma_th) for the cascade SNR Y = X1 X2.
EvalResult cascade_outage(const PairStats& ps, double gamma_th);

// Variance over squared mean of the cascade SNR.
double amount_of_fading(const PairStats& ps);

// --- physical-layer secrecy (three-node wiretap) ---

struct SecrecyScenario {
  FadingParams sd;  // legitimate link
  FadingParams se;  // eavesdropper link
  double rate_rs;   // target secrecy rate, bits; gamma_th = 2^rate_rs

  SecrecyScenario(const FadingParams& sd, const FadingParams& se, double rate_rs,
                  PairPolicy policy = {});

  const PairStats& pair() const { return pair_; }

 private:
  PairStats pair_;
};

// SOP via the high-SNR ratio approximation: ratio CDF at 2^rate_rs.
EvalResult secrecy_outage(const SecrecyScenario& sc);

// Strictly positive secrecy capacity: 1 - SOP at rate 0.
EvalResult spsc(const SecrecyScenario& sc);

// --- IRS-assisted link ---

struct Vec2 {
  double x;
  double y;
};

// Link shape parameters without the mean; gamma_bar comes from the geometry.
struct LinkShape {
  double alpha;
  double kappa;
  double mu;
  double m;
};

struct IrsScenario {
  FadingParams sd;  // source-destination, gamma_bar = d_SD^(-pathloss_beta)
  FadingParams sr;  // source-IRS
  FadingParams rd;  // IRS-destination
  int n_elements;   // >= 1 for the analytic paths; 0 allowed for simulation only
  double gamma_s_db;      // transmit-to-noise ratio in dB
  double gamma_s;         // same, linear (converted once here)
  Vec2 pos_s, pos_r, pos_d;
  double pathloss_beta;
  double k_switch = 100.0;  // Gamma-convolution path defers beyond this shape

  IrsScenario(const LinkShape& sd, const LinkShape& sr, const LinkShape& rd,
              int n_elements, double gamma_s_db, Vec2 pos_s, Vec2 pos_r, Vec2 pos_d,
              double pathloss_beta);
};

struct IrsGammaParams {
  double k_mom;
  double theta_mom;
  double mu_half;  // E[g_SR g_RD] of one element, from half-order moments
  double sigma2;   // per-element variance gbar_SR gbar_RD - mu_half^2
};

IrsGammaParams irs_gamma_params(const IrsScenario& sc);

// Outage of the combined envelope with the element sum approximated by a
// Gamma variable (finite-interval quadrature). Requires k_mom <= k_switch;
// beyond that raises DegenerateCaseError directing to irs_outage_gaussian.
EvalResult irs_outage_gamma(const IrsScenario& sc, double gamma_th);

// Same outage with the element sum approximated by a Gaussian.
EvalResult irs_outage_gaussian(const IrsScenario& sc, double gamma_th);

}  // namespace fadstat
