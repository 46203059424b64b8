#pragma once

namespace fadstat {

enum class Fallback {
  none,
  residue_to_integral,  // residue series replaced by a contour/kernel integral
  series_to_integral,   // hypergeometric series replaced by direct quadrature
};

// Value plus diagnostics. terms_used counts series terms or quadrature nodes,
// whichever the operation consumed.
struct EvalResult {
  double value = 0.0;
  double abs_err_est = 0.0;
  int terms_used = 0;
  Fallback fallback = Fallback::none;
};

}  // namespace fadstat
