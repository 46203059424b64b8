#pragma once

// Test-side oracles, kept independent of the library's own evaluation paths:
// Boost adaptive quadrature and Bessel functions, closed forms for the
// Gamma/Beta-prime reductions, a kappa-mu density for the large-m limit, and
// the frozen extended-precision goldens.

#include <functional>
#include <string>
#include <vector>

namespace oracle {

// adaptive Gauss-Kronrod (Boost), finite or semi-infinite upper limit
double integrate(const std::function<double(double)>& f, double a, double b,
                 double tol = 1e-10);

// integral over [0, b] through x = b t^8, which absorbs the x^(g-1) endpoint
// singularities (g as small as 0.15 here) that defeat plain Gauss-Kronrod
double integrate_density_to(const std::function<double(double)>& f, double b,
                            double tol = 1e-10);

// integral of a density over (0, inf): singularity substitution up to scale,
// then x = e^u - 1 for the stretched tail
double integrate_density(const std::function<double(double)>& f, double scale = 1.0,
                         double tol = 1e-10);

double bessel_k(double nu, double x);
double bessel_i(double nu, double x);

// power-domain kappa-mu density (the m -> inf limit of the shadowed model)
double kmu_pdf_power(double kappa, double mu, double gbar, double x);

// density of the product of two kappa-mu power variables by direct convolution
double kmu_product_pdf(double k1, double mu1, double g1, double k2, double mu2, double g2,
                       double y);

// product of two Gamma(k, theta) variables, Bessel closed form
double gamma_product_pdf(double k1, double th1, double k2, double th2, double y);

// ratio of two Gamma variables, Beta-prime closed form
double gamma_ratio_pdf(double k1, double th1, double k2, double th2, double z);

struct Golden {
  std::vector<double> inputs;
  double value;
  double abs_tol;
};

// record lookup in tests/goldens/<file>; throws if the id is missing
Golden golden(const std::string& file, const std::string& id);

// analytic CDF sampled on a log grid over [lo, hi] and wrapped in a monotone
// interpolant, so KS statistics over 1e6 samples stay cheap
std::function<double(double)> cdf_table(const std::function<double(double)>& cdf, double lo,
                                        double hi, int n = 2001);

}  // namespace oracle
