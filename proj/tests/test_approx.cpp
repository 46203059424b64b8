#include <doctest.h>

#include <cmath>

#include "fadstat/approx.hpp"
#include "oracles.hpp"

using namespace fadstat;

TEST_SUITE_BEGIN("approx");

TEST_CASE("gamma fit: closed form for Gamma-reduced links, mean and variance match") {
  const PairStats gr({2.0, 0.0, 2.0, 3.0, 1.0}, {2.0, 0.0, 3.5, 1.0, 1.0});
  const GammaFit fit = fit_gamma_product(gr);
  const double mu1 = 2.0, mu2 = 3.5;
  const double c_pro = (1.0 + 1.0 / mu1) * (1.0 + 1.0 / mu2) - 1.0;
  CHECK(fit.k == doctest::Approx(1.0 / c_pro).epsilon(1e-12));
  CHECK(fit.k * fit.theta ==
        doctest::Approx(gr.p1.gamma_bar * gr.p2.gamma_bar).epsilon(1e-12));
  // second moment matched by construction
  const double m2_fit = fit.k * (fit.k + 1.0) * fit.theta * fit.theta;
  CHECK(m2_fit == doctest::Approx(product_moment(gr, 2.0)).epsilon(1e-10));
}

TEST_CASE("gamma fit matches the frozen values for both m-variants") {
  for (const char* tag : {"a", "b"}) {
    const double m1 = tag[0] == 'a' ? 2.8 : 10.0;
    const double m2 = tag[0] == 'a' ? 4.4 : 10.0;
    const PairStats ps({1.5, 5.0, 1.2, m1, 1.0}, {2.5, 2.1, 3.0, m2, 1.0});
    const GammaFit fit = fit_gamma_product(ps);
    CHECK(std::abs(fit.k - oracle::golden("approx.txt", std::string("fit_ky_") + tag).value) <
          1e-10);
    CHECK(std::abs(fit.theta -
                   oracle::golden("approx.txt", std::string("fit_thy_") + tag).value) < 1e-10);
  }
}

TEST_CASE("gamma surrogate density and distribution") {
  const GammaFit fit{2.3, 0.7};
  const double norm = oracle::integrate([&](double y) { return gamma_pdf(fit, y); }, 0.0,
                                        std::numeric_limits<double>::infinity(), 1e-12);
  CHECK(std::abs(norm - 1.0) < 1e-10);
  CHECK(gamma_cdf(fit, 0.0) == 0.0);
  const double quad = oracle::integrate([&](double y) { return gamma_pdf(fit, y); }, 0.0, 1.9,
                                        1e-12);
  CHECK(gamma_cdf(fit, 1.9) == doctest::Approx(quad).epsilon(1e-10));
}

TEST_CASE("beta-prime fit: per-link mean preservation and Gamma reduction") {
  const PairStats gr({2.0, 0.0, 2.0, 3.0, 2.0}, {2.0, 0.0, 3.5, 1.0, 0.5});
  const BetaPrimeFit fit = fit_beta_prime_ratio(gr);
  CHECK(fit.k1 * fit.theta1 == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(fit.k2 * fit.theta2 == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(fit.k1 == doctest::Approx(2.0).epsilon(1e-12));  // C_ratio = 1/mu1
  const PairStats fig({1.5, 5.0, 1.2, 2.8, 1.0}, {2.5, 2.1, 3.0, 4.4, 1.0});
  const BetaPrimeFit ff = fit_beta_prime_ratio(fig);
  CHECK(std::abs(ff.k1 - oracle::golden("approx.txt", "fit_kz1_a").value) < 1e-10);
  CHECK(std::abs(ff.k2 - oracle::golden("approx.txt", "fit_kz2_a").value) < 1e-10);
  CHECK(ff.k1 * ff.theta1 == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("beta-prime symmetry and closed-form agreement") {
  const BetaPrimeFit sym{2.5, 0.4, 2.5, 0.4};
  CHECK(beta_prime_cdf(sym, 1.0) == doctest::Approx(0.5).epsilon(1e-12));
  const BetaPrimeFit fit{2.0, 0.5, 3.5, 1.0 / 3.5};
  for (double z : {0.3, 1.0, 2.5}) {
    CHECK(beta_prime_pdf(fit, z) ==
          doctest::Approx(oracle::gamma_ratio_pdf(2.0, 0.5, 3.5, 1.0 / 3.5, z)).epsilon(1e-12));
  }
  const double quad = oracle::integrate([&](double z) { return beta_prime_pdf(fit, z); }, 0.0,
                                        2.0, 1e-12);
  CHECK(beta_prime_cdf(fit, 2.0) == doctest::Approx(quad).epsilon(1e-10));
}

TEST_CASE("surrogate CDFs stay within 0.05 of the exact ones on the figure sets") {
  for (const auto& ms : {std::pair{2.8, 4.4}, std::pair{10.0, 10.0}}) {
    const PairStats ps({1.5, 5.0, 1.2, ms.first, 1.0}, {2.5, 2.1, 3.0, ms.second, 1.0});
    const GammaFit gy = fit_gamma_product(ps);
    const BetaPrimeFit bz = fit_beta_prime_ratio(ps);
    double gap_y = 0.0, gap_z = 0.0;
    for (int i = 0; i < 200; ++i) {
      const double x = std::pow(10.0, -2.0 + 3.0 * i / 199.0);  // [0.01, 10]
      gap_y = std::max(gap_y, std::abs(gamma_cdf(gy, x) - product_cdf(ps, x).value));
      gap_z = std::max(gap_z, std::abs(beta_prime_cdf(bz, x) - ratio_cdf(ps, x).value));
    }
    CHECK(gap_y < 0.05);
    CHECK(gap_z < 0.05);
    CHECK(gap_y > 0.0);
  }
}

TEST_SUITE_END();
