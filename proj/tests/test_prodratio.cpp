#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "fadstat/errors.hpp"
#include "fadstat/prodratio.hpp"
#include "oracles.hpp"

using namespace fadstat;

namespace {

const double kInf = std::numeric_limits<double>::infinity();

PairStats fig_pair() {
  return PairStats({1.5, 5.0, 1.2, 2.8, 1.0}, {2.5, 2.1, 3.0, 4.4, 1.0});
}

}  // namespace

TEST_SUITE_BEGIN("prodratio");

TEST_CASE("pair constants recompute") {
  const PairStats ps = fig_pair();
  const double delta = std::pow(ps.d1.c, -2.0 / ps.p1.alpha) *
                       std::pow(ps.d2.c, -2.0 / ps.p2.alpha) /
                       (ps.p1.gamma_bar * ps.p2.gamma_bar);
  const double zeta = ps.p2.gamma_bar * std::pow(ps.d1.c, -2.0 / ps.p1.alpha) *
                      std::pow(ps.d2.c, 2.0 / ps.p2.alpha) / ps.p1.gamma_bar;
  CHECK(ps.delta == doctest::Approx(delta).epsilon(1e-12));
  CHECK(ps.zeta == doctest::Approx(zeta).epsilon(1e-12));
  CHECK(ps.delta > 0.0);
  CHECK(ps.zeta > 0.0);
}

TEST_CASE("product pdf: goldens and domain") {
  const PairStats ps = fig_pair();
  for (const char* id : {"prod_pdf_y0.1", "prod_pdf_y1.0", "prod_pdf_y5.0"}) {
    const auto g = oracle::golden("dist.txt", id);
    const auto r = product_pdf(ps, g.inputs[0]);
    CHECK(std::abs(r.value - g.value) < g.abs_tol);
    CHECK(r.abs_err_est >= 0.0);
    CHECK(std::isfinite(r.abs_err_est));
  }
  CHECK_THROWS_AS(product_pdf(ps, 0.0), DomainError);
  CHECK_THROWS_AS(product_pdf(ps, -1.0), DomainError);
}

TEST_CASE("product pdf: Gamma-reduced links match the Bessel closed form") {
  const PairStats ps({2.0, 0.0, 2.0, 3.0, 1.0}, {2.0, 0.0, 3.5, 1.0, 1.0});
  for (double y : {0.2, 1.0, 4.0}) {
    const double ref = oracle::gamma_product_pdf(2.0, 0.5, 3.5, 1.0 / 3.5, y);
    CHECK(product_pdf(ps, y).value == doctest::Approx(ref).epsilon(1e-9));
  }
}

TEST_CASE("product pdf normalization for two parameter sets") {
  for (const auto& ps : {fig_pair(), PairStats({1.0, 2.2, 1.2, 10.0, 1.0},
                                               {1.5, 0.9, 3.0, 4.0, 1.0})}) {
    const double norm = oracle::integrate_density(
        [&](double y) { return product_pdf(ps, y).value; }, 1.0, 1e-9);
    CHECK(std::abs(norm - 1.0) < 1e-7);
  }
}

TEST_CASE("product series path tracks the integral path") {
  const PairStats ps = fig_pair();
  for (double y : {0.1, 1.0, 5.0}) {
    const double a = product_pdf(ps, y).value;
    const auto s = product_pdf_series(ps, y);
    CHECK(std::abs(s.value - a) < 1e-6 * a);
    CHECK(s.fallback == Fallback::none);
  }
  // kappa = 0 on both links kills every term beyond (u,v) = (0,0)
  const PairStats ps0({2.0, 0.0, 2.0, 3.0, 1.0}, {2.5, 0.0, 3.0, 1.0, 1.0});
  const auto s0 = product_pdf_series(ps0, 1.0);
  CHECK(std::abs(s0.value - product_pdf(ps0, 1.0).value) < 1e-6 * s0.value);
  // m1 = m2 = 1, small kappa corner
  const PairStats ps1({1.5, 0.3, 1.2, 1.0, 1.0}, {2.5, 0.2, 3.0, 1.0, 1.0});
  const auto s1 = product_pdf_series(ps1, 1.0);
  CHECK(std::abs(s1.value - product_pdf(ps1, 1.0).value) < 1e-6 * s1.value);
}

TEST_CASE("product cdf: limits and golden") {
  const PairStats ps = fig_pair();
  CHECK(product_cdf(ps, 0.0).value == 0.0);
  CHECK(product_cdf(ps, 1e3).value >= 1.0 - 1e-4);
  const auto g = oracle::golden("dist.txt", "prod_cdf_y1");
  CHECK(std::abs(product_cdf(ps, 1.0).value - g.value) < g.abs_tol);
  // cdf equals quadrature of the pdf
  const double quad = oracle::integrate_density_to(
      [&](double y) { return product_pdf(ps, y).value; }, 0.7, 1e-10);
  CHECK(std::abs(product_cdf(ps, 0.7).value - quad) < 1e-8);
  // grid form matches pointwise form
  const std::vector<double> ys{0.2, 0.9, 2.7};
  const auto grid = product_cdf_grid(ps, ys);
  for (std::size_t i = 0; i < ys.size(); ++i)
    CHECK(grid[i] == doctest::Approx(product_cdf(ps, ys[i]).value).epsilon(1e-12));
}

TEST_CASE("product mgf") {
  const PairStats ps = fig_pair();
  CHECK_THROWS_AS(product_mgf(ps, 0.0), DomainError);
  CHECK_THROWS_AS(product_mgf(ps, 0.5), DomainError);
  CHECK(std::abs(product_mgf(ps, -1e-8).value - 1.0) < 1e-6);
  // one-sided second-order difference of M at 0 recovers E[Y]
  const double h = 1e-3;
  const double d = (3.0 - 4.0 * product_mgf(ps, -h).value + product_mgf(ps, -2.0 * h).value) /
                   (2.0 * h);
  CHECK(std::abs(d - ps.p1.gamma_bar * ps.p2.gamma_bar) < 1e-4);
  const auto g = oracle::golden("dist.txt", "prod_mgf_m1");
  CHECK(std::abs(product_mgf(ps, -1.0).value - g.value) < g.abs_tol);
}

TEST_CASE("product moments") {
  const PairStats ps = fig_pair();
  CHECK(product_moment(ps, 0.0) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(product_moment(ps, 1.0) ==
        doctest::Approx(ps.p1.gamma_bar * ps.p2.gamma_bar).epsilon(1e-12));
  const auto g = oracle::golden("dist.txt", "prod_moment_n2");
  CHECK(std::abs(product_moment(ps, 2.0) - g.value) < g.abs_tol);
  for (double n : {0.5, 1.0, 2.0}) {
    const double quad = oracle::integrate_density(
        [&](double y) {
          const double f = product_pdf(ps, y).value;
          return f == 0.0 ? 0.0 : std::pow(y, n) * f;
        },
        1.0, 1e-10);
    CHECK(std::abs(product_moment(ps, n) - quad) < 1e-6 * quad);
  }
}

TEST_CASE("ratio pdf: goldens, branch continuity") {
  const PairStats ps = fig_pair();
  for (const char* id : {"ratio_pdf_z0.3", "ratio_pdf_z1.0", "ratio_pdf_z3.0"}) {
    const auto g = oracle::golden("dist.txt", id);
    CHECK(std::abs(ratio_pdf(ps, g.inputs[0]).value - g.value) < g.abs_tol);
  }
  // both branch formulas extrapolate to the same boundary value; the raw
  // samples at zeta*z = 1 -/+ 1e-6 differ by the density's own slope
  const double zb = 1.0 / ps.zeta;
  const double eps = 1e-6;
  const double from_below =
      2.0 * ratio_pdf(ps, zb * (1.0 - eps)).value - ratio_pdf(ps, zb * (1.0 - 2.0 * eps)).value;
  const double from_above =
      2.0 * ratio_pdf(ps, zb * (1.0 + eps)).value - ratio_pdf(ps, zb * (1.0 + 2.0 * eps)).value;
  CHECK(std::abs(from_below - from_above) < 1e-8 * from_below + 1e-8);
  CHECK_THROWS_AS(ratio_pdf(ps, 0.0), DomainError);
}

TEST_CASE("ratio pdf normalization") {
  const PairStats ps = fig_pair();
  const double zb = 1.0 / ps.zeta;
  const double head = oracle::integrate_density_to(
      [&](double z) { return ratio_pdf(ps, z).value; }, zb, 1e-9);
  const double tail = oracle::integrate(
      [&](double z) { return ratio_pdf(ps, z).value; }, zb, kInf, 1e-9);
  CHECK(std::abs(head + tail - 1.0) < 1e-7);
}

TEST_CASE("identical links: median and reciprocal symmetry") {
  const PairStats ps({1.5, 5.0, 1.2, 2.8, 1.0}, {1.5, 5.0, 1.2, 2.8, 1.0});
  CHECK(std::abs(ratio_cdf(ps, 1.0).value - 0.5) < 1e-7);
  for (double z : {0.25, 0.7, 2.0, 6.0}) {
    CHECK(std::abs(ratio_cdf(ps, z).value - (1.0 - ratio_cdf(ps, 1.0 / z).value)) < 1e-7);
  }
}

TEST_CASE("ratio series: residue branch, contour fallback, degeneracies") {
  const PairStats ps = fig_pair();  // alpha1 < alpha2
  const double zb = 1.0 / ps.zeta;
  // below the branch point the residue expansion converges
  const auto lo = ratio_pdf_series(ps, 0.5 * zb);
  CHECK(lo.fallback == Fallback::none);
  CHECK(std::abs(lo.value - ratio_pdf(ps, 0.5 * zb).value) <
        1e-6 * ratio_pdf(ps, 0.5 * zb).value);
  // above it the expansion is asymptotic; the contour route takes over
  const auto hi = ratio_pdf_series(ps, 2.0 * zb);
  CHECK(hi.fallback == Fallback::residue_to_integral);
  CHECK(std::abs(hi.value - ratio_pdf(ps, 2.0 * zb).value) <
        1e-6 * ratio_pdf(ps, 2.0 * zb).value);
  // swapped order exercises the mirrored branch logic
  const PairStats sw({2.5, 2.1, 3.0, 4.4, 1.0}, {1.5, 5.0, 1.2, 2.8, 1.0});
  const double zbs = 1.0 / sw.zeta;
  const auto hi2 = ratio_pdf_series(sw, 2.0 * zbs);
  CHECK(hi2.fallback == Fallback::none);  // alpha2 < alpha1 converges above
  CHECK(std::abs(hi2.value - ratio_pdf(sw, 2.0 * zbs).value) <
        1e-6 * ratio_pdf(sw, 2.0 * zbs).value);
  // below its branch point the swapped pair's expansion is asymptotic; the
  // valley-truncated sum still lands within the cross-check tolerance and is
  // flagged as the contour fallback
  const auto lo2 = ratio_pdf_series(sw, 0.5 * zbs);
  CHECK(lo2.fallback == Fallback::residue_to_integral);
  CHECK(std::abs(lo2.value - ratio_pdf(sw, 0.5 * zbs).value) <
        1e-6 * ratio_pdf(sw, 0.5 * zbs).value);
  // a strong alpha contrast diverges before the valley is usable: the
  // documented degenerate error fires
  const PairStats steep({4.0, 2.1, 3.0, 4.4, 1.0}, {1.0, 5.0, 1.2, 2.8, 1.0});
  CHECK_THROWS_AS(ratio_pdf_series(steep, 0.5 / steep.zeta), DegenerateCaseError);
  CHECK_THROWS_AS(ratio_pdf_series(ps, zb), DegenerateCaseError);
  // kappa = 0 collapses to the (u,v) = (0,0) plane
  const PairStats ps0({1.5, 0.0, 1.2, 2.8, 1.0}, {2.5, 0.0, 3.0, 4.4, 1.0});
  const auto s0 = ratio_pdf_series(ps0, 0.5 / ps0.zeta);
  CHECK(std::abs(s0.value - ratio_pdf(ps0, 0.5 / ps0.zeta).value) < 1e-6 * s0.value);
}

TEST_CASE("same-alpha closed form") {
  const PairStats ps({2.2, 5.0, 1.2, 2.8, 1.0}, {2.2, 2.1, 3.0, 4.4, 1.0});
  const auto g = oracle::golden("dist.txt", "same_alpha_pdf_z08");
  CHECK(std::abs(ratio_pdf_same_alpha(ps, 0.8).value - g.value) < g.abs_tol);
  for (double z : {0.5, 1.0, 2.0}) {
    CHECK(std::abs(ratio_pdf_same_alpha(ps, z).value - ratio_pdf(ps, z).value) <
          1e-8 * ratio_pdf(ps, z).value);
  }
  const double norm = oracle::integrate_density(
      [&](double z) { return ratio_pdf_same_alpha(ps, z).value; }, 1.0 / ps.zeta, 1e-9);
  CHECK(std::abs(norm - 1.0) < 1e-7);
  // Gamma-reduced links give the Beta-prime density of a Gamma ratio
  const PairStats gr({2.0, 0.0, 2.0, 3.0, 1.0}, {2.0, 0.0, 3.5, 1.0, 1.0});
  const double ref = oracle::gamma_ratio_pdf(2.0, 0.5, 3.5, 1.0 / 3.5, 1.0);
  CHECK(ratio_pdf_same_alpha(gr, 1.0).value == doctest::Approx(ref).epsilon(1e-9));
  CHECK_THROWS_AS(ratio_pdf_same_alpha(fig_pair(), 1.0), ParameterError);
}

TEST_CASE("ratio cdf: limits, golden, grid") {
  const PairStats ps = fig_pair();
  CHECK(ratio_cdf(ps, 0.0).value == 0.0);
  const auto g = oracle::golden("dist.txt", "ratio_cdf_z2");
  CHECK(std::abs(ratio_cdf(ps, 2.0).value - g.value) < g.abs_tol);
  const double quad = oracle::integrate_density_to(
      [&](double z) { return ratio_pdf(ps, z).value; }, 0.3, 1e-10);
  CHECK(std::abs(ratio_cdf(ps, 0.3).value - quad) < 1e-8);
  const std::vector<double> zs{0.2, 1.0 / ps.zeta, 4.0};
  const auto grid = ratio_cdf_grid(ps, zs);
  for (std::size_t i = 0; i < zs.size(); ++i)
    CHECK(grid[i] == doctest::Approx(ratio_cdf(ps, zs[i]).value).epsilon(1e-12));
}

TEST_CASE("ratio mgf") {
  const PairStats ps = fig_pair();
  CHECK_THROWS_AS(ratio_mgf(ps, 0.0), DomainError);
  CHECK(std::abs(ratio_mgf(ps, -1e-8).value - 1.0) < 1e-6);
  const double h = 1e-3;
  const double d = (3.0 - 4.0 * ratio_mgf(ps, -h).value + ratio_mgf(ps, -2.0 * h).value) /
                   (2.0 * h);
  CHECK(std::abs(d - ratio_moment(ps, 1.0)) < 1e-4);
  const auto g = oracle::golden("dist.txt", "ratio_mgf_m2");
  CHECK(std::abs(ratio_mgf(ps, -2.0).value - g.value) < g.abs_tol);
}

TEST_CASE("ratio moments and the existence condition") {
  const PairStats ps = fig_pair();
  CHECK(ratio_moment(ps, 0.0) == doctest::Approx(1.0).epsilon(1e-12));
  const auto g = oracle::golden("dist.txt", "ratio_moment_n1");
  CHECK(std::abs(ratio_moment(ps, 1.0) - g.value) < g.abs_tol);
  const double quad = oracle::integrate_density(
      [&](double z) {
        const double f = ratio_pdf(ps, z).value;
        return f == 0.0 ? 0.0 : z * f;
      },
      1.0 / ps.zeta, 1e-10);
  CHECK(std::abs(ratio_moment(ps, 1.0) - quad) < 1e-6 * quad);
  // mu2 = 3.0, alpha2 = 2.5: 2n/alpha2 = 2.4 < 3 passes at n = 3, fails at n = 4
  CHECK(std::isfinite(ratio_moment(ps, 3.0)));
  CHECK_THROWS_AS(ratio_moment(ps, 4.0), MomentUndefinedError);
}

TEST_CASE("asymptotic cdfs") {
  const PairStats ps = fig_pair();
  // log-log slope is exactly alpha1*mu1/2
  const double y1 = 1e-4, y2 = 2e-4;
  const double slope = (std::log(product_cdf_asymptotic(ps, y2)) -
                        std::log(product_cdf_asymptotic(ps, y1))) /
                       (std::log(y2) - std::log(y1));
  CHECK(std::abs(slope - ps.p1.alpha * ps.p1.mu / 2.0) < 1e-10);
  const double sr = (std::log(ratio_cdf_asymptotic(ps, y2)) -
                     std::log(ratio_cdf_asymptotic(ps, y1))) /
                    (std::log(y2) - std::log(y1));
  CHECK(std::abs(sr - ps.p1.alpha * ps.p1.mu / 2.0) < 1e-10);

  // exact over asymptotic at beta3 = beta5 = 1e-3
  const double yb = std::pow(1e-3, 2.0 / ps.p1.alpha) / ps.delta;
  const double ratio_p = product_cdf(ps, yb).value / product_cdf_asymptotic(ps, yb);
  CHECK(ratio_p > 0.99);
  CHECK(ratio_p < 1.01);
  const double zbeta = std::pow(1e-3, 2.0 / ps.p1.alpha) / ps.zeta;
  const double ratio_r = ratio_cdf(ps, zbeta).value / ratio_cdf_asymptotic(ps, zbeta);
  CHECK(ratio_r > 0.99);
  CHECK(ratio_r < 1.01);

  // swapped-label guard: mu2 - (a1/a2) mu1 < 0 must raise
  const PairStats bad({2.5, 2.1, 3.0, 4.4, 1.0}, {1.5, 5.0, 1.2, 2.8, 1.0});
  CHECK_THROWS_AS(product_cdf_asymptotic(bad, 0.001), ParameterError);
}

TEST_SUITE_END();
