#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "fadstat/errors.hpp"
#include "fadstat/mc.hpp"
#include "oracles.hpp"

using namespace fadstat;

TEST_SUITE_BEGIN("mc");

namespace {

PairStats fig_pair() {
  return PairStats({1.5, 5.0, 1.2, 2.8, 1.0}, {2.5, 2.1, 3.0, 4.4, 1.0});
}

}  // namespace

TEST_CASE("config validation") {
  CHECK_THROWS_AS(mc::McConfig(1, 10, 4), ParameterError);
  CHECK_THROWS_AS(mc::McConfig(1, 100000, 0), ParameterError);
}

TEST_CASE("determinism: identical configs give bit-identical draws") {
  const PairStats ps = fig_pair();
  const mc::McConfig cfg(777, 50000, 7);
  const auto a = mc::draw_product(ps, cfg);
  const auto b = mc::draw_product(ps, cfg);
  CHECK(a == b);
  const auto ra = mc::draw_ratio(ps, cfg);
  const auto rb = mc::draw_ratio(ps, cfg);
  CHECK(ra == rb);
  // different stream counts change the partition, not the determinism
  const auto c = mc::draw_product(ps, mc::McConfig(777, 50000, 3));
  CHECK(c == mc::draw_product(ps, mc::McConfig(777, 50000, 3)));
}

TEST_CASE("stream independence: low cross-correlation") {
  const FadingParams p(1.5, 5.0, 1.2, 2.8, 1.0);
  RngStream s0(42, 0), s1(42, 1);
  const auto a = sample(p, s0, 10000);
  const auto b = sample(p, s1, 10000);
  double ma = 0, mb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    ma += a[i];
    mb += b[i];
  }
  ma /= a.size();
  mb /= b.size();
  double cov = 0, va = 0, vb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    cov += (a[i] - ma) * (b[i] - mb);
    va += (a[i] - ma) * (a[i] - ma);
    vb += (b[i] - mb) * (b[i] - mb);
  }
  CHECK(std::abs(cov / std::sqrt(va * vb)) < 0.01);
}

TEST_CASE("product summary: mean, variance, ecdf against analytics") {
  const PairStats ps = fig_pair();
  const mc::McConfig cfg(2025, 200000, 8);
  std::vector<double> grid;
  for (int i = 0; i <= 40; ++i) grid.push_back(std::pow(10.0, -2.0 + 3.0 * i / 40.0));
  const auto s = mc::simulate_product(ps, cfg, grid);
  const double mean_exact = ps.p1.gamma_bar * ps.p2.gamma_bar;
  CHECK(std::abs(s.mean - mean_exact) < 4.0 * s.mean_se);
  const double var_exact = product_moment(ps, 2.0) - mean_exact * mean_exact;
  // SE of the sample variance via the fourth moment
  const double m4 = product_moment(ps, 4.0);
  const double var_se = std::sqrt((m4 - var_exact * var_exact) / cfg.trials);
  CHECK(std::abs(s.variance - var_exact) < 4.0 * var_se);
  // ecdf tracks the analytic cdf on the grid
  const auto F = product_cdf_grid(ps, grid);
  for (std::size_t i = 0; i < grid.size(); ++i) CHECK(std::abs(s.ecdf[i] - F[i]) < 0.005);
}

TEST_CASE("ks gate at reduced scale for product and ratio") {
  const PairStats ps = fig_pair();
  const mc::McConfig cfg(5150, 100000, 8);
  const auto ys = mc::draw_product(ps, cfg);
  const auto [mn, mx] = std::minmax_element(ys.begin(), ys.end());
  const auto tab = oracle::cdf_table(
      [&](double y) { return product_cdf(ps, y).value; }, *mn * 0.999, *mx * 1.001);
  const double ks = mc::ks_statistic(ys, tab);
  CHECK(ks < 1.6276 / std::sqrt(static_cast<double>(cfg.trials)));  // 1% critical value

  const auto zs = mc::draw_ratio(ps, cfg);
  const auto [zn, zx] = std::minmax_element(zs.begin(), zs.end());
  const auto ztab = oracle::cdf_table(
      [&](double z) { return ratio_cdf(ps, z).value; }, *zn * 0.999, *zx * 1.001);
  CHECK(mc::ks_statistic(zs, ztab) < 1.6276 / std::sqrt(static_cast<double>(cfg.trials)));
}

TEST_CASE("irs simulation: monotone curve, reproducible, direct-link edge") {
  const IrsScenario sc({2.0, 0.8, 1.5, 4.0}, {3.0, 2.1, 3.0, 4.4}, {1.0, 5.0, 1.2, 2.8}, 4,
                       73.0, {0, 0}, {0, 10}, {90, 0}, 4.0);
  std::vector<double> th;
  for (double db : {-10.0, -5.0, 0.0, 5.0}) th.push_back(std::pow(10.0, db / 10.0));
  const mc::McConfig cfg(31, 100000, 8);
  const auto curve = mc::simulate_irs(sc, cfg, th);
  for (std::size_t i = 1; i < curve.op.size(); ++i) CHECK(curve.op[i] >= curve.op[i - 1]);
  // the empirical curve is reproducible
  const auto again = mc::simulate_irs(sc, cfg, th);
  CHECK(curve.op == again.op);

  // with no reflecting elements the outage is the direct-link envelope CDF
  const IrsScenario direct({2.0, 0.8, 1.5, 4.0}, {3.0, 2.1, 3.0, 4.4}, {1.0, 5.0, 1.2, 2.8},
                           0, 73.0, {0, 0}, {0, 10}, {90, 0}, 4.0);
  const auto dc = mc::simulate_irs(direct, cfg, th);
  for (std::size_t i = 0; i < th.size(); ++i) {
    const double exact = cdf_envelope(direct.sd, std::sqrt(th[i] / direct.gamma_s));
    CHECK(std::abs(dc.op[i] - exact) < 0.006);  // ~4 binomial SE at 1e5 trials
  }
}

TEST_SUITE_END();
