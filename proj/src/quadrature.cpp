#include "fadstat/quadrature.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <stdexcept>

#include "fadstat/errors.hpp"

namespace fadstat {

namespace {

// Nodes via Newton iteration on P_n, seeded by the Chebyshev-like estimate.
std::pair<std::vector<double>, std::vector<double>> build_base(int n) {
  std::vector<double> x(n), w(n);
  const int half = (n + 1) / 2;
  for (int i = 0; i < half; ++i) {
    double z = std::cos(M_PI * (i + 0.75) / (n + 0.5));
    double pp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0, p1 = 0.0;
      for (int j = 0; j < n; ++j) {
        double p2 = p1;
        p1 = p0;
        p0 = ((2.0 * j + 1.0) * z * p1 - j * p2) / (j + 1.0);
      }
      pp = n * (z * p0 - p1) / (z * z - 1.0);
      double dz = p0 / pp;
      z -= dz;
      if (std::abs(dz) < 1e-15) break;
    }
    x[i] = -z;
    x[n - 1 - i] = z;
    w[i] = 2.0 / ((1.0 - z * z) * pp * pp);
    w[n - 1 - i] = w[i];
  }
  return {x, w};
}

}  // namespace

const std::pair<std::vector<double>, std::vector<double>>& gauss_legendre_base(int order) {
  if (order < 2) throw ParameterError("gauss_legendre: order must be >= 2");
  static std::map<int, std::pair<std::vector<double>, std::vector<double>>> cache;
  static std::mutex mtx;
  std::lock_guard<std::mutex> lock(mtx);
  auto it = cache.find(order);
  if (it == cache.end()) it = cache.emplace(order, build_base(order)).first;
  return it->second;
}

QuadratureRule gauss_legendre(int order, double a, double b, int panels) {
  if (order < 2) throw ParameterError("gauss_legendre: order must be >= 2");
  if (panels < 1) throw ParameterError("gauss_legendre: panels must be >= 1");
  if (!(a < b) || !std::isfinite(a) || !std::isfinite(b))
    throw ParameterError("gauss_legendre: need finite a < b");
  const auto& [xb, wb] = gauss_legendre_base(order);
  QuadratureRule r;
  r.kind = QuadratureRule::Kind::finite_panel;
  r.order = order;
  r.panels = panels;
  r.nodes.reserve(static_cast<std::size_t>(order) * panels);
  r.weights.reserve(static_cast<std::size_t>(order) * panels);
  const double h = (b - a) / panels;
  for (int p = 0; p < panels; ++p) {
    const double lo = a + p * h;
    const double mid = lo + 0.5 * h, hw = 0.5 * h;
    for (int i = 0; i < order; ++i) {
      r.nodes.push_back(mid + hw * xb[i]);
      r.weights.push_back(hw * wb[i]);
    }
  }
  return r;
}

QuadratureRule composite_rule(int order, std::span<const double> breakpoints) {
  if (breakpoints.size() < 2) throw ParameterError("composite_rule: need >= 2 breakpoints");
  const auto& [xb, wb] = gauss_legendre_base(order);
  QuadratureRule r;
  r.kind = QuadratureRule::Kind::finite_panel;
  r.order = order;
  r.panels = static_cast<int>(breakpoints.size()) - 1;
  for (std::size_t p = 0; p + 1 < breakpoints.size(); ++p) {
    const double lo = breakpoints[p], hi = breakpoints[p + 1];
    const double mid = 0.5 * (lo + hi), hw = 0.5 * (hi - lo);
    for (int i = 0; i < order; ++i) {
      r.nodes.push_back(mid + hw * xb[i]);
      r.weights.push_back(hw * wb[i]);
    }
  }
  return r;
}

QuadratureRule semi_infinite_rule(int order, int panels, double rate, int dyadic) {
  if (order < 2 || panels < 1 || dyadic < 0)
    throw ParameterError("semi_infinite_rule: bad order/panels/dyadic");
  if (!(rate > 0.0) || !std::isfinite(rate))
    throw ParameterError("semi_infinite_rule: rate must be positive");

  // Breakpoints in s-space: dyadic cells toward both ends of (0,1), equal
  // panels across the middle. t = -ln(s)/rate, weight ds -> dt/(s*rate).
  std::vector<double> bps;
  const double lo_edge = std::ldexp(1.0, -(dyadic + 2));  // 2^-(d+2)
  bps.push_back(lo_edge);
  for (int j = dyadic + 1; j >= 2; --j) bps.push_back(std::ldexp(1.0, -j));
  const double mid_lo = 0.25, mid_hi = 0.75;
  for (int p = 1; p < panels; ++p) bps.push_back(mid_lo + (mid_hi - mid_lo) * p / panels);
  bps.push_back(mid_hi);
  for (int j = 3; j <= dyadic + 1; ++j) bps.push_back(1.0 - std::ldexp(1.0, -j));
  bps.push_back(1.0 - std::ldexp(1.0, -(dyadic + 2)));

  const auto& [xb, wb] = gauss_legendre_base(order);
  QuadratureRule r;
  r.kind = QuadratureRule::Kind::semi_infinite;
  r.order = order;
  r.panels = static_cast<int>(bps.size()) - 1;
  for (std::size_t p = 0; p + 1 < bps.size(); ++p) {
    const double mid = 0.5 * (bps[p] + bps[p + 1]), hw = 0.5 * (bps[p + 1] - bps[p]);
    for (int i = 0; i < order; ++i) {
      const double s = mid + hw * xb[i];
      r.nodes.push_back(-std::log(s) / rate);
      r.weights.push_back(hw * wb[i] / (s * rate));
    }
  }
  return r;
}

std::vector<double> graded_breakpoints(double b, double max_cell, int dyadic) {
  if (!(b > 0.0)) throw ParameterError("graded_breakpoints: b must be positive");
  std::vector<double> bps{0.0};
  for (int j = dyadic; j >= 0; --j) {
    double v = b * std::ldexp(1.0, -j);
    if (v - bps.back() > max_cell) {
      // switch from dyadic growth to uniform cells
      double x = bps.back();
      while (v - x > max_cell * 1.5) {
        x += max_cell;
        bps.push_back(x);
      }
    }
    if (v > bps.back()) bps.push_back(v);
  }
  return bps;
}

}  // namespace fadstat
