#include "fadstat/mc.hpp"

#include <algorithm>
#include <cmath>
#include <thread>

#include "fadstat/errors.hpp"

namespace fadstat::mc {

McConfig::McConfig(std::uint64_t seed, std::size_t trials_, int streams)
    : master_seed(seed), trials(trials_), stream_count(streams) {
  if (trials < 1000) throw ParameterError("McConfig: trials must be >= 1000");
  if (stream_count < 1) throw ParameterError("McConfig: stream_count must be >= 1");
}

namespace {

struct Slice {
  std::size_t begin, count;
};

std::vector<Slice> partition(std::size_t trials, int streams) {
  std::vector<Slice> out(streams);
  const std::size_t base = trials / streams, rem = trials % streams;
  std::size_t at = 0;
  for (int k = 0; k < streams; ++k) {
    out[k] = {at, base + (static_cast<std::size_t>(k) < rem ? 1 : 0)};
    at += out[k].count;
  }
  return out;
}

template <class Fn>
void run_streams(int streams, Fn&& body) {
  std::vector<std::thread> pool;
  pool.reserve(streams);
  for (int k = 0; k < streams; ++k) pool.emplace_back(body, k);
  for (auto& t : pool) t.join();
}

// stream index layout: one sub-stream per (worker, link slot)
constexpr std::uint64_t kSlots = 4;

}  // namespace

std::vector<double> draw_product(const PairStats& ps, const McConfig& cfg) {
  std::vector<double> out(cfg.trials);
  const auto slices = partition(cfg.trials, cfg.stream_count);
  run_streams(cfg.stream_count, [&](int k) {
    const Slice sl = slices[k];
    if (sl.count == 0) return;
    RngStream r1(cfg.master_seed, kSlots * k + 0);
    RngStream r2(cfg.master_seed, kSlots * k + 1);
    std::vector<double> x1(sl.count), x2(sl.count);
    sample(ps.p1, r1, x1);
    sample(ps.p2, r2, x2);
    for (std::size_t i = 0; i < sl.count; ++i) out[sl.begin + i] = x1[i] * x2[i];
  });
  return out;
}

std::vector<double> draw_ratio(const PairStats& ps, const McConfig& cfg) {
  std::vector<double> out(cfg.trials);
  const auto slices = partition(cfg.trials, cfg.stream_count);
  run_streams(cfg.stream_count, [&](int k) {
    const Slice sl = slices[k];
    if (sl.count == 0) return;
    RngStream r1(cfg.master_seed, kSlots * k + 0);
    RngStream r2(cfg.master_seed, kSlots * k + 1);
    std::vector<double> x1(sl.count), x2(sl.count);
    sample(ps.p1, r1, x1);
    sample(ps.p2, r2, x2);
    for (std::size_t i = 0; i < sl.count; ++i) out[sl.begin + i] = x1[i] / x2[i];
  });
  return out;
}

SampleSummary summarize(std::span<const double> samples, std::span<const double> grid) {
  SampleSummary s;
  s.trials = samples.size();
  s.grid.assign(grid.begin(), grid.end());
  std::vector<double> sorted(samples.begin(), samples.end());
  std::sort(sorted.begin(), sorted.end());
  s.ecdf.resize(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const auto it = std::upper_bound(sorted.begin(), sorted.end(), grid[i]);
    s.ecdf[i] = static_cast<double>(it - sorted.begin()) / static_cast<double>(sorted.size());
  }
  double mean = 0.0;
  for (double x : samples) mean += x;
  mean /= static_cast<double>(samples.size());
  double var = 0.0;
  for (double x : samples) var += (x - mean) * (x - mean);
  var /= static_cast<double>(samples.size() - 1);
  s.mean = mean;
  s.variance = var;
  s.mean_se = std::sqrt(var / static_cast<double>(samples.size()));
  return s;
}

SampleSummary simulate_product(const PairStats& ps, const McConfig& cfg,
                               std::span<const double> grid) {
  return summarize(draw_product(ps, cfg), grid);
}

SampleSummary simulate_ratio(const PairStats& ps, const McConfig& cfg,
                             std::span<const double> grid) {
  return summarize(draw_ratio(ps, cfg), grid);
}

IrsOpCurve simulate_irs(const IrsScenario& sc, const McConfig& cfg,
                        std::span<const double> gamma_th) {
  std::vector<double> snr(cfg.trials);
  const auto slices = partition(cfg.trials, cfg.stream_count);
  const int n = sc.n_elements;
  run_streams(cfg.stream_count, [&](int k) {
    const Slice sl = slices[k];
    if (sl.count == 0) return;
    RngStream rsd(cfg.master_seed, kSlots * k + 0);
    RngStream rsr(cfg.master_seed, kSlots * k + 1);
    RngStream rrd(cfg.master_seed, kSlots * k + 2);
    std::vector<double> gsd(sl.count);
    sample(sc.sd, rsd, gsd);
    std::vector<double> psr(n), prd(n);
    for (std::size_t i = 0; i < sl.count; ++i) {
      double u = 0.0;
      if (n > 0) {
        sample(sc.sr, rsr, psr);
        sample(sc.rd, rrd, prd);
        for (int j = 0; j < n; ++j) u += std::sqrt(psr[j]) * std::sqrt(prd[j]);
      }
      const double env = std::sqrt(gsd[i]) + u;
      snr[sl.begin + i] = sc.gamma_s * env * env;
    }
  });
  std::sort(snr.begin(), snr.end());
  IrsOpCurve curve;
  curve.trials = cfg.trials;
  curve.gamma_th.assign(gamma_th.begin(), gamma_th.end());
  curve.op.resize(gamma_th.size());
  for (std::size_t i = 0; i < gamma_th.size(); ++i) {
    const auto it = std::upper_bound(snr.begin(), snr.end(), gamma_th[i]);
    curve.op[i] = static_cast<double>(it - snr.begin()) / static_cast<double>(snr.size());
  }
  return curve;
}

double ks_statistic(std::vector<double> samples, const std::function<double(double)>& cdf) {
  std::sort(samples.begin(), samples.end());
  const double n = static_cast<double>(samples.size());
  double d = 0.0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const double f = cdf(samples[i]);
    d = std::max(d, std::max(f - static_cast<double>(i) / n,
                             static_cast<double>(i + 1) / n - f));
  }
  return d;
}

MonotoneInterp::MonotoneInterp(std::vector<double> x, std::vector<double> y)
    : x_(std::move(x)), y_(std::move(y)) {
  if (x_.size() != y_.size() || x_.size() < 2)
    throw ParameterError("MonotoneInterp: need matching x/y with >= 2 points");
  const std::size_t n = x_.size();
  std::vector<double> sec(n - 1);
  for (std::size_t i = 0; i + 1 < n; ++i) sec[i] = (y_[i + 1] - y_[i]) / (x_[i + 1] - x_[i]);
  d_.resize(n);
  d_[0] = sec[0];
  d_[n - 1] = sec[n - 2];
  for (std::size_t i = 1; i + 1 < n; ++i)
    d_[i] = (sec[i - 1] * sec[i] <= 0.0) ? 0.0 : 0.5 * (sec[i - 1] + sec[i]);
  // Fritsch-Carlson limiter
  for (std::size_t i = 0; i + 1 < n; ++i) {
    if (sec[i] == 0.0) {
      d_[i] = d_[i + 1] = 0.0;
      continue;
    }
    const double a = d_[i] / sec[i], b = d_[i + 1] / sec[i];
    const double s = a * a + b * b;
    if (s > 9.0) {
      const double tau = 3.0 / std::sqrt(s);
      d_[i] = tau * a * sec[i];
      d_[i + 1] = tau * b * sec[i];
    }
  }
}

double MonotoneInterp::operator()(double x) const {
  if (x <= x_.front()) return y_.front();
  if (x >= x_.back()) return y_.back();
  const auto it = std::upper_bound(x_.begin(), x_.end(), x);
  const std::size_t j = static_cast<std::size_t>(it - x_.begin()) - 1;
  const double h = x_[j + 1] - x_[j];
  const double t = (x - x_[j]) / h;
  const double t2 = t * t, t3 = t2 * t;
  return (2 * t3 - 3 * t2 + 1) * y_[j] + (t3 - 2 * t2 + t) * h * d_[j] +
         (-2 * t3 + 3 * t2) * y_[j + 1] + (t3 - t2) * h * d_[j + 1];
}

}  // namespace fadstat::mc
