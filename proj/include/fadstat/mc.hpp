#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "fadstat/apps.hpp"
#include "fadstat/prodratio.hpp"

namespace fadstat::mc {

struct McConfig {
  std::uint64_t master_seed = 1;
  std::size_t trials = 1000000;
  int stream_count = 8;

  McConfig() = default;
  McConfig(std::uint64_t seed, std::size_t trials, int streams);
};

struct SampleSummary {
  std::vector<double> grid;
  std::vector<double> ecdf;  // P(X <= grid[i])
  double mean = 0.0;
  double variance = 0.0;
  double mean_se = 0.0;      // standard error of the mean
  std::size_t trials = 0;
};

// All draws, deterministic for a given config: trials are partitioned over
// stream_count independent streams and concatenated in stream order, so the
// result is bit-identical regardless of scheduling.
std::vector<double> draw_product(const PairStats& ps, const McConfig& cfg);
std::vector<double> draw_ratio(const PairStats& ps, const McConfig& cfg);

SampleSummary summarize(std::span<const double> samples, std::span<const double> grid);

SampleSummary simulate_product(const PairStats& ps, const McConfig& cfg,
                               std::span<const double> grid);
SampleSummary simulate_ratio(const PairStats& ps, const McConfig& cfg,
                             std::span<const double> grid);

struct IrsOpCurve {
  std::vector<double> gamma_th;  // linear thresholds
  std::vector<double> op;
  std::size_t trials = 0;
};

// Empirical outage of the full combined-envelope SNR over a threshold grid.
IrsOpCurve simulate_irs(const IrsScenario& sc, const McConfig& cfg,
                        std::span<const double> gamma_th);

// Exact Kolmogorov-Smirnov statistic of samples against an analytic CDF.
// Sorts a copy of the samples.
double ks_statistic(std::vector<double> samples, const std::function<double(double)>& cdf);

// Monotone cubic interpolant (Fritsch-Carlson); used to evaluate an analytic
// CDF cheaply at sample resolution.
class MonotoneInterp {
 public:
  MonotoneInterp(std::vector<double> x, std::vector<double> y);
  double operator()(double x) const;

 private:
  std::vector<double> x_, y_, d_;  // nodes, values, endpoint-adjusted slopes
};

}  // namespace fadstat::mc
