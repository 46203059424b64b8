#include <CLI11.hpp>
#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <mutex>
#include <thread>

#include "fadstat/approx.hpp"
#include "fadstat/apps.hpp"
#include "fadstat/errors.hpp"
#include "fadstat/mc.hpp"
#include "fadstat/prodratio.hpp"
#include "run_config.hpp"

namespace {

using namespace fadstat;

struct Options {
  std::string config_path;
  std::string out_path;
  int jobs = 0;  // 0 = hardware concurrency
  double tol = 1e-11;
  std::uint64_t seed = 1;
  std::uint64_t trials = 1000000;
  std::string what;  // validate only
};

int effective_jobs(int jobs) {
  if (jobs > 0) return jobs;
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

// evaluate f over the grid with a small worker pool; results land in index
// order no matter how the workers are scheduled
template <class F>
void parallel_for(std::size_t n, int jobs, F&& f) {
  const int workers = std::min<int>(effective_jobs(jobs), static_cast<int>(n));
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) f(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex err_mtx;
  std::vector<std::thread> pool;
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (;;) {
        const std::size_t i = next.fetch_add(1);
        if (i >= n) return;
        try {
          f(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(err_mtx);
          if (!error) error = std::current_exception();
          return;
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

PairPolicy policy_from(const Options& opt) {
  PairPolicy pol;
  pol.tol = opt.tol;
  return pol;
}

void summary_line(std::size_t rows, double max_err) {
  std::printf("rows=%zu max_abs_err_est=%.3g\n", rows, max_err);
}

int run_pair_grid(const std::string& cmd, const Options& opt, const cli::Config& cfg) {
  const PairStats ps(cli::link_from(cfg, "link1"), cli::link_from(cfg, "link2"),
                     policy_from(opt));
  const cli::GridSpec grid = cli::grid_from(cfg);
  const auto labels = grid.labels();
  const auto xs = grid.values();
  std::vector<EvalResult> out(xs.size());
  parallel_for(xs.size(), opt.jobs, [&](std::size_t i) {
    if (cmd == "pdf-product")
      out[i] = product_pdf(ps, xs[i]);
    else if (cmd == "cdf-product")
      out[i] = product_cdf(ps, xs[i]);
    else if (cmd == "pdf-ratio")
      out[i] = ratio_pdf(ps, xs[i]);
    else if (cmd == "cdf-ratio")
      out[i] = ratio_cdf(ps, xs[i]);
    else if (cmd == "op-cascade")
      out[i] = cascade_outage(ps, xs[i]);
  });
  const char* xname = cmd == "op-cascade" ? "gamma_th" : (cmd.back() == 't' ? "y" : "z");
  cli::CsvWriter csv(cmd, cli::config_hash(cmd, cfg, opt.seed, opt.trials, opt.tol),
                     {xname, cmd.substr(0, 3) == "pdf" ? "pdf"
                              : cmd.substr(0, 3) == "cdf" ? "cdf" : "op",
                      "abs_err_est"});
  double max_err = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    csv.row({labels[i], out[i].value, out[i].abs_err_est});
    max_err = std::max(max_err, out[i].abs_err_est);
  }
  summary_line(csv.commit(opt.out_path), max_err);
  return 0;
}

int run_moments(const Options& opt, const cli::Config& cfg) {
  const PairStats ps(cli::link_from(cfg, "link1"), cli::link_from(cfg, "link2"),
                     policy_from(opt));
  std::vector<double> orders{0.5, 1.0, 2.0};
  if (cfg.has("moments", "orders")) orders = cfg.numbers("moments", "orders");
  cli::CsvWriter csv("moments", cli::config_hash("moments", cfg, opt.seed, opt.trials, opt.tol),
                     {"n", "product_moment", "ratio_moment"});
  for (double n : orders) {
    double rm = std::numeric_limits<double>::quiet_NaN();
    try {
      rm = ratio_moment(ps, n);
    } catch (const MomentUndefinedError&) {
      // heavy 1/X2 tail: reported as nan in the table
    }
    csv.row({n, product_moment(ps, n), rm});
  }
  summary_line(csv.commit(opt.out_path), 0.0);
  return 0;
}

int run_approx_fit(const Options& opt, const cli::Config& cfg) {
  const PairStats ps(cli::link_from(cfg, "link1"), cli::link_from(cfg, "link2"),
                     policy_from(opt));
  const GammaFit gy = fit_gamma_product(ps);
  const BetaPrimeFit bz = fit_beta_prime_ratio(ps);
  double gap_y = 0.0, gap_z = 0.0;
  const double scale = ps.p1.gamma_bar * ps.p2.gamma_bar;
  for (int i = 0; i < 200; ++i) {
    const double x = scale * std::pow(10.0, -2.0 + 3.0 * i / 199.0);
    gap_y = std::max(gap_y, std::abs(gamma_cdf(gy, x) - product_cdf(ps, x).value));
    const double z = ps.p1.gamma_bar / ps.p2.gamma_bar * std::pow(10.0, -2.0 + 3.0 * i / 199.0);
    gap_z = std::max(gap_z, std::abs(beta_prime_cdf(bz, z) - ratio_cdf(ps, z).value));
  }
  cli::CsvWriter csv("approx-fit",
                     cli::config_hash("approx-fit", cfg, opt.seed, opt.trials, opt.tol),
                     {"k_y", "theta_y", "k_z1", "theta_z1", "k_z2", "theta_z2",
                      "max_cdf_gap_product", "max_cdf_gap_ratio"});
  csv.row({gy.k, gy.theta, bz.k1, bz.theta1, bz.k2, bz.theta2, gap_y, gap_z});
  summary_line(csv.commit(opt.out_path), 0.0);
  return 0;
}

int run_af(const Options& opt, const cli::Config& cfg) {
  const PairStats ps(cli::link_from(cfg, "link1"), cli::link_from(cfg, "link2"),
                     policy_from(opt));
  cli::CsvWriter csv("af", cli::config_hash("af", cfg, opt.seed, opt.trials, opt.tol), {"af"});
  csv.row({amount_of_fading(ps)});
  summary_line(csv.commit(opt.out_path), 0.0);
  return 0;
}

int run_secrecy(const std::string& cmd, const Options& opt, const cli::Config& cfg) {
  // sweeps the eavesdropper mean power over the grid (dB or linear)
  const FadingParams sd = cli::link_from(cfg, "link_sd");
  const FadingParams se0 = cli::link_from(cfg, "link_se");
  const double rate = cmd == "sop" ? cfg.number_or("secrecy", "rate_rs", 1.0) : 0.0;
  const cli::GridSpec grid = cli::grid_from(cfg);
  const auto labels = grid.labels();
  const auto gses = grid.values();
  std::vector<EvalResult> out(gses.size());
  parallel_for(gses.size(), opt.jobs, [&](std::size_t i) {
    const FadingParams se(se0.alpha, se0.kappa, se0.mu, se0.m, gses[i]);
    const SecrecyScenario sc(sd, se, rate, policy_from(opt));
    out[i] = cmd == "sop" ? secrecy_outage(sc) : spsc(sc);
  });
  cli::CsvWriter csv(cmd, cli::config_hash(cmd, cfg, opt.seed, opt.trials, opt.tol),
                     {"gamma_se", cmd == "sop" ? "sop" : "spsc", "abs_err_est"});
  double max_err = 0.0;
  for (std::size_t i = 0; i < gses.size(); ++i) {
    csv.row({labels[i], out[i].value, out[i].abs_err_est});
    max_err = std::max(max_err, out[i].abs_err_est);
  }
  summary_line(csv.commit(opt.out_path), max_err);
  return 0;
}

int run_irs_op(const Options& opt, const cli::Config& cfg) {
  const IrsScenario sc = cli::irs_from(cfg);
  const cli::GridSpec grid = cli::grid_from(cfg);
  const auto labels = grid.labels();
  const auto ths = grid.values();
  const bool gaussian = sc.n_elements < 1 || irs_gamma_params(sc).k_mom > sc.k_switch;
  std::vector<EvalResult> out(ths.size());
  parallel_for(ths.size(), opt.jobs, [&](std::size_t i) {
    out[i] = gaussian ? irs_outage_gaussian(sc, ths[i]) : irs_outage_gamma(sc, ths[i]);
  });
  cli::CsvWriter csv("irs-op", cli::config_hash("irs-op", cfg, opt.seed, opt.trials, opt.tol),
                     {"gamma_th", "op", "abs_err_est", "used_gaussian"});
  double max_err = 0.0;
  for (std::size_t i = 0; i < ths.size(); ++i) {
    csv.row({labels[i], out[i].value, out[i].abs_err_est, gaussian ? 1.0 : 0.0});
    max_err = std::max(max_err, out[i].abs_err_est);
  }
  summary_line(csv.commit(opt.out_path), max_err);
  return 0;
}

int run_validate(const Options& opt, const cli::Config& cfg) {
  const double ks_threshold = cfg.number_or("validate", "ks_threshold", 0.0017);
  const mc::McConfig mcfg(opt.seed, opt.trials, effective_jobs(opt.jobs));

  if (opt.what == "irs") {
    const IrsScenario sc = cli::irs_from(cfg);
    const cli::GridSpec grid = cli::grid_from(cfg);
    const auto labels = grid.labels();
    const auto ths = grid.values();
    const auto curve = mc::simulate_irs(sc, mcfg, ths);
    const bool gaussian = sc.n_elements < 1 || irs_gamma_params(sc).k_mom > sc.k_switch;
    cli::CsvWriter csv("validate",
                       cli::config_hash("validate-irs", cfg, opt.seed, opt.trials, opt.tol),
                       {"gamma_th", "op_mc", "op_analytic", "abs_gap"});
    double max_gap = 0.0;
    for (std::size_t i = 0; i < ths.size(); ++i) {
      const double an =
          gaussian ? irs_outage_gaussian(sc, ths[i]).value : irs_outage_gamma(sc, ths[i]).value;
      const double gap = std::abs(an - curve.op[i]);
      max_gap = std::max(max_gap, gap);
      csv.row({labels[i], curve.op[i], an, gap});
    }
    // budget: approximation gap plus four binomial standard errors
    const double budget = 0.02 + 4.0 * 0.5 / std::sqrt(static_cast<double>(opt.trials));
    std::printf("max_abs_gap=%.5g budget=%.5g\n", max_gap, budget);
    if (max_gap >= budget)
      throw AccuracyError("validate: IRS outage gap exceeds budget", max_gap, budget);
    summary_line(csv.commit(opt.out_path), max_gap);
    return 0;
  }

  const PairStats ps(cli::link_from(cfg, "link1"), cli::link_from(cfg, "link2"),
                     policy_from(opt));
  std::vector<double> samples;
  if (opt.what == "product")
    samples = mc::draw_product(ps, mcfg);
  else if (opt.what == "ratio")
    samples = mc::draw_ratio(ps, mcfg);
  else
    throw ParameterError("validate: --what must be product, ratio or irs");

  const auto [mn, mx] = std::minmax_element(samples.begin(), samples.end());
  const int npts = 2001;
  std::vector<double> gx(npts), gy(npts);
  const double llo = std::log(*mn * 0.999), lhi = std::log(*mx * 1.001);
  for (int i = 0; i < npts; ++i) {
    gx[i] = std::exp(llo + (lhi - llo) * i / (npts - 1));
    gy[i] = opt.what == "product" ? product_cdf(ps, gx[i]).value : ratio_cdf(ps, gx[i]).value;
  }
  const mc::MonotoneInterp interp(gx, gy);
  std::vector<double> sorted = samples;
  std::sort(sorted.begin(), sorted.end());
  const double ks = mc::ks_statistic(samples, [&](double x) { return interp(x); });

  cli::CsvWriter csv("validate",
                     cli::config_hash("validate-" + opt.what, cfg, opt.seed, opt.trials, opt.tol),
                     {"x", "ecdf", "cdf", "ks"});
  const std::size_t n = sorted.size();
  for (int i = 0; i < 200; ++i) {
    const std::size_t j = static_cast<std::size_t>(n * (i + 0.5) / 200.0);
    csv.row({sorted[j], (j + 1.0) / static_cast<double>(n), interp(sorted[j]), ks});
  }
  std::printf("ks=%.6g threshold=%.6g\n", ks, ks_threshold);
  if (ks >= ks_threshold)
    throw AccuracyError("validate: KS statistic exceeds the gate", ks, ks_threshold);
  summary_line(csv.commit(opt.out_path), ks);
  return 0;
}

int dispatch(const std::string& cmd, const Options& opt) {
  const cli::Config cfg = cli::Config::parse_file(opt.config_path);
  if (cmd == "pdf-product" || cmd == "cdf-product" || cmd == "pdf-ratio" ||
      cmd == "cdf-ratio" || cmd == "op-cascade")
    return run_pair_grid(cmd, opt, cfg);
  if (cmd == "moments") return run_moments(opt, cfg);
  if (cmd == "approx-fit") return run_approx_fit(opt, cfg);
  if (cmd == "af") return run_af(opt, cfg);
  if (cmd == "sop" || cmd == "spsc") return run_secrecy(cmd, opt, cfg);
  if (cmd == "irs-op") return run_irs_op(opt, cfg);
  if (cmd == "validate") return run_validate(opt, cfg);
  throw ParameterError("unknown command: " + cmd);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Statistics of products and ratios of alpha-kappa-mu shadowed variables"};
  app.require_subcommand(1);
  Options opt;

  const std::vector<std::string> commands = {
      "pdf-product", "cdf-product", "pdf-ratio", "cdf-ratio", "moments", "approx-fit",
      "op-cascade",  "af",          "sop",       "spsc",      "irs-op",  "validate"};
  for (const auto& name : commands) {
    CLI::App* sub = app.add_subcommand(name);
    sub->add_option("--config", opt.config_path, "configuration file")->required();
    sub->add_option("--out", opt.out_path, "output CSV path")->required();
    sub->add_option("--jobs", opt.jobs, "worker threads (default: all cores)");
    sub->add_option("--tol", opt.tol, "series tolerance");
    sub->add_option("--seed", opt.seed, "master seed");
    if (name == "validate") {
      sub->add_option("--trials", opt.trials, "Monte Carlo trials");
      sub->add_option("--what", opt.what, "product | ratio | irs")->required();
    }
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::fprintf(stderr, "%s\n", e.what());
    return 2;
  }

  try {
    return dispatch(app.get_subcommands().front()->get_name(), opt);
  } catch (const fadstat::AccuracyError& e) {
    std::fprintf(stderr, "accuracy error: %s\n", e.what());
    return 3;
  } catch (const fadstat::ParameterError& e) {
    std::fprintf(stderr, "parameter error: %s\n", e.what());
    return 2;
  } catch (const fadstat::MomentUndefinedError& e) {
    std::fprintf(stderr, "parameter error: %s\n", e.what());
    return 2;
  } catch (const fadstat::DomainError& e) {
    std::fprintf(stderr, "parameter error: %s\n", e.what());
    return 2;
  } catch (const fadstat::DegenerateCaseError& e) {
    std::fprintf(stderr, "parameter error: %s\n", e.what());
    return 2;
  } catch (const std::ios_base::failure& e) {
    std::fprintf(stderr, "i/o error: %s\n", e.what());
    return 1;
  } catch (const std::filesystem::filesystem_error& e) {
    std::fprintf(stderr, "i/o error: %s\n", e.what());
    return 1;
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "parameter error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
}
