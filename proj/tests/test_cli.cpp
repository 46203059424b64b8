#include <doctest.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "fadstat/prodratio.hpp"

namespace fs = std::filesystem;
using namespace fadstat;

namespace {

std::string cli_path() {
  const char* p = std::getenv("FADSTAT_CLI");
  REQUIRE_MESSAGE(p != nullptr, "FADSTAT_CLI must point at the fading-stats binary");
  return p;
}

int run_cli(const std::string& args) {
  const std::string cmd = cli_path() + " " + args + " > /dev/null 2>&1";
  const int rc = std::system(cmd.c_str());
  return WEXITSTATUS(rc);
}

fs::path temp_dir() {
  const fs::path d = fs::temp_directory_path() / "fadstat_cli_test";
  fs::create_directories(d);
  return d;
}

void write_pair_config(const fs::path& p) {
  std::ofstream out(p);
  out << "[link1]\nalpha = 1.5\nkappa = 5.0\nmu = 1.2\nm = 2.8\ngamma_bar = 1.0\n"
         "[link2]\nalpha = 2.5\nkappa = 2.1\nmu = 3.0\nm = 4.4\ngamma_bar = 1.0\n"
         "[grid]\nstart = 0.01\nstop = 10\npoints = 200\nspacing = log\n";
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct Csv {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;
};

Csv read_csv(const fs::path& p) {
  Csv csv;
  std::ifstream in(p);
  std::string line;
  REQUIRE(std::getline(in, line));
  REQUIRE(line.rfind("# fading-stats v1, ", 0) == 0);
  REQUIRE(std::getline(in, line));
  std::stringstream hs(line);
  std::string tok;
  while (std::getline(hs, tok, ',')) csv.header.push_back(tok);
  while (std::getline(in, line)) {
    std::stringstream rs(line);
    std::vector<double> row;
    while (std::getline(rs, tok, ',')) row.push_back(std::stod(tok));
    csv.rows.push_back(row);
  }
  return csv;
}

}  // namespace

TEST_SUITE_BEGIN("cli");

TEST_CASE("pdf-product: row count, trapezoid mass, byte-identical reruns") {
  const fs::path dir = temp_dir();
  const fs::path cfg = dir / "pair.cfg";
  write_pair_config(cfg);
  const fs::path out1 = dir / "a.csv", out2 = dir / "b.csv";
  REQUIRE(run_cli("pdf-product --config " + cfg.string() + " --out " + out1.string()) == 0);
  REQUIRE(run_cli("pdf-product --config " + cfg.string() + " --out " + out2.string()) == 0);
  CHECK(slurp(out1) == slurp(out2));

  const Csv csv = read_csv(out1);
  REQUIRE(csv.rows.size() == 200);
  REQUIRE(csv.header.size() == 3);
  double trapz = 0.0;
  for (std::size_t i = 1; i < csv.rows.size(); ++i)
    trapz += 0.5 * (csv.rows[i][1] + csv.rows[i - 1][1]) * (csv.rows[i][0] - csv.rows[i - 1][0]);
  // the grid window holds all mass except the two analytic tails
  const PairStats ps({1.5, 5.0, 1.2, 2.8, 1.0}, {2.5, 2.1, 3.0, 4.4, 1.0});
  const double inside = product_cdf(ps, 10.0).value - product_cdf(ps, 0.01).value;
  CHECK(std::abs(trapz - inside) < 1.5e-3);  // trapezoid discretization only
  CHECK(std::abs(trapz - 1.0) < 0.05);
}

TEST_CASE("validate ratio passes its gate at moderate scale") {
  const fs::path dir = temp_dir();
  const fs::path cfg = dir / "pair.cfg";
  write_pair_config(cfg);
  std::ofstream(cfg, std::ios::app) << "[validate]\nks_threshold = 0.006\n";
  const fs::path out = dir / "val.csv";
  CHECK(run_cli("validate --what ratio --trials 150000 --seed 11 --config " + cfg.string() +
                " --out " + out.string()) == 0);
  CHECK(fs::exists(out));
}

TEST_CASE("exit code contract and no partial outputs") {
  const fs::path dir = temp_dir();
  const fs::path cfg = dir / "pair.cfg";
  write_pair_config(cfg);

  // unknown flag
  const fs::path never = dir / "never.csv";
  CHECK(run_cli("pdf-product --bogus --config " + cfg.string() + " --out " + never.string()) ==
        2);
  CHECK(!fs::exists(never));

  // unknown subcommand
  CHECK(run_cli("frobnicate --config " + cfg.string() + " --out " + never.string()) == 2);

  // invalid parameter value (mu < 0)
  const fs::path bad = dir / "bad.cfg";
  {
    std::ofstream out(bad);
    out << "[link1]\nalpha = 1.5\nkappa = 5.0\nmu = -1.0\nm = 2.8\ngamma_bar = 1.0\n"
           "[link2]\nalpha = 2.5\nkappa = 2.1\nmu = 3.0\nm = 4.4\ngamma_bar = 1.0\n"
           "[grid]\nstart = 0.01\nstop = 10\npoints = 5\nspacing = log\n";
  }
  CHECK(run_cli("pdf-product --config " + bad.string() + " --out " + never.string()) == 2);
  CHECK(!fs::exists(never));

  // missing config file
  CHECK(run_cli("pdf-product --config " + (dir / "nope.cfg").string() + " --out " +
                never.string()) == 1);

  // accuracy failure: tiny trial count cannot meet the default KS gate
  CHECK(run_cli("validate --what ratio --trials 5000 --config " + cfg.string() + " --out " +
                never.string()) == 3);
  CHECK(!fs::exists(never));

  // unwritable output path
  CHECK(run_cli("af --config " + cfg.string() + " --out /nonexistent-dir/x.csv") == 1);
}

TEST_CASE("moments and approx-fit emit the documented columns") {
  const fs::path dir = temp_dir();
  const fs::path cfg = dir / "pair.cfg";
  write_pair_config(cfg);
  const fs::path out = dir / "m.csv";
  REQUIRE(run_cli("moments --config " + cfg.string() + " --out " + out.string()) == 0);
  const Csv m = read_csv(out);
  CHECK(m.header == std::vector<std::string>{"n", "product_moment", "ratio_moment"});
  CHECK(m.rows.size() == 3);
  CHECK(m.rows[1][1] == doctest::Approx(1.0).epsilon(1e-10));

  const fs::path outf = dir / "f.csv";
  REQUIRE(run_cli("approx-fit --config " + cfg.string() + " --out " + outf.string()) == 0);
  const Csv f = read_csv(outf);
  REQUIRE(f.rows.size() == 1);
  CHECK(f.rows[0].size() == 8);
  CHECK(f.rows[0][6] < 0.05);  // product surrogate gap
  CHECK(f.rows[0][7] < 0.05);  // ratio surrogate gap
}

TEST_SUITE_END();
