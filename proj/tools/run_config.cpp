#include "run_config.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "fadstat/errors.hpp"

namespace cli {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }

}  // namespace

Config Config::parse_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::ios_base::failure("cannot open config file: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_text(ss.str());
}

Config Config::parse_text(std::string text) {
  Config cfg;
  cfg.raw_ = std::move(text);
  std::istringstream in(cfg.raw_);
  std::string line, section;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']')
        throw fadstat::ParameterError("config line " + std::to_string(lineno) +
                                      ": unterminated section header");
      section = trim(line.substr(1, line.size() - 2));
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw fadstat::ParameterError("config line " + std::to_string(lineno) +
                                    ": expected key = value");
    cfg.sections_[section][trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
  }
  return cfg;
}

bool Config::has(const std::string& sec, const std::string& key) const {
  const auto it = sections_.find(sec);
  return it != sections_.end() && it->second.count(key) > 0;
}

double Config::number(const std::string& sec, const std::string& key) const {
  const auto it = sections_.find(sec);
  if (it == sections_.end() || !it->second.count(key))
    throw fadstat::ParameterError("config: missing [" + sec + "] " + key);
  const std::string& v = it->second.at(key);
  std::size_t used = 0;
  const double x = std::stod(v, &used);
  if (trim(v.substr(used)) != "")
    throw fadstat::ParameterError("config: [" + sec + "] " + key + " is not a number: " + v);
  return x;
}

double Config::number_or(const std::string& sec, const std::string& key, double dflt) const {
  return has(sec, key) ? number(sec, key) : dflt;
}

std::string Config::text_or(const std::string& sec, const std::string& key,
                            const std::string& dflt) const {
  const auto it = sections_.find(sec);
  if (it == sections_.end() || !it->second.count(key)) return dflt;
  return it->second.at(key);
}

std::vector<double> Config::numbers(const std::string& sec, const std::string& key) const {
  const auto it = sections_.find(sec);
  if (it == sections_.end() || !it->second.count(key))
    throw fadstat::ParameterError("config: missing [" + sec + "] " + key);
  std::istringstream ss(it->second.at(key));
  std::vector<double> out;
  double v;
  while (ss >> v) out.push_back(v);
  if (out.empty())
    throw fadstat::ParameterError("config: [" + sec + "] " + key + " has no numbers");
  return out;
}

std::vector<double> GridSpec::labels() const {
  if (points < 1) throw fadstat::ParameterError("grid: points must be >= 1");
  if (points > 1 && !(stop > start))
    throw fadstat::ParameterError("grid: stop must exceed start (strictly increasing grid)");
  std::vector<double> out(points);
  for (int i = 0; i < points; ++i) {
    const double f = points == 1 ? 0.0 : static_cast<double>(i) / (points - 1);
    if (spacing == Spacing::log)
      out[i] = start * std::pow(stop / start, f);
    else
      out[i] = start + (stop - start) * f;
  }
  return out;
}

std::vector<double> GridSpec::values() const {
  std::vector<double> out = labels();
  if (spacing == Spacing::db)
    for (double& v : out) v = db_to_linear(v);
  if (spacing == Spacing::log && !(start > 0.0))
    throw fadstat::ParameterError("grid: log spacing requires start > 0");
  return out;
}

fadstat::FadingParams link_from(const Config& cfg, const std::string& sec) {
  double gbar;
  if (cfg.has(sec, "gamma_bar_db"))
    gbar = db_to_linear(cfg.number(sec, "gamma_bar_db"));
  else
    gbar = cfg.number(sec, "gamma_bar");
  return fadstat::FadingParams(cfg.number(sec, "alpha"), cfg.number(sec, "kappa"),
                               cfg.number(sec, "mu"), cfg.number(sec, "m"), gbar);
}

fadstat::LinkShape shape_from(const Config& cfg, const std::string& sec) {
  return {cfg.number(sec, "alpha"), cfg.number(sec, "kappa"), cfg.number(sec, "mu"),
          cfg.number(sec, "m")};
}

GridSpec grid_from(const Config& cfg) {
  GridSpec g;
  g.start = cfg.number("grid", "start");
  g.stop = cfg.number("grid", "stop");
  const double pts = cfg.number("grid", "points");
  g.points = static_cast<int>(pts);
  if (g.points != pts || g.points < 1)
    throw fadstat::ParameterError("grid: points must be a positive integer");
  const std::string sp = cfg.text_or("grid", "spacing", "linear");
  if (sp == "linear")
    g.spacing = GridSpec::Spacing::linear;
  else if (sp == "log")
    g.spacing = GridSpec::Spacing::log;
  else if (sp == "db")
    g.spacing = GridSpec::Spacing::db;
  else
    throw fadstat::ParameterError("grid: spacing must be linear, log or db");
  return g;
}

fadstat::IrsScenario irs_from(const Config& cfg) {
  const auto ps = cfg.numbers("irs", "pos_s");
  const auto pr = cfg.numbers("irs", "pos_r");
  const auto pd = cfg.numbers("irs", "pos_d");
  if (ps.size() != 2 || pr.size() != 2 || pd.size() != 2)
    throw fadstat::ParameterError("config: irs positions need two coordinates each");
  const double n = cfg.number("irs", "n_elements");
  if (n != std::floor(n) || n < 0)
    throw fadstat::ParameterError("config: n_elements must be a non-negative integer");
  fadstat::IrsScenario sc(shape_from(cfg, "link_sd"), shape_from(cfg, "link_sr"),
                          shape_from(cfg, "link_rd"), static_cast<int>(n),
                          cfg.number("irs", "gamma_s_db"), {ps[0], ps[1]}, {pr[0], pr[1]},
                          {pd[0], pd[1]}, cfg.number("irs", "pathloss_beta"));
  sc.k_switch = cfg.number_or("irs", "k_switch", sc.k_switch);
  return sc;
}

std::uint64_t config_hash(const std::string& command, const Config& cfg, std::uint64_t seed,
                          std::uint64_t trials, double tol) {
  std::uint64_t h = 1469598103934665603ULL;
  auto mix = [&h](const void* data, std::size_t n) {
    const auto* p = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < n; ++i) {
      h ^= p[i];
      h *= 1099511628211ULL;
    }
  };
  mix(command.data(), command.size());
  mix(cfg.raw().data(), cfg.raw().size());
  mix(&seed, sizeof seed);
  mix(&trials, sizeof trials);
  mix(&tol, sizeof tol);
  return h;
}

CsvWriter::CsvWriter(std::string command, std::uint64_t hash, std::vector<std::string> columns) {
  char head[128];
  std::snprintf(head, sizeof head, "# fading-stats v1, %s, %016llx\n", command.c_str(),
                static_cast<unsigned long long>(hash));
  buffer_ = head;
  for (std::size_t i = 0; i < columns.size(); ++i) {
    buffer_ += columns[i];
    buffer_ += i + 1 == columns.size() ? "\n" : ",";
  }
}

void CsvWriter::row(const std::vector<double>& values) {
  char num[40];
  for (std::size_t i = 0; i < values.size(); ++i) {
    std::snprintf(num, sizeof num, "%.12g", values[i]);
    buffer_ += num;
    buffer_ += i + 1 == values.size() ? "\n" : ",";
  }
  ++rows_;
}

std::size_t CsvWriter::commit(const std::string& out_path) {
  namespace fs = std::filesystem;
  const fs::path target(out_path);
  const fs::path tmp = target.parent_path() / (target.filename().string() + ".tmp");
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::ios_base::failure("cannot open output file: " + tmp.string());
    out << buffer_;
    if (!out) {
      out.close();
      fs::remove(tmp);
      throw std::ios_base::failure("write failed: " + tmp.string());
    }
  }
  std::error_code ec;
  fs::rename(tmp, target, ec);
  if (ec) {
    fs::remove(tmp);
    throw std::ios_base::failure("rename failed: " + target.string() + ": " + ec.message());
  }
  return rows_;
}

}  // namespace cli
