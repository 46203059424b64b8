#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "fadstat/akmu.hpp"
#include "fadstat/apps.hpp"

namespace cli {

// flat "key = value" sections: [link1] alpha = 1.5 ...; '#' starts a comment.
// Keys carrying dB values use a _db suffix; conversion to linear happens here,
// exactly once.
class Config {
 public:
  static Config parse_file(const std::string& path);
  static Config parse_text(std::string text);

  bool has(const std::string& sec, const std::string& key) const;
  double number(const std::string& sec, const std::string& key) const;
  double number_or(const std::string& sec, const std::string& key, double dflt) const;
  std::string text_or(const std::string& sec, const std::string& key,
                      const std::string& dflt) const;
  std::vector<double> numbers(const std::string& sec, const std::string& key) const;

  const std::string& raw() const { return raw_; }

 private:
  std::map<std::string, std::map<std::string, std::string>> sections_;
  std::string raw_;
};

struct GridSpec {
  double start = 0.0;  // in configured units
  double stop = 0.0;
  int points = 0;
  enum class Spacing { linear, log, db } spacing = Spacing::linear;

  std::vector<double> labels() const;  // configured units, strictly increasing
  std::vector<double> values() const;  // linear scale for computation
};

// link section: alpha, kappa, mu, m, gamma_bar or gamma_bar_db
fadstat::FadingParams link_from(const Config& cfg, const std::string& section);
fadstat::LinkShape shape_from(const Config& cfg, const std::string& section);
GridSpec grid_from(const Config& cfg);
fadstat::IrsScenario irs_from(const Config& cfg);

// FNV-1a of everything that determines the output bytes
std::uint64_t config_hash(const std::string& command, const Config& cfg, std::uint64_t seed,
                          std::uint64_t trials, double tol);

// CSV sink with the header contract; buffered, atomically renamed on close
class CsvWriter {
 public:
  CsvWriter(std::string command, std::uint64_t hash, std::vector<std::string> columns);
  void row(const std::vector<double>& values);
  // returns the number of data rows written
  std::size_t commit(const std::string& out_path);

 private:
  std::string buffer_;
  std::size_t rows_ = 0;
};

}  // namespace cli
