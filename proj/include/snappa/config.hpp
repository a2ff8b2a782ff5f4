#pragma once

// Plain-text key-value documents:
//
//   # comment
//   [system]
//   chi = 1.44 MHz
//   t1_qubit = 80 us
//
// Frequencies are written in Hz/kHz/MHz/GHz and stored as angular frequencies.
// Times take s/ms/us/ns. Dimensionless values and phases accept small arithmetic
// expressions such as "-pi/2" or "sqrt(2/3)".

#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "snappa/hamiltonian.hpp"

namespace snappa {

enum class Quantity { dimensionless, frequency, time, phase };

/// Numbers, pi, + - * / ^, parentheses and sqrt/exp/log/sin/cos.
double eval_expression(std::string_view text);

/// Value with a mandatory unit for frequencies and times. Frequencies come back in rad/s.
double parse_quantity(std::string_view text, Quantity quantity);

/// Shortest text that reads back to the same double.
std::string format_number(double value);
/// Angular frequency written in Hz.
std::string format_frequency(double omega);
std::string format_time(double seconds);

class Config {
 public:
  static Config parse(std::string_view text, const std::string& origin = "<text>");
  static Config load(const std::string& path);

  const std::string& origin() const { return origin_; }
  bool has_section(const std::string& section) const;
  bool has(const std::string& section, const std::string& key) const;
  std::vector<std::string> sections() const;
  std::vector<std::string> keys(const std::string& section) const;

  std::string get_string(const std::string& section, const std::string& key) const;
  std::string get_string_or(const std::string& section, const std::string& key, const std::string& fallback) const;
  double get(const std::string& section, const std::string& key, Quantity quantity = Quantity::dimensionless) const;
  double get_or(const std::string& section, const std::string& key, Quantity quantity, double fallback) const;
  int get_int(const std::string& section, const std::string& key) const;
  int get_int_or(const std::string& section, const std::string& key, int fallback) const;
  bool get_bool_or(const std::string& section, const std::string& key, bool fallback) const;
  /// Comma-separated items, trimmed.
  std::vector<std::string> get_list(const std::string& section, const std::string& key) const;

  void set(const std::string& section, const std::string& key, const std::string& value);
  std::string dump() const;
  void save(const std::string& path) const;

 private:
  struct Section {
    std::string name;
    std::vector<std::pair<std::string, std::string>> entries;
  };
  const Section* find(const std::string& section) const;
  [[noreturn]] void fail(const std::string& section, const std::string& key, const std::string& why) const;

  std::string origin_ = "<text>";
  std::vector<Section> sections_;
};

std::vector<std::string> split_list(std::string_view text, char separator = ',');
std::string trim(std::string_view text);

/// [system] section. Missing keys fall back to the shipped device values.
SystemParams system_params_from(const Config& config, const std::string& section = "system");
void write_system_params(Config& config, const SystemParams& params, const std::string& section = "system");
StarkFit stark_fit_from(const Config& config, const std::string& section = "stark");
ModelOptions model_options_from(const Config& config, const std::string& section = "model");

}  // namespace snappa
