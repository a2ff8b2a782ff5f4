#include "snappa/config.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace snappa {

namespace {

class ExpressionParser {
 public:
  explicit ExpressionParser(std::string_view text) : s_(text) {}

  double run() {
    const double v = sum();
    skip();
    if (pos_ != s_.size()) fail("unexpected '" + std::string(1, s_[pos_]) + "'");
    return v;
  }

 private:
  [[noreturn]] void fail(const std::string& why) const {
    throw ConfigError("cannot evaluate '" + std::string(s_) + "': " + why);
  }

  void skip() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }

  bool eat(char c) {
    skip();
    if (pos_ < s_.size() && s_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  double sum() {
    double v = product();
    for (;;) {
      if (eat('+')) v += product();
      else if (eat('-')) v -= product();
      else return v;
    }
  }

  double product() {
    double v = unary();
    for (;;) {
      if (eat('*')) v *= unary();
      else if (eat('/')) v /= unary();
      else return v;
    }
  }

  double unary() {
    if (eat('-')) return -unary();
    if (eat('+')) return unary();
    const double base = primary();
    if (eat('^')) return std::pow(base, unary());
    return base;
  }

  double primary() {
    skip();
    if (pos_ >= s_.size()) fail("unexpected end");
    if (eat('(')) {
      const double v = sum();
      if (!eat(')')) fail("missing ')'");
      return v;
    }
    const char c = s_[pos_];
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      double v = 0.0;
      const auto [end, ec] = std::from_chars(s_.data() + pos_, s_.data() + s_.size(), v);
      if (ec != std::errc()) fail("bad number");
      pos_ = static_cast<std::size_t>(end - s_.data());
      return v;
    }
    if (std::isalpha(static_cast<unsigned char>(c))) {
      const std::size_t start = pos_;
      while (pos_ < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_')) ++pos_;
      const std::string name(s_.substr(start, pos_ - start));
      if (name == "pi") return kPi;
      if (!eat('(')) fail("unknown name '" + name + "'");
      const double arg = sum();
      if (!eat(')')) fail("missing ')'");
      if (name == "sqrt") return std::sqrt(arg);
      if (name == "exp") return std::exp(arg);
      if (name == "log") return std::log(arg);
      if (name == "sin") return std::sin(arg);
      if (name == "cos") return std::cos(arg);
      fail("unknown function '" + name + "'");
    }
    fail("unexpected '" + std::string(1, c) + "'");
  }

  std::string_view s_;
  std::size_t pos_ = 0;
};

struct Unit {
  const char* name;
  double scale;
};

constexpr Unit kFrequencyUnits[] = {{"Hz", kTwoPi}, {"kHz", kTwoPi * 1e3}, {"MHz", kTwoPi * 1e6},
                                    {"GHz", kTwoPi * 1e9}, {"rad/s", 1.0}};
constexpr Unit kTimeUnits[] = {{"s", 1.0}, {"ms", 1e-3}, {"us", 1e-6}, {"ns", 1e-9}};
constexpr Unit kPhaseUnits[] = {{"rad", 1.0}, {"deg", kPi / 180.0}};

}  // namespace

double eval_expression(std::string_view text) {
  const double v = ExpressionParser(text).run();
  if (!std::isfinite(v)) throw ConfigError("expression '" + std::string(text) + "' is not finite");
  return v;
}

double parse_quantity(std::string_view text, Quantity quantity) {
  const std::string t = trim(text);
  const std::size_t cut = t.find_last_of(" \t");
  const std::string unit = cut == std::string::npos ? "" : t.substr(cut + 1);
  const std::string number = cut == std::string::npos ? t : trim(t.substr(0, cut));

  auto scaled = [&](const auto& table, const char* what) {
    for (const Unit& u : table) {
      if (unit == u.name) return eval_expression(number) * u.scale;
    }
    throw ConfigError("'" + t + "' needs a " + what + " unit");
  };

  switch (quantity) {
    case Quantity::frequency:
      return scaled(kFrequencyUnits, "frequency (Hz, kHz, MHz, GHz)");
    case Quantity::time:
      return scaled(kTimeUnits, "time (s, ms, us, ns)");
    case Quantity::phase:
      for (const Unit& u : kPhaseUnits) {
        if (unit == u.name) return eval_expression(number) * u.scale;
      }
      return eval_expression(t);
    case Quantity::dimensionless:
      break;
  }
  return eval_expression(t);
}

std::string format_number(double value) {
  char buf[64];
  for (int precision = 6; precision <= 17; ++precision) {
    std::snprintf(buf, sizeof buf, "%.*g", precision, value);
    if (std::strtod(buf, nullptr) == value) break;
  }
  return buf;
}

std::string format_frequency(double omega) { return format_number(omega / kTwoPi) + " Hz"; }

std::string format_time(double seconds) { return format_number(seconds) + " s"; }

std::string trim(std::string_view text) {
  std::size_t b = 0, e = text.size();
  while (b < e && std::isspace(static_cast<unsigned char>(text[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(text[e - 1]))) --e;
  return std::string(text.substr(b, e - b));
}

std::vector<std::string> split_list(std::string_view text, char separator) {
  std::vector<std::string> out;
  if (trim(text).empty()) return out;
  std::size_t start = 0;
  for (;;) {
    const std::size_t next = text.find(separator, start);
    out.push_back(trim(text.substr(start, next == std::string_view::npos ? std::string_view::npos : next - start)));
    if (next == std::string_view::npos) break;
    start = next + 1;
  }
  return out;
}

Config Config::parse(std::string_view text, const std::string& origin) {
  Config c;
  c.origin_ = origin;
  std::istringstream in{std::string(text)};
  std::string line;
  int number = 0;
  Section* current = nullptr;
  while (std::getline(in, line)) {
    ++number;
    const std::size_t hash = line.find('#');
    const std::string body = trim(hash == std::string::npos ? line : line.substr(0, hash));
    if (body.empty()) continue;
    const std::string where = origin + ":" + std::to_string(number);
    if (body.front() == '[') {
      if (body.back() != ']') throw ConfigError(where + ": unterminated section header");
      const std::string name = trim(body.substr(1, body.size() - 2));
      if (name.empty()) throw ConfigError(where + ": empty section name");
      if (c.find(name)) throw ConfigError(where + ": duplicate section [" + name + "]");
      c.sections_.push_back({name, {}});
      current = &c.sections_.back();
      continue;
    }
    const std::size_t eq = body.find('=');
    if (eq == std::string::npos) throw ConfigError(where + ": expected 'key = value'");
    if (!current) throw ConfigError(where + ": key outside of a section");
    const std::string key = trim(body.substr(0, eq));
    if (key.empty()) throw ConfigError(where + ": empty key");
    for (const auto& entry : current->entries) {
      if (entry.first == key) throw ConfigError(where + ": duplicate key '" + key + "'");
    }
    current->entries.emplace_back(key, trim(body.substr(eq + 1)));
  }
  return c;
}

Config Config::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse(ss.str(), path);
}

const Config::Section* Config::find(const std::string& section) const {
  for (const Section& s : sections_) {
    if (s.name == section) return &s;
  }
  return nullptr;
}

void Config::fail(const std::string& section, const std::string& key, const std::string& why) const {
  throw ConfigError(origin_ + ": [" + section + "] " + key + ": " + why);
}

bool Config::has_section(const std::string& section) const { return find(section) != nullptr; }

bool Config::has(const std::string& section, const std::string& key) const {
  const Section* s = find(section);
  if (!s) return false;
  for (const auto& entry : s->entries) {
    if (entry.first == key) return true;
  }
  return false;
}

std::vector<std::string> Config::sections() const {
  std::vector<std::string> out;
  for (const Section& s : sections_) out.push_back(s.name);
  return out;
}

std::vector<std::string> Config::keys(const std::string& section) const {
  std::vector<std::string> out;
  if (const Section* s = find(section)) {
    for (const auto& entry : s->entries) out.push_back(entry.first);
  }
  return out;
}

std::string Config::get_string(const std::string& section, const std::string& key) const {
  const Section* s = find(section);
  if (!s) fail(section, key, "missing section");
  for (const auto& entry : s->entries) {
    if (entry.first == key) return entry.second;
  }
  fail(section, key, "missing key");
}

std::string Config::get_string_or(const std::string& section, const std::string& key,
                                  const std::string& fallback) const {
  return has(section, key) ? get_string(section, key) : fallback;
}

double Config::get(const std::string& section, const std::string& key, Quantity quantity) const {
  const std::string text = get_string(section, key);
  try {
    return parse_quantity(text, quantity);
  } catch (const ConfigError& e) {
    fail(section, key, e.what());
  }
}

double Config::get_or(const std::string& section, const std::string& key, Quantity quantity,
                      double fallback) const {
  return has(section, key) ? get(section, key, quantity) : fallback;
}

int Config::get_int(const std::string& section, const std::string& key) const {
  const std::string text = get_string(section, key);
  int v = 0;
  const auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || end != text.data() + text.size()) fail(section, key, "'" + text + "' is not an integer");
  return v;
}

int Config::get_int_or(const std::string& section, const std::string& key, int fallback) const {
  return has(section, key) ? get_int(section, key) : fallback;
}

bool Config::get_bool_or(const std::string& section, const std::string& key, bool fallback) const {
  if (!has(section, key)) return fallback;
  const std::string v = get_string(section, key);
  if (v == "true" || v == "on" || v == "yes") return true;
  if (v == "false" || v == "off" || v == "no") return false;
  fail(section, key, "'" + v + "' is not a boolean");
}

std::vector<std::string> Config::get_list(const std::string& section, const std::string& key) const {
  return split_list(get_string(section, key));
}

void Config::set(const std::string& section, const std::string& key, const std::string& value) {
  Section* s = const_cast<Section*>(find(section));
  if (!s) {
    sections_.push_back({section, {}});
    s = &sections_.back();
  }
  for (auto& entry : s->entries) {
    if (entry.first == key) {
      entry.second = value;
      return;
    }
  }
  s->entries.emplace_back(key, value);
}

std::string Config::dump() const {
  std::ostringstream out;
  bool first = true;
  for (const Section& s : sections_) {
    if (!first) out << '\n';
    first = false;
    out << '[' << s.name << "]\n";
    for (const auto& [k, v] : s.entries) out << k << " = " << v << '\n';
  }
  return out.str();
}

void Config::save(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write " + path);
  out << dump();
}

SystemParams system_params_from(const Config& config, const std::string& section) {
  const SystemParams d = SystemParams::table_s1();
  SystemParams p;
  p.omega_q = config.get_or(section, "qubit_frequency", Quantity::frequency, d.omega_q);
  p.omega_c = config.get_or(section, "cavity_frequency", Quantity::frequency, d.omega_c);
  p.chi = config.get_or(section, "chi", Quantity::frequency, d.chi);
  p.chi_prime = config.get_or(section, "chi_prime", Quantity::frequency, d.chi_prime);
  p.kerr_c = config.get_or(section, "kerr", Quantity::frequency, d.kerr_c);
  p.alpha_q = config.get_or(section, "anharmonicity", Quantity::frequency, d.alpha_q);
  p.t1_qubit = config.get_or(section, "t1_qubit", Quantity::time, d.t1_qubit);
  p.t2_qubit = config.get_or(section, "t2_qubit", Quantity::time, d.t2_qubit);
  p.t1_cavity = config.get_or(section, "t1_cavity", Quantity::time, d.t1_cavity);
  p.delta = config.get_or(section, "drive_detuning", Quantity::frequency, d.delta);
  try {
    p.validate();
  } catch (const InvariantError& e) {
    throw ConfigError(config.origin() + ": [" + section + "] " + e.what());
  }
  return p;
}

void write_system_params(Config& config, const SystemParams& p, const std::string& section) {
  config.set(section, "qubit_frequency", format_frequency(p.omega_q));
  config.set(section, "cavity_frequency", format_frequency(p.omega_c));
  config.set(section, "chi", format_frequency(p.chi));
  config.set(section, "chi_prime", format_frequency(p.chi_prime));
  config.set(section, "kerr", format_frequency(p.kerr_c));
  config.set(section, "anharmonicity", format_frequency(p.alpha_q));
  config.set(section, "t1_qubit", format_time(p.t1_qubit));
  config.set(section, "t2_qubit", format_time(p.t2_qubit));
  config.set(section, "t1_cavity", format_time(p.t1_cavity));
  config.set(section, "drive_detuning", format_frequency(p.delta));
}

StarkFit stark_fit_from(const Config& config, const std::string& section) {
  const StarkFit d = StarkFit::fitted();
  StarkFit f{config.get_or(section, "eta1", Quantity::dimensionless, d.eta1),
             config.get_or(section, "eta2", Quantity::dimensionless, d.eta2),
             config.get_or(section, "eta12", Quantity::dimensionless, d.eta12)};
  try {
    f.validate();
  } catch (const InvariantError& e) {
    throw ConfigError(config.origin() + ": [" + section + "] " + e.what());
  }
  return f;
}

ModelOptions model_options_from(const Config& config, const std::string& section) {
  ModelOptions o;
  o.free_kerr = config.get_bool_or(section, "free_kerr", o.free_kerr);
  return o;
}

}  // namespace snappa
