#include "snappa/errors.hpp"

#include <iostream>
#include <mutex>
#include <set>

namespace snappa {

namespace {

std::mutex& sink_mutex() {
  static std::mutex m;
  return m;
}

WarningHandler& handler() {
  static WarningHandler h = nullptr;
  return h;
}

void default_sink(const std::string& message) {
  // Sweeps hit the same truncation warning thousands of times; print each once.
  static std::set<std::string> seen;
  if (seen.insert(message).second) std::cerr << "snappa: warning: " << message << '\n';
}

}  // namespace

void set_warning_handler(WarningHandler h) {
  std::lock_guard<std::mutex> lock(sink_mutex());
  handler() = h;
}

void warn(const std::string& message) {
  std::lock_guard<std::mutex> lock(sink_mutex());
  if (handler() != nullptr) {
    handler()(message);
  } else {
    default_sink(message);
  }
}

}  // namespace snappa
