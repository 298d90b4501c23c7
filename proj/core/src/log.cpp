#include "ddforge/log.hpp"

#include <iostream>
#include <mutex>

namespace ddforge {
namespace {

std::mutex& sink_mutex() {
  static std::mutex m;
  return m;
}

LogSink& sink() {
  static LogSink s = [](std::string_view msg) { std::clog << "ddforge: warning: " << msg << '\n'; };
  return s;
}

}  // namespace

void set_warning_sink(LogSink s) {
  std::lock_guard lock(sink_mutex());
  sink() = std::move(s);
}

void log_warning(std::string_view message) {
  std::lock_guard lock(sink_mutex());
  if (sink()) sink()(message);
}

}  // namespace ddforge
