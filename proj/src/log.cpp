#include "gradsense/log.hpp"

#include <iostream>
#include <mutex>

namespace gradsense {
namespace {

std::mutex g_log_mutex;
LogSink g_sink;

const char* level_name(LogLevel level) {
  switch (level) {
    case LogLevel::Debug: return "debug";
    case LogLevel::Info: return "info";
    case LogLevel::Warning: return "warning";
    case LogLevel::Error: return "error";
  }
  return "?";
}

}  // namespace

void set_log_sink(LogSink sink) {
  std::lock_guard lock(g_log_mutex);
  g_sink = std::move(sink);
}

void log(LogLevel level, std::string_view message) {
  std::lock_guard lock(g_log_mutex);
  if (g_sink) {
    g_sink(level, message);
    return;
  }
  if (level >= LogLevel::Warning) {
    std::clog << "gradsense: " << level_name(level) << ": " << message << '\n';
  }
}

}  // namespace gradsense
