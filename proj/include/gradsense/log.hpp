#pragma once

#include <functional>
#include <string_view>

namespace gradsense {

enum class LogLevel { Debug, Info, Warning, Error };

using LogSink = std::function<void(LogLevel, std::string_view)>;

// Replaces the process-wide sink (default writes warnings and errors to stderr).
// Passing an empty function restores the default.
void set_log_sink(LogSink sink);

void log(LogLevel level, std::string_view message);

inline void log_warning(std::string_view message) { log(LogLevel::Warning, message); }
inline void log_info(std::string_view message) { log(LogLevel::Info, message); }

}  // namespace gradsense
