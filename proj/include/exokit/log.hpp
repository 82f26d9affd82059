#pragma once

#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <string>
#include <string_view>

namespace exokit {

enum class LogLevel : int { kError = 0, kWarn = 1, kInfo = 2, kDebug = 3 };

/// Diagnostic threshold, read once from EXOKIT_LOG ({error|warn|info|debug}).
/// Defaults to warn. Messages go to stderr so data pipelines on stdout stay clean.
inline LogLevel log_threshold() {
  static const LogLevel level = [] {
    const char* env = std::getenv("EXOKIT_LOG");
    if (env == nullptr) return LogLevel::kWarn;
    if (std::strcmp(env, "error") == 0) return LogLevel::kError;
    if (std::strcmp(env, "warn") == 0) return LogLevel::kWarn;
    if (std::strcmp(env, "info") == 0) return LogLevel::kInfo;
    if (std::strcmp(env, "debug") == 0) return LogLevel::kDebug;
    std::fprintf(stderr, "[exokit] unknown EXOKIT_LOG value '%s', using warn\n", env);
    return LogLevel::kWarn;
  }();
  return level;
}

inline void log_at(LogLevel level, std::string_view msg) {
  if (static_cast<int>(level) > static_cast<int>(log_threshold())) return;
  static constexpr const char* kNames[] = {"error", "warn", "info", "debug"};
  std::fprintf(stderr, "[exokit %s] %.*s\n", kNames[static_cast<int>(level)],
               static_cast<int>(msg.size()), msg.data());
}

inline void log_error(std::string_view msg) { log_at(LogLevel::kError, msg); }
inline void log_warn(std::string_view msg) { log_at(LogLevel::kWarn, msg); }
inline void log_info(std::string_view msg) { log_at(LogLevel::kInfo, msg); }
inline void log_debug(std::string_view msg) { log_at(LogLevel::kDebug, msg); }

}  // namespace exokit
