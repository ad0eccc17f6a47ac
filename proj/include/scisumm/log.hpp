#pragma once

#include <functional>
#include <iostream>
#include <mutex>
#include <string_view>

namespace scisumm::log {

using Sink = std::function<void(std::string_view level, std::string_view message)>;

inline Sink& sink() {
  static Sink s = [](std::string_view level, std::string_view message) {
    std::cerr << "[" << level << "] " << message << '\n';
  };
  return s;
}

inline std::mutex& sink_mutex() {
  static std::mutex m;
  return m;
}

/// Replaces the process-wide sink; returns the previous one.
inline Sink set_sink(Sink s) {
  std::lock_guard lock(sink_mutex());
  Sink old = std::move(sink());
  sink() = std::move(s);
  return old;
}

inline void emit(std::string_view level, std::string_view message) {
  std::lock_guard lock(sink_mutex());
  if (sink()) sink()(level, message);
}

inline void info(std::string_view message) { emit("info", message); }
inline void warn(std::string_view message) { emit("warn", message); }

}  // namespace scisumm::log
