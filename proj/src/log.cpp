/**
 * @file log.cpp
 */

#include "dhogm/log.hpp"

#include <unistd.h>

#include <atomic>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <mutex>

namespace dhogm::log {

namespace {

std::atomic<Level> g_level{Level::Info};
std::mutex g_mutex;

bool use_color() {
  static const bool color =
      std::getenv("MRIQC_DHOGM_NO_COLOR") == nullptr && ::isatty(STDERR_FILENO) == 1;
  return color;
}

const char *tag(Level l) {
  switch (l) {
  case Level::Debug: return "debug";
  case Level::Info: return "info";
  case Level::Warn: return "warn";
  case Level::Error: return "error";
  }
  return "?";
}

const char *color(Level l) {
  switch (l) {
  case Level::Debug: return "\x1b[2m";
  case Level::Info: return "\x1b[36m";
  case Level::Warn: return "\x1b[33m";
  case Level::Error: return "\x1b[31m";
  }
  return "";
}

} // namespace

void set_level(Level l) { g_level = l; }
Level level() { return g_level; }

void write(Level l, std::string_view message) {
  if (l < g_level.load()) {
    return;
  }
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  localtime_r(&now, &tm);
  char stamp[32];
  std::strftime(stamp, sizeof stamp, "%Y-%m-%d %H:%M:%S", &tm);

  std::lock_guard lock(g_mutex);
  if (use_color()) {
    std::fprintf(stderr, "%s %s%-5s\x1b[0m %.*s\n", stamp, color(l), tag(l),
                 static_cast<int>(message.size()), message.data());
  } else {
    std::fprintf(stderr, "%s %-5s %.*s\n", stamp, tag(l), static_cast<int>(message.size()),
                 message.data());
  }
}

} // namespace dhogm::log
