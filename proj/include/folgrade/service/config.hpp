#pragma once

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <stdexcept>
#include <string>

#include "folgrade/codec.hpp"

namespace folgrade::service {

struct Config {
  std::string listen = "127.0.0.1";
  int port = 8080;
  std::filesystem::path tokenFile = "tokens.json";
  std::filesystem::path storePath = "folgrade.db";
  /// Directory of exercise documents loaded at start-up when absent from the
  /// store. Empty disables seeding.
  std::filesystem::path seedDirectory;
  std::chrono::milliseconds defaultTimeLimit = kDefaultTimeLimit;
  std::size_t maxConcurrentGrades = 4;
  /// Plain Correct/Incorrect feedback, without countermodels.
  bool binaryFeedback = false;
};

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

namespace detail {

inline const char* env(const char* name) {
  const char* v = std::getenv(name);
  return v && *v ? v : nullptr;
}

inline long long parseInteger(const std::string& text, const char* what) {
  std::size_t used = 0;
  long long v = 0;
  try {
    v = std::stoll(text, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != text.size()) throw ConfigError(std::string(what) + " must be an integer: " + text);
  return v;
}

}  // namespace detail

/// Applies FOLGRADE_LISTEN, FOLGRADE_PORT, FOLGRADE_TOKENS, FOLGRADE_STORE,
/// FOLGRADE_SEED and FOLGRADE_TIME_LIMIT_MS.
inline void applyEnvironment(Config& c) {
  if (auto v = detail::env("FOLGRADE_LISTEN")) c.listen = v;
  if (auto v = detail::env("FOLGRADE_PORT")) c.port = static_cast<int>(detail::parseInteger(v, "FOLGRADE_PORT"));
  if (auto v = detail::env("FOLGRADE_TOKENS")) c.tokenFile = v;
  if (auto v = detail::env("FOLGRADE_STORE")) c.storePath = v;
  if (auto v = detail::env("FOLGRADE_SEED")) c.seedDirectory = v;
  if (auto v = detail::env("FOLGRADE_TIME_LIMIT_MS")) {
    c.defaultTimeLimit = std::chrono::milliseconds(detail::parseInteger(v, "FOLGRADE_TIME_LIMIT_MS"));
  }
}

inline void validate(const Config& c) {
  if (c.port < 0 || c.port > 65535) throw ConfigError("port out of range: " + std::to_string(c.port));
  if (c.defaultTimeLimit <= std::chrono::milliseconds::zero() || c.defaultTimeLimit > kMaxTimeLimit) {
    throw ConfigError("default time limit must be between 1 and " + std::to_string(kMaxTimeLimit.count()) + " ms");
  }
  if (c.maxConcurrentGrades == 0) throw ConfigError("maxConcurrentGrades must be positive");
}

/// Reads a JSON config file (relative paths resolve against its directory),
/// then applies environment overrides. An empty path means defaults only.
inline Config loadConfig(const std::filesystem::path& path) {
  Config c;
  if (!path.empty()) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read config file " + path.string());
    Json j;
    try {
      j = Json::parse(in);
    } catch (const Json::parse_error& e) {
      throw ConfigError("config file " + path.string() + " is not valid JSON: " + e.what());
    }
    const std::filesystem::path base = path.parent_path();
    auto resolve = [&](const std::string& p) {
      const std::filesystem::path candidate(p);
      return candidate.is_absolute() ? candidate : base / candidate;
    };
    try {
      if (j.contains("listen")) c.listen = j["listen"].get<std::string>();
      if (j.contains("port")) c.port = j["port"].get<int>();
      if (j.contains("tokens")) c.tokenFile = resolve(j["tokens"].get<std::string>());
      if (j.contains("store")) c.storePath = resolve(j["store"].get<std::string>());
      if (j.contains("seed")) c.seedDirectory = resolve(j["seed"].get<std::string>());
      if (j.contains("defaultTimeLimitMs")) c.defaultTimeLimit = std::chrono::milliseconds(j["defaultTimeLimitMs"].get<long long>());
      if (j.contains("maxConcurrentGrades")) c.maxConcurrentGrades = j["maxConcurrentGrades"].get<std::size_t>();
      if (j.contains("binaryFeedback")) c.binaryFeedback = j["binaryFeedback"].get<bool>();
    } catch (const Json::exception& e) {
      throw ConfigError("config file " + path.string() + ": " + e.what());
    }
  }
  applyEnvironment(c);
  validate(c);
  return c;
}

}  // namespace folgrade::service
