#pragma once

// Output directory layout: manifest.json, report.json, *.csv, events.jsonl.
// Wall-clock data lives only under the top-level "timestamp" key so that
// reruns of the same manifest give identical files once that key is removed.

#include <chrono>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <string>

#include "json.hpp"
#include "wedgecp/errors.hpp"

namespace wedgecp::io {

inline constexpr const char* kVersion = "0.1.0";

inline std::string utc_now() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

inline void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InvalidArgument("cannot write " + path.string());
  out << text;
}

inline void write_json(const std::filesystem::path& path, const nlohmann::ordered_json& j) {
  write_text(path, j.dump(2) + "\n");
}

inline nlohmann::json read_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument("cannot read " + path.string());
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw InvalidArgument(path.string() + ": " + e.what());
  }
}

inline nlohmann::ordered_json timestamp(double runtime_seconds) {
  return {{"finished_utc", utc_now()}, {"runtime_seconds", runtime_seconds}};
}

// Copy of a report without its wall-clock data.
inline nlohmann::ordered_json without_timestamp(nlohmann::ordered_json j) {
  j.erase("timestamp");
  return j;
}

inline std::filesystem::path prepare_dir(const std::string& dir) {
  std::filesystem::path p(dir);
  std::filesystem::create_directories(p);
  return p;
}

}  // namespace wedgecp::io
