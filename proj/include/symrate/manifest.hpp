#pragma once

#include <cstdint>
#include <cstdio>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace symrate {

inline constexpr std::string_view kVersion = "0.1.0";

/// 64-bit FNV-1a.
inline std::uint64_t fnv1a(std::span<const unsigned char> bytes, std::uint64_t h = 0xcbf29ce484222325ULL) {
  for (unsigned char b : bytes) {
    h ^= b;
    h *= 0x100000001b3ULL;
  }
  return h;
}

inline std::uint64_t fnv1a(std::string_view s, std::uint64_t h = 0xcbf29ce484222325ULL) {
  return fnv1a(std::span(reinterpret_cast<const unsigned char*>(s.data()), s.size()), h);
}

inline std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

/// Everything that determines a run's output, in insertion order.
struct RunManifest {
  std::string subcommand;
  std::vector<std::pair<std::string, std::string>> values;

  RunManifest& set(std::string key, std::string value) {
    values.emplace_back(std::move(key), std::move(value));
    return *this;
  }

  std::string serialize() const {
    std::string out = "symrate " + std::string(kVersion) + " " + subcommand;
    for (const auto& [k, v] : values) out += " " + k + "=" + v;
    return out;
  }

  std::string digest() const { return hex64(fnv1a(serialize())); }
};

}  // namespace symrate
