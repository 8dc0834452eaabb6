#pragma once

#include <charconv>
#include <string>
#include <system_error>

namespace geophase {

// Shortest round-trip decimal form; identical input gives identical text.
inline std::string csv_number(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return res.ec == std::errc{} ? std::string(buf, res.ptr) : std::string("nan");
}

}  // namespace geophase
