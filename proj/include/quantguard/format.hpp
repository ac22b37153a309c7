#pragma once

#include <charconv>
#include <string>
#include <system_error>

namespace quantguard {

/// Shortest decimal form that round-trips the exact double value.
inline std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

}  // namespace quantguard
