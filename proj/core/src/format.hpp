#pragma once

#include <charconv>
#include <cmath>
#include <string>

namespace sublln::detail {

// Shortest round-trip text for a double; locale independent.
inline std::string fmt(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

}  // namespace sublln::detail
