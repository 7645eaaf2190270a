#pragma once

#include <charconv>
#include <string>

namespace rocpost {

// Shortest decimal form that parses back to the identical double.
inline std::string fmt_g17(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

}  // namespace rocpost
