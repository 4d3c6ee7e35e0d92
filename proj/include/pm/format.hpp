#pragma once

#include <cstdio>
#include <string>
#include <vector>

namespace pm {

/// Nine significant digits, the precision used by every emitted table.
inline std::string fmt_num(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

inline std::string fmt_vec(const std::vector<double>& v) {
  std::string out = "[";
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += ",";
    out += fmt_num(v[i]);
  }
  return out + "]";
}

}  // namespace pm
