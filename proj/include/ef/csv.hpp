#pragma once

#include <cstdio>
#include <ostream>
#include <string>
#include <vector>

namespace ef {

/// Doubles are serialized with %.17g: enough digits to round-trip any IEEE
/// double, so CSV outputs are byte-stable across runs.
inline std::string csv_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

inline void csv_row(std::ostream& out, const std::vector<std::string>& cells) {
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i) out << ',';
    out << cells[i];
  }
  out << '\n';
}

}  // namespace ef
