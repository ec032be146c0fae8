#ifndef WVA_CSV_HPP
#define WVA_CSV_HPP

#include <cstdio>
#include <initializer_list>
#include <ostream>
#include <string>

namespace wva::csv {

/// Round-trip-safe rendering (17 significant digits); identical across runs
/// and platforms with IEEE doubles.
inline std::string format(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline void write_row(std::ostream& out, std::initializer_list<double> values) {
  bool first = true;
  for (double v : values) {
    if (!first) out << ',';
    out << format(v);
    first = false;
  }
  out << '\n';
}

}  // namespace wva::csv

#endif  // WVA_CSV_HPP
