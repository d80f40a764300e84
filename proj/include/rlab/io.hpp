#pragma once

#include <cstdio>
#include <string>

#include "rlab/dynamics.hpp"

namespace rlab {

/// Shortest-safe text for a double: 17 significant digits.
inline std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

/// CSV with header t,q1..qn,p1..pn,energy and one row per sample.
inline std::string trajectory_csv(const Trajectory& tr) {
  std::string out = "t";
  const auto n = tr.size() ? tr.q.front().size() : 0;
  for (Eigen::Index k = 0; k < n; ++k) out += ",q" + std::to_string(k + 1);
  for (Eigen::Index k = 0; k < n; ++k) out += ",p" + std::to_string(k + 1);
  out += ",energy\n";
  for (std::size_t i = 0; i < tr.size(); ++i) {
    out += format_double(tr.times[i]);
    for (Eigen::Index k = 0; k < n; ++k) out += "," + format_double(tr.q[i](k));
    for (Eigen::Index k = 0; k < n; ++k) out += "," + format_double(tr.p[i](k));
    out += "," + format_double(tr.energy[i]) + "\n";
  }
  return out;
}

}  // namespace rlab
