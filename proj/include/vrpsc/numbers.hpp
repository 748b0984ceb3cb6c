#pragma once

#include <cmath>
#include <cstdio>
#include <limits>
#include <string>

namespace vrpsc {

// Tolerances used across the library. Temporal feasibility verdicts use kFeasTol;
// the solution validator is stricter (kValidateTol) because it checks exact
// arithmetic identities, not propagated bounds.
inline constexpr double kFeasTol = 1e-6;
inline constexpr double kValidateTol = 1e-9;
inline constexpr double kInf = std::numeric_limits<double>::infinity();

inline bool is_inf(double v) { return std::isinf(v); }

// Shortest exact decimal form: integers print without a fractional part,
// everything else round-trips through %.17g.
inline std::string fmt_num(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (v == std::floor(v) && std::fabs(v) < 1e15) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%lld", static_cast<long long>(v));
    return buf;
  }
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

inline double parse_num(const std::string& s) {
  if (s == "inf") return kInf;
  if (s == "-inf") return -kInf;
  return std::stod(s);
}

}  // namespace vrpsc
