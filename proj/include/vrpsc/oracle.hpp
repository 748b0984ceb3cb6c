#pragma once

#include <optional>

#include "vrpsc/solution.hpp"

namespace vrpsc {

// Exhaustive search for a provably optimal solution of a tiny instance.
// Intended for validating the heuristic; refuses instances over the limits
// (std::invalid_argument) rather than attempting them. Returns nullopt when
// the instance has no feasible solution.
struct OracleLimits {
  int max_customers = 7;  // requests in total (special pair counts once)
  int max_special = 3;
  int max_vehicles = 3;  // per class
};

std::optional<Solution> solve_exact(const Instance&, const OracleLimits& limits = {});

}  // namespace vrpsc
