#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "vrpsc/operators.hpp"
#include "vrpsc/solution.hpp"

namespace vrpsc {

struct SearchConfig {
  std::uint64_t seed = 1;
  int iterations = 25000;

  // Destroy size: uniform in [min, min(cap, floor(frac * requests))].
  int remove_min = 4;
  int remove_cap = 40;
  double remove_frac = 0.4;

  RemovalParams removal;          // relatedness weights and rank exponents
  std::vector<int> regret_depths = {1, 2, 3, 4};

  // Simulated annealing: start temperature is picked so that a solution
  // start_ratio worse than the initial one is accepted with probability 1/2;
  // 0 disables annealing (strict-improvement hill climbing).
  double sa_start_ratio = 0.05;
  double sa_cooling = 0.99975;

  // Adaptive weights.
  int segment = 100;
  double score_best = 33, score_better = 9, score_accepted = 13;
  double reaction = 0.1;
  double weight_floor = 1e-3;

  // Insertion-cost noise amplitude = noise_fraction * max travel time; the
  // on/off choice adapts with its own weight pair.
  double noise_fraction = 0.025;
  bool noise = true;

  int construction_retries = 50;
  bool validate_incumbents = true;
  bool keep_trace = true;
};

struct TraceRow {
  int iteration = 0;
  double current = 0, best = 0;
  int removal_op = 0, repair_op = 0;
  bool noise_used = false;
  bool accepted = false;
  bool new_best = false;
};

struct OperatorStat {
  std::string name;
  double weight = 1;
  long long uses = 0;
};

struct SearchResult {
  Solution best;
  double initial_cost = 0;
  double best_cost = 0;
  int iterations = 0;
  double runtime_seconds = 0;
  int best_updates = 0;
  int accepted_moves = 0;
  int failed_repairs = 0;
  int rollbacks = 0;
  int validator_failures = 0;
  std::vector<OperatorStat> removal_ops, repair_ops, noise_ops;
  std::vector<TraceRow> trace;
};

// Build a complete starting solution (regret-2, no noise); several shuffled
// insertion orders are tried before giving up.
Solution construct_initial(const Instance&, const SearchConfig&, Rng&);

SearchResult run_search(const Instance&, const SearchConfig&);

// Line format used for trace files: one record per iteration.
std::string trace_line(const TraceRow&);

// JSON (de)serialization of the config; unknown keys are rejected.
std::string config_to_json(const SearchConfig&);
SearchConfig config_from_json(const std::string& text);

}  // namespace vrpsc
