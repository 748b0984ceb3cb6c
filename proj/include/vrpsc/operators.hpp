#pragma once

#include <vector>

#include "vrpsc/rng.hpp"
#include "vrpsc/solution.hpp"

namespace vrpsc {

// Requests are identified by one representative vertex: the customer itself
// for regular requests, the special customer (copy implied) for special ones.

struct RemovalParams {
  double lambda_time = 4, lambda_dist = 2, lambda_demand = 1, lambda_type = 4;
  double p_related = 6;
  double p_worst = 3;
};

// Each removes exactly `count` requests (a special pair counts as one) and
// returns the removed representatives in removal order. Stored start times of
// the remaining customers are left as they were; they are refreshed when a
// repair completes.
std::vector<int> remove_random(const Instance&, Solution&, int count, Rng&);
std::vector<int> remove_related(const Instance&, Solution&, int count,
                                const RemovalParams&, Rng&);
std::vector<int> remove_worst(const Instance&, Solution&, int count,
                              const RemovalParams&, Rng&);

// Relatedness of two requests: weighted mix of start-time distance, spatial
// distance, demand difference and fleet-type difference, each normalized.
// Lower = more related.
double relatedness(const Instance&, const Solution&, const RemovalParams&, int a, int b);

struct RepairParams {
  int k = 2;          // regret depth; k = 1 is cheapest insertion
  double noise = 0;   // amplitude of the additive cost perturbation, 0 = none
};

struct RepairResult {
  bool complete = false;
  std::vector<int> unplaced;  // requests left out when no feasible slot exists
  int rollbacks = 0;  // insertions undone because the rebuilt system refused them
};

// Regret-k insertion of the banked requests into the partial solution. On
// success the solution is complete and carries a fresh earliest schedule; on
// failure the solution keeps the insertions made so far and the bank remainder
// is reported (callers discard the attempt).
RepairResult regret_insert(const Instance&, Solution&, const std::vector<int>& bank,
                           const RepairParams&, Rng&);

// ---------------------------------------------------------------------------
// Insertion primitives, exposed for tests and the exact-check comparison.
// ---------------------------------------------------------------------------

// Detour cost of placing `vertex` between `prev` and `next` under class k.
double insertion_delta(const Instance&, VehicleClass k, int prev, int vertex, int next);

// Feasibility of inserting a regular-side vertex into arc `arc` given the
// current delay table: arrival within the deadline and the induced shift
// (detour + window wait + service) within the arc's absorbable delay.
bool regular_insertion_feasible(const Instance&, const SolutionTemporal&,
                                const ArcDelayTable&, int vertex, int arc);

// Conservative screen for inserting a special pair (copy into regular arc a1,
// special into special arc a2). Never rejects a pair the exact augmented-system
// check would accept; survivors still need check_special_insertion.
bool special_insertion_precheck(const Instance&, const SolutionTemporal&,
                                const ArcDelayTable&, int special_vertex, int arc_regular,
                                int arc_special, double route_load);

}  // namespace vrpsc
