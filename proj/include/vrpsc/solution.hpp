#pragma once

#include <string>
#include <utility>
#include <vector>

#include "vrpsc/instance.hpp"
#include "vrpsc/temporal.hpp"

namespace vrpsc {

struct Route {
  VehicleClass klass = VehicleClass::regular;
  std::vector<int> visits;  // vertex ids, including the start/end depot
  double load = 0;          // sum of customer demands (meaningful for regular)

  int customer_count() const { return static_cast<int>(visits.size()) - 2; }
  bool empty() const { return visits.size() <= 2; }
};

// Routes for both fleets plus the start-time schedule of the served customers.
// Cost is cached and maintained incrementally by insert/remove.
class Solution {
 public:
  Solution() = default;
  static Solution empty_of(const Instance& instance);

  const std::vector<Route>& routes(VehicleClass k) const {
    return k == VehicleClass::regular ? regular_ : special_;
  }
  int route_count(VehicleClass k) const { return static_cast<int>(routes(k).size()); }
  const Route& route(VehicleClass k, int i) const { return routes(k)[i]; }

  double cost() const { return cost_; }
  double recompute_cost(const Instance& instance);  // full recomputation, returns it

  bool served(int vertex) const { return pos_of_[vertex] >= 0; }
  int route_of(int vertex) const { return route_of_[vertex]; }  // within its class
  int position_of(int vertex) const { return pos_of_[vertex]; }
  int served_customers() const { return served_count_; }
  bool complete(const Instance& instance) const {
    return served_count_ == static_cast<int>(instance.regular_side().size() +
                                             instance.special_side().size());
  }

  // Insert vertex so that it lands at position pos (1 <= pos < visits.size()),
  // i.e. between visits[pos-1] and the old visits[pos]. Updates load and cost.
  void insert(const Instance& instance, VehicleClass k, int route, int pos, int vertex);
  // Remove a served customer vertex; returns (class, route, old position).
  std::pair<VehicleClass, int> remove(const Instance& instance, int vertex);

  double tau(int vertex) const { return tau_[vertex]; }
  void set_tau(int vertex, double t) { tau_[vertex] = t; }
  const std::vector<double>& schedule() const { return tau_; }

  std::string to_text(const Instance& instance) const;
  static Solution from_text(const Instance& instance, const std::string& text);

  // Extra metadata carried into the solution file.
  std::string note;

 private:
  std::vector<Route> regular_, special_;
  std::vector<int> route_of_, pos_of_;  // by vertex id, -1 when unserved
  std::vector<double> tau_;             // by vertex id, NaN when unset
  double cost_ = 0;
  int served_count_ = 0;

  Route& route_mut(VehicleClass k, int i) {
    return k == VehicleClass::regular ? regular_[i] : special_[i];
  }
  void reindex_route(VehicleClass k, int route, int from_pos);
  friend class SolutionBuilder;
};

// Temporal problem of a (possibly partial) solution plus the bookkeeping to
// map arcs back to route positions. Arc k of route r runs visits[k]->visits[k+1].
struct SolutionTemporal {
  TemporalProblem problem;
  // arc index -> (class, route, position-of-tail)
  struct ArcRef {
    VehicleClass klass;
    int route;
    int pos;
  };
  std::vector<ArcRef> arc_ref;
  // (class, route) -> arc index of the route's first arc (arcs are contiguous
  // per route); -1 for empty bookkeeping slots
  std::vector<std::vector<int>> first_arc;  // [klass][route]

  int arc_at(VehicleClass k, int route, int pos) const {
    return first_arc[static_cast<int>(k)][route] + pos;
  }
};

SolutionTemporal build_temporal(const Instance& instance, const Solution& solution);

// Write the earliest feasible schedule into the solution (customer vertices
// only); returns false if the route system is infeasible.
bool refresh_schedule(const Instance& instance, Solution& solution);

// ---------------------------------------------------------------------------
// Validation
// ---------------------------------------------------------------------------

enum class ViolationCode {
  structure,   // malformed route shape / vertex on wrong fleet
  duplicate,   // vertex served more than once
  missing,     // customer not served
  capacity,    // regular route exceeds vehicle capacity
  window,      // start time outside a vertex's time window
  sync,        // special start outside [copy - alpha, copy + beta]
  travel,      // start time earlier than predecessor + service + travel
  cost,        // cached cost disagrees with the routes
  schedule,    // served vertex without a start time
};

struct Violation {
  ViolationCode code;
  std::string message;
};

const char* to_string(ViolationCode c);

// Exact re-check of a complete solution against the instance: structure,
// single service, capacity, windows, sync, travel consistency and the cost
// cache, using only instance data (no temporal engine involved).
std::vector<Violation> validate(const Instance& instance, const Solution& solution);

}  // namespace vrpsc
