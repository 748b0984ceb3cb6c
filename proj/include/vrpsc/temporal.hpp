#pragma once

#include <optional>
#include <string>
#include <vector>

#include "vrpsc/instance.hpp"

namespace vrpsc {

// A scheduling problem over route chains: one node per visit, with start-time
// bounds, chain arcs (head starts no earlier than tail start + tail service +
// travel) and synchronization pairs (special start within [copy - alpha,
// copy + beta]). Depot visits of different routes are distinct nodes even
// though they share a vertex id.
struct TemporalNode {
  int vertex = -1;  // instance vertex id, for mapping back
  double lo = 0;
  double hi = kInf;
};

struct TemporalArc {
  int tail = -1, head = -1;  // node indices
  double span = 0;           // service(tail) + travel(tail, head)
};

struct SyncPair {
  int special_node = -1, copy_node = -1;
  double alpha = 0, beta = 0;
};

class TemporalProblem {
 public:
  int add_node(int vertex, double lo, double hi);
  int add_arc(int tail, int head, double span);
  void add_sync(int special_node, int copy_node, double alpha, double beta);

  const std::vector<TemporalNode>& nodes() const { return nodes_; }
  const std::vector<TemporalArc>& arcs() const { return arcs_; }
  const std::vector<SyncPair>& syncs() const { return syncs_; }
  int node_count() const { return static_cast<int>(nodes_.size()); }
  int arc_count() const { return static_cast<int>(arcs_.size()); }

  // First node carrying the given vertex id, -1 if absent. Unique for
  // customer vertices; depot vertices appear once per route.
  int node_of_vertex(int vertex) const;

 private:
  std::vector<TemporalNode> nodes_;
  std::vector<TemporalArc> arcs_;
  std::vector<SyncPair> syncs_;
  std::vector<int> vertex_to_node_;
};

// Componentwise-least feasible schedule (every node as early as its bounds,
// chains and sync links allow). feasible == false when no schedule exists.
struct Schedule {
  bool feasible = false;
  std::vector<double> times;  // by node index; meaningful only when feasible
};

Schedule earliest_schedule(const TemporalProblem& problem);

// Per-arc maximum delay table: delta[a] is the largest slack that can be added
// on arc a alone while the rest of the system stays feasible (kInf when the
// arc can absorb any delay, e.g. in front of the unconstrained special end
// depot). et/lt are the earliest/latest feasible start times per node.
struct ArcDelayTable {
  bool feasible = false;
  std::vector<double> delta;  // by arc index
  std::vector<double> et, lt;  // by node index

  double et_tail(const TemporalProblem& p, int arc) const { return et[p.arcs()[arc].tail]; }
  double lt_head(const TemporalProblem& p, int arc) const { return lt[p.arcs()[arc].head]; }
};

ArcDelayTable max_delays_all(const TemporalProblem& problem);

// Same value as max_delays_all().delta[arc], computed by a direct single-pair
// search; nullopt when the base system is infeasible.
std::optional<double> max_delay_single(const TemporalProblem& problem, int arc);

// Would inserting special customer `special_vertex` into regular arc
// `arc_regular` (its copy) and special arc `arc_special` (itself) leave the
// system feasible? Exact check of the augmented system in which the two arcs
// are each replaced by the corresponding pair of new arcs.
bool check_special_insertion(const TemporalProblem& problem, const Instance& instance,
                             int special_vertex, int arc_regular, int arc_special);

// The base system in LP text form, for debugging and external solvers.
std::string dump_lp(const TemporalProblem& problem);

}  // namespace vrpsc
