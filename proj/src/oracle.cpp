#include "vrpsc/oracle.hpp"

#include <algorithm>
#include <stdexcept>

#include "vrpsc/temporal.hpp"

namespace vrpsc {

namespace {

// Depth-first enumeration of all sequenced route assignments. Items are
// processed in ascending id order and either inserted at every position of
// every started route or open the next route. Because opening items arrive in
// ascending order, route minima are automatically increasing, so no two
// vehicle-permuted copies of the same route multiset are visited twice.
struct Enumerator {
  const Instance& ins;
  const double cap;
  std::vector<int> reg_items, spec_items;
  std::vector<std::vector<int>> reg_routes, spec_routes;  // customer sequences
  std::vector<double> reg_loads;
  double cost = 0;
  double best = kInf;
  std::vector<std::vector<int>> best_reg, best_spec;

  explicit Enumerator(const Instance& i) : ins(i), cap(i.capacity()) {}

  double leg(VehicleClass k, int a, int b) const { return ins.travel(k, a, b); }

  double insert_delta(VehicleClass k, const std::vector<int>& seq, std::size_t pos,
                      int v) const {
    const int ds = ins.depot_start(k), de = ins.depot_end(k);
    const int prev = pos == 0 ? ds : seq[pos - 1];
    const int next = pos == seq.size() ? de : seq[pos];
    return leg(k, prev, v) + leg(k, v, next) - leg(k, prev, next);
  }

  // Window feasibility of one regular chain alone (sync constraints are
  // checked later; they only tighten, so this prune is safe).
  bool chain_ok(const std::vector<int>& seq) const {
    double t = 0;
    int prev = ins.depot_start(VehicleClass::regular);
    for (int v : seq) {
      t += ins.service(VehicleClass::regular, prev) + leg(VehicleClass::regular, prev, v);
      const Vertex& vx = ins.vertex(v);
      if (t > vx.window_close + kFeasTol) return false;
      t = std::max(t, vx.window_open);
      prev = v;
    }
    const int de = ins.depot_end(VehicleClass::regular);
    t += ins.service(VehicleClass::regular, prev) + leg(VehicleClass::regular, prev, de);
    return t <= ins.vertex(de).window_close + kFeasTol;
  }

  bool stn_ok() const {
    TemporalProblem p;
    for (VehicleClass k : {VehicleClass::regular, VehicleClass::special}) {
      const auto& routes = k == VehicleClass::regular ? reg_routes : spec_routes;
      for (const auto& seq : routes) {
        const int ds = ins.depot_start(k), de = ins.depot_end(k);
        int prev_vertex = ds;
        int prev_node = p.add_node(ds, ins.vertex(ds).window_open, ins.vertex(ds).window_close);
        for (int v : seq) {
          const int node = p.add_node(v, ins.vertex(v).window_open, ins.vertex(v).window_close);
          p.add_arc(prev_node, node, ins.leg_span(k, prev_vertex, v));
          prev_vertex = v;
          prev_node = node;
        }
        const int node = p.add_node(de, ins.vertex(de).window_open, ins.vertex(de).window_close);
        p.add_arc(prev_node, node, ins.leg_span(k, prev_vertex, de));
      }
    }
    for (int sv : ins.special_customers()) {
      const int sn = p.node_of_vertex(sv);
      if (sn < 0) continue;
      const int cn = p.node_of_vertex(ins.vertex(sv).mirror);
      if (cn < 0) continue;
      p.add_sync(sn, cn, ins.vertex(sv).alpha, ins.vertex(sv).beta);
    }
    return earliest_schedule(p).feasible;
  }

  void rec_regular(std::size_t idx) {
    if (idx == reg_items.size()) {
      rec_special(0);
      return;
    }
    const int v = reg_items[idx];
    const double q = ins.vertex(v).demand;
    // reg_routes may grow during recursion; index it fresh on every access.
    for (std::size_t r = 0; r < reg_routes.size(); ++r) {
      if (reg_loads[r] + q > cap + kFeasTol) continue;
      for (std::size_t pos = 0; pos <= reg_routes[r].size(); ++pos) {
        const double delta = insert_delta(VehicleClass::regular, reg_routes[r], pos, v);
        if (cost + delta >= best) continue;
        reg_routes[r].insert(reg_routes[r].begin() + static_cast<long>(pos), v);
        if (chain_ok(reg_routes[r])) {
          cost += delta;
          reg_loads[r] += q;
          rec_regular(idx + 1);
          reg_loads[r] -= q;
          cost -= delta;
        }
        reg_routes[r].erase(reg_routes[r].begin() + static_cast<long>(pos));
      }
    }
    if (static_cast<int>(reg_routes.size()) < ins.vehicles(VehicleClass::regular)) {
      const double delta = insert_delta(VehicleClass::regular, {}, 0, v);
      if (cost + delta < best) {
        reg_routes.push_back({v});
        reg_loads.push_back(q);
        if (chain_ok(reg_routes.back())) {
          cost += delta;
          rec_regular(idx + 1);
          cost -= delta;
        }
        reg_routes.pop_back();
        reg_loads.pop_back();
      }
    }
  }

  void rec_special(std::size_t idx) {
    if (idx == spec_items.size()) {
      if (cost < best) {
        best = cost;
        best_reg = reg_routes;
        best_spec = spec_routes;
      }
      return;
    }
    const int v = spec_items[idx];
    for (std::size_t r = 0; r < spec_routes.size(); ++r) {
      for (std::size_t pos = 0; pos <= spec_routes[r].size(); ++pos) {
        const double delta = insert_delta(VehicleClass::special, spec_routes[r], pos, v);
        if (cost + delta >= best) continue;
        spec_routes[r].insert(spec_routes[r].begin() + static_cast<long>(pos), v);
        cost += delta;
        if (stn_ok()) rec_special(idx + 1);
        cost -= delta;
        spec_routes[r].erase(spec_routes[r].begin() + static_cast<long>(pos));
      }
    }
    if (static_cast<int>(spec_routes.size()) < ins.vehicles(VehicleClass::special)) {
      const double delta = insert_delta(VehicleClass::special, {}, 0, v);
      if (cost + delta < best) {
        spec_routes.push_back({v});
        cost += delta;
        if (stn_ok()) rec_special(idx + 1);
        cost -= delta;
        spec_routes.pop_back();
      }
    }
  }
};

}  // namespace

std::optional<Solution> solve_exact(const Instance& ins, const OracleLimits& limits) {
  if (ins.request_count() > limits.max_customers) {
    throw std::invalid_argument("instance exceeds oracle limit of " +
                                std::to_string(limits.max_customers) + " requests");
  }
  if (static_cast<int>(ins.special_customers().size()) > limits.max_special) {
    throw std::invalid_argument("instance exceeds oracle limit of " +
                                std::to_string(limits.max_special) + " special customers");
  }
  if (ins.vehicles(VehicleClass::regular) > limits.max_vehicles ||
      ins.vehicles(VehicleClass::special) > limits.max_vehicles) {
    throw std::invalid_argument("instance exceeds oracle limit of " +
                                std::to_string(limits.max_vehicles) + " vehicles per class");
  }

  Enumerator en(ins);
  en.reg_items.assign(ins.regular_side().begin(), ins.regular_side().end());
  en.spec_items.assign(ins.special_customers().begin(), ins.special_customers().end());
  std::sort(en.reg_items.begin(), en.reg_items.end());
  std::sort(en.spec_items.begin(), en.spec_items.end());
  en.rec_regular(0);
  if (is_inf(en.best)) return std::nullopt;

  Solution sol = Solution::empty_of(ins);
  for (std::size_t r = 0; r < en.best_reg.size(); ++r) {
    int pos = 1;
    for (int v : en.best_reg[r]) {
      sol.insert(ins, VehicleClass::regular, static_cast<int>(r), pos++, v);
    }
  }
  for (std::size_t r = 0; r < en.best_spec.size(); ++r) {
    int pos = 1;
    for (int v : en.best_spec[r]) {
      sol.insert(ins, VehicleClass::special, static_cast<int>(r), pos++, v);
    }
  }
  refresh_schedule(ins, sol);
  return sol;
}

}  // namespace vrpsc
