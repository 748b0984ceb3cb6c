#include "vrpsc/solution.hpp"

#include <cmath>
#include <functional>
#include <sstream>

namespace vrpsc {

Solution Solution::empty_of(const Instance& instance) {
  Solution s;
  s.route_of_.assign(instance.size(), -1);
  s.pos_of_.assign(instance.size(), -1);
  s.tau_.assign(instance.size(), std::nan(""));
  for (int r = 0; r < instance.vehicles(VehicleClass::regular); ++r) {
    Route rt;
    rt.klass = VehicleClass::regular;
    rt.visits = {instance.depot_start(VehicleClass::regular),
                 instance.depot_end(VehicleClass::regular)};
    s.regular_.push_back(std::move(rt));
  }
  for (int r = 0; r < instance.vehicles(VehicleClass::special); ++r) {
    Route rt;
    rt.klass = VehicleClass::special;
    rt.visits = {instance.depot_start(VehicleClass::special),
                 instance.depot_end(VehicleClass::special)};
    s.special_.push_back(std::move(rt));
  }
  return s;
}

double Solution::recompute_cost(const Instance& instance) {
  double c = 0;
  for (const auto& routes : {std::cref(regular_), std::cref(special_)}) {
    for (const Route& r : routes.get()) {
      for (std::size_t i = 0; i + 1 < r.visits.size(); ++i) {
        c += instance.travel(r.klass, r.visits[i], r.visits[i + 1]);
      }
    }
  }
  cost_ = c;
  return c;
}

void Solution::reindex_route(VehicleClass k, int route, int from_pos) {
  Route& r = route_mut(k, route);
  for (std::size_t p = static_cast<std::size_t>(from_pos); p + 1 < r.visits.size(); ++p) {
    const int v = r.visits[p];
    route_of_[v] = route;
    pos_of_[v] = static_cast<int>(p);
  }
}

void Solution::insert(const Instance& instance, VehicleClass k, int route, int pos,
                      int vertex) {
  Route& r = route_mut(k, route);
  r.visits.insert(r.visits.begin() + pos, vertex);
  r.load += instance.vertex(vertex).demand;
  const int prev = r.visits[pos - 1], next = r.visits[pos + 1];
  cost_ += instance.travel(k, prev, vertex) + instance.travel(k, vertex, next) -
           instance.travel(k, prev, next);
  ++served_count_;
  reindex_route(k, route, pos);
}

std::pair<VehicleClass, int> Solution::remove(const Instance& instance, int vertex) {
  const VehicleClass k = instance.on_regular_side(vertex) ? VehicleClass::regular
                                                          : VehicleClass::special;
  const int route = route_of_[vertex];
  const int pos = pos_of_[vertex];
  Route& r = route_mut(k, route);
  const int prev = r.visits[pos - 1], next = r.visits[pos + 1];
  cost_ += instance.travel(k, prev, next) - instance.travel(k, prev, vertex) -
           instance.travel(k, vertex, next);
  r.load -= instance.vertex(vertex).demand;
  r.visits.erase(r.visits.begin() + pos);
  route_of_[vertex] = -1;
  pos_of_[vertex] = -1;
  tau_[vertex] = std::nan("");
  --served_count_;
  reindex_route(k, route, pos);
  return {k, route};
}

SolutionTemporal build_temporal(const Instance& instance, const Solution& solution) {
  SolutionTemporal st;
  st.first_arc.assign(2, {});
  for (VehicleClass k : {VehicleClass::regular, VehicleClass::special}) {
    auto& firsts = st.first_arc[static_cast<int>(k)];
    for (int ri = 0; ri < solution.route_count(k); ++ri) {
      const Route& r = solution.route(k, ri);
      firsts.push_back(st.problem.arc_count());
      int prev_node = -1;
      for (std::size_t p = 0; p < r.visits.size(); ++p) {
        const int v = r.visits[p];
        const Vertex& vx = instance.vertex(v);
        const int node = st.problem.add_node(v, vx.window_open, vx.window_close);
        if (prev_node >= 0) {
          st.problem.add_arc(prev_node, node,
                             instance.leg_span(k, r.visits[p - 1], v));
          st.arc_ref.push_back({k, ri, static_cast<int>(p) - 1});
        }
        prev_node = node;
      }
    }
  }
  for (int sv : instance.special_customers()) {
    const int sn = st.problem.node_of_vertex(sv);
    if (sn < 0) continue;
    const int cn = st.problem.node_of_vertex(instance.vertex(sv).mirror);
    if (cn < 0) continue;  // partner not in the partial solution
    const Vertex& vx = instance.vertex(sv);
    st.problem.add_sync(sn, cn, vx.alpha, vx.beta);
  }
  return st;
}

bool refresh_schedule(const Instance& instance, Solution& solution) {
  SolutionTemporal st = build_temporal(instance, solution);
  Schedule sched = earliest_schedule(st.problem);
  if (!sched.feasible) return false;
  for (int i = 0; i < st.problem.node_count(); ++i) {
    const int v = st.problem.nodes()[i].vertex;
    if (v >= 4) solution.set_tau(v, sched.times[i]);
  }
  return true;
}

// ---------------------------------------------------------------------------
// Text format
// ---------------------------------------------------------------------------

std::string Solution::to_text(const Instance& instance) const {
  std::ostringstream os;
  os << "VRPSC-SOLUTION 1\n";
  os << "instance " << instance.name() << "\n";
  if (!note.empty()) os << "note " << note << "\n";
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", cost_);
  os << "cost " << buf << "\n";
  os << "routes " << (regular_.size() + special_.size()) << "\n";
  for (const auto& routes : {std::cref(regular_), std::cref(special_)}) {
    for (const Route& r : routes.get()) {
      os << "route " << (r.klass == VehicleClass::regular ? "regular" : "special");
      for (int v : r.visits) os << ' ' << v;
      os << "\n";
    }
  }
  for (int v = 4; v < static_cast<int>(tau_.size()); ++v) {
    if (pos_of_[v] >= 0 && !std::isnan(tau_[v])) {
      std::snprintf(buf, sizeof(buf), "%.17g", tau_[v]);
      os << "tau " << v << ' ' << buf << "\n";
    }
  }
  return os.str();
}

Solution Solution::from_text(const Instance& instance, const std::string& text) {
  std::istringstream is(text);
  std::string line;
  int lineno = 0;
  Solution s;
  s.route_of_.assign(instance.size(), -1);
  s.pos_of_.assign(instance.size(), -1);
  s.tau_.assign(instance.size(), std::nan(""));
  double declared_cost = 0;
  bool have_header = false;

  while (std::getline(is, line)) {
    ++lineno;
    std::istringstream ls(line);
    std::string key;
    if (!(ls >> key)) continue;
    if (!have_header) {
      std::string ver;
      ls >> ver;
      if (key != "VRPSC-SOLUTION" || ver != "1") {
        throw ParseError(lineno, "expected 'VRPSC-SOLUTION 1' header");
      }
      have_header = true;
      continue;
    }
    if (key == "instance" || key == "routes") {
      continue;  // informational
    } else if (key == "note") {
      std::getline(ls, s.note);
      if (!s.note.empty() && s.note[0] == ' ') s.note.erase(0, 1);
    } else if (key == "cost") {
      std::string v;
      ls >> v;
      declared_cost = parse_num(v);
    } else if (key == "route") {
      std::string klass_s;
      ls >> klass_s;
      VehicleClass k;
      if (klass_s == "regular") k = VehicleClass::regular;
      else if (klass_s == "special") k = VehicleClass::special;
      else throw ParseError(lineno, "unknown route class '" + klass_s + "'");
      Route r;
      r.klass = k;
      int v;
      while (ls >> v) {
        if (v < 0 || v >= instance.size()) throw ParseError(lineno, "vertex id out of range");
        r.visits.push_back(v);
      }
      if (r.visits.size() < 2 || r.visits.front() != instance.depot_start(k) ||
          r.visits.back() != instance.depot_end(k)) {
        throw ParseError(lineno, "route must run from its start depot to its end depot");
      }
      auto& routes = k == VehicleClass::regular ? s.regular_ : s.special_;
      const int ri = static_cast<int>(routes.size());
      for (std::size_t p = 1; p + 1 < r.visits.size(); ++p) {
        const int cv = r.visits[p];
        if (s.pos_of_[cv] >= 0) throw ParseError(lineno, "vertex served twice");
        r.load += instance.vertex(cv).demand;
        s.route_of_[cv] = ri;
        s.pos_of_[cv] = static_cast<int>(p);
        ++s.served_count_;
      }
      routes.push_back(std::move(r));
    } else if (key == "tau") {
      int v;
      std::string t;
      if (!(ls >> v >> t)) throw ParseError(lineno, "malformed tau line");
      if (v < 0 || v >= instance.size()) throw ParseError(lineno, "tau vertex out of range");
      s.tau_[v] = parse_num(t);
    } else {
      throw ParseError(lineno, "unknown key '" + key + "'");
    }
  }
  if (!have_header) throw ParseError(lineno, "empty solution file");
  s.recompute_cost(instance);
  if (std::fabs(s.cost_ - declared_cost) > 1e-6) {
    throw ParseError(lineno, "declared cost does not match routes");
  }
  s.cost_ = declared_cost;  // keep the exact serialized value
  return s;
}

// ---------------------------------------------------------------------------
// Validation
// ---------------------------------------------------------------------------

const char* to_string(ViolationCode c) {
  switch (c) {
    case ViolationCode::structure: return "structure";
    case ViolationCode::duplicate: return "duplicate";
    case ViolationCode::missing: return "missing";
    case ViolationCode::capacity: return "capacity";
    case ViolationCode::window: return "window";
    case ViolationCode::sync: return "sync";
    case ViolationCode::travel: return "travel";
    case ViolationCode::cost: return "cost";
    case ViolationCode::schedule: return "schedule";
  }
  return "?";
}

std::vector<Violation> validate(const Instance& instance, const Solution& solution) {
  std::vector<Violation> out;
  auto add = [&](ViolationCode c, const std::string& m) { out.push_back({c, m}); };
  std::vector<int> seen(instance.size(), 0);

  for (VehicleClass k : {VehicleClass::regular, VehicleClass::special}) {
    const bool regular = k == VehicleClass::regular;
    if (solution.route_count(k) > instance.vehicles(k)) {
      add(ViolationCode::structure, std::string(regular ? "regular" : "special") +
                                        " fleet uses more vehicles than available");
    }
    for (int ri = 0; ri < solution.route_count(k); ++ri) {
      const Route& r = solution.route(k, ri);
      const std::string where =
          (regular ? "regular route " : "special route ") + std::to_string(ri);
      if (r.visits.size() < 2 || r.visits.front() != instance.depot_start(k) ||
          r.visits.back() != instance.depot_end(k)) {
        add(ViolationCode::structure, where + " does not run depot to depot");
        continue;
      }
      double load = 0;
      for (std::size_t p = 1; p + 1 < r.visits.size(); ++p) {
        const int v = r.visits[p];
        const bool belongs = regular ? instance.on_regular_side(v) : instance.on_special_side(v);
        if (v < 4 || !belongs) {
          add(ViolationCode::structure,
              where + " visits vertex " + std::to_string(v) + " outside its fleet domain");
          continue;
        }
        if (seen[v]++) {
          add(ViolationCode::duplicate, "vertex " + std::to_string(v) + " served twice");
        }
        load += instance.vertex(v).demand;
      }
      if (regular && load > instance.capacity() + kValidateTol) {
        add(ViolationCode::capacity, where + " carries " + fmt_num(load) + " > capacity " +
                                         fmt_num(instance.capacity()));
      }

      // schedule checks along the chain
      double prev_tau = 0;  // start depot can begin at any time >= 0
      bool chain_ok = true;
      int prev = r.visits.front();
      for (std::size_t p = 1; p < r.visits.size(); ++p) {
        const int v = r.visits[p];
        const bool is_end = p + 1 == r.visits.size();
        double t;
        if (is_end) {
          // end depot start time is implied by the last customer
          t = prev_tau + instance.service(k, prev) + instance.travel(k, prev, v);
        } else {
          t = solution.tau(v);
          if (std::isnan(t)) {
            add(ViolationCode::schedule, "vertex " + std::to_string(v) + " has no start time");
            chain_ok = false;
            break;
          }
        }
        const double earliest = prev_tau + instance.service(k, prev) + instance.travel(k, prev, v);
        if (t < earliest - kValidateTol) {
          add(ViolationCode::travel, where + ": vertex " + std::to_string(v) + " starts at " +
                                         fmt_num(t) + " before reachable time " + fmt_num(earliest));
        }
        const Vertex& vx = instance.vertex(v);
        if (t < vx.window_open - kValidateTol || t > vx.window_close + kValidateTol) {
          add(ViolationCode::window, where + ": vertex " + std::to_string(v) + " starts at " +
                                         fmt_num(t) + " outside [" + fmt_num(vx.window_open) +
                                         ", " + fmt_num(vx.window_close) + "]");
        }
        prev = v;
        prev_tau = t;
      }
      (void)chain_ok;
    }
  }

  for (int v : instance.regular_side()) {
    if (!seen[v]) add(ViolationCode::missing, "vertex " + std::to_string(v) + " not served");
  }
  for (int v : instance.special_customers()) {
    if (!seen[v]) {
      add(ViolationCode::missing, "vertex " + std::to_string(v) + " not served");
      continue;
    }
    const Vertex& vx = instance.vertex(v);
    if (!seen[vx.mirror]) continue;  // already reported missing
    const double ts = solution.tau(v), tc = solution.tau(vx.mirror);
    if (std::isnan(ts) || std::isnan(tc)) continue;  // reported above
    if (ts < tc - vx.alpha - kValidateTol || ts > tc + vx.beta + kValidateTol) {
      add(ViolationCode::sync, "special " + std::to_string(v) + " starts at " + fmt_num(ts) +
                                   " outside [" + fmt_num(tc - vx.alpha) + ", " +
                                   fmt_num(tc + vx.beta) + "] around its copy");
    }
  }

  // cost cache
  {
    double c = 0;
    for (VehicleClass k : {VehicleClass::regular, VehicleClass::special}) {
      for (int ri = 0; ri < solution.route_count(k); ++ri) {
        const Route& r = solution.route(k, ri);
        for (std::size_t i = 0; i + 1 < r.visits.size(); ++i) {
          c += instance.travel(k, r.visits[i], r.visits[i + 1]);
        }
      }
    }
    if (std::fabs(c - solution.cost()) > kValidateTol) {
      add(ViolationCode::cost,
          "cached cost " + fmt_num(solution.cost()) + " != recomputed " + fmt_num(c));
    }
  }
  return out;
}

}  // namespace vrpsc
