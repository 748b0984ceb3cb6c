#include "vrpsc/operators.hpp"

#include <algorithm>
#include <array>
#include <cassert>
#include <cmath>

namespace vrpsc {

namespace {

bool is_special_rep(const Instance& ins, int rep) {
  return ins.vertex(rep).kind == VertexKind::special_customer;
}

// Served request representatives, id ascending.
std::vector<int> served_requests(const Instance& ins, const Solution& sol) {
  std::vector<int> out;
  for (int v : ins.regular_customers()) {
    if (sol.served(v)) out.push_back(v);
  }
  for (int v : ins.special_customers()) {
    if (sol.served(v)) out.push_back(v);
  }
  std::sort(out.begin(), out.end());
  return out;
}

void remove_request(const Instance& ins, Solution& sol, int rep) {
  if (is_special_rep(ins, rep)) {
    sol.remove(ins, rep);
    sol.remove(ins, ins.vertex(rep).mirror);
  } else {
    sol.remove(ins, rep);
  }
}

double detour_of(const Instance& ins, const Solution& sol, VehicleClass k, int vertex) {
  const auto& r = sol.routes(k)[sol.route_of(vertex)];
  const int pos = sol.position_of(vertex);
  const int prev = r.visits[pos - 1], next = r.visits[pos + 1];
  return ins.travel(k, prev, vertex) + ins.travel(k, vertex, next) -
         ins.travel(k, prev, next);
}

// Cost saved by removing the request right now.
double removal_gain(const Instance& ins, const Solution& sol, int rep) {
  if (is_special_rep(ins, rep)) {
    return detour_of(ins, sol, VehicleClass::special, rep) +
           detour_of(ins, sol, VehicleClass::regular, ins.vertex(rep).mirror);
  }
  return detour_of(ins, sol, VehicleClass::regular, rep);
}

}  // namespace

namespace {

// Relatedness against a fixed start-time snapshot; removals during one destroy
// call must not change the measure mid-flight.
double relatedness_snap(const Instance& ins, const std::vector<double>& tau,
                        double max_time, const RemovalParams& p, int a, int b) {
  auto tau_of = [&](int v) {
    const double t = tau[static_cast<std::size_t>(v)];
    return std::isnan(t) ? 0.0 : t;
  };
  const Vertex& va = ins.vertex(a);
  const Vertex& vb = ins.vertex(b);
  const double d = std::hypot(va.x - vb.x, va.y - vb.y);
  double r = p.lambda_time * std::fabs(tau_of(a) - tau_of(b)) / max_time +
             p.lambda_dist * d / std::max(ins.max_travel(), 1e-12);
  if (ins.max_demand() > 0) {
    r += p.lambda_demand * std::fabs(va.demand - vb.demand) / ins.max_demand();
  }
  if (is_special_rep(ins, a) != is_special_rep(ins, b)) r += p.lambda_type;
  return r;
}

double max_served_tau(const Instance& ins, const Solution& sol) {
  double max_time = 1;
  for (int v : served_requests(ins, sol)) {
    const double t = sol.tau(v);
    if (!std::isnan(t)) max_time = std::max(max_time, t);
  }
  return max_time;
}

}  // namespace

double relatedness(const Instance& ins, const Solution& sol, const RemovalParams& p, int a,
                   int b) {
  return relatedness_snap(ins, sol.schedule(), max_served_tau(ins, sol), p, a, b);
}

std::vector<int> remove_random(const Instance& ins, Solution& sol, int count, Rng& rng) {
  std::vector<int> reps = served_requests(ins, sol);
  std::vector<int> removed;
  while (count-- > 0 && !reps.empty()) {
    const int idx = rng.uniform_int(0, static_cast<int>(reps.size()) - 1);
    const int rep = reps[idx];
    reps.erase(reps.begin() + idx);
    remove_request(ins, sol, rep);
    removed.push_back(rep);
  }
  return removed;
}

std::vector<int> remove_related(const Instance& ins, Solution& sol, int count,
                                const RemovalParams& p, Rng& rng) {
  std::vector<int> reps = served_requests(ins, sol);
  std::vector<int> removed;
  if (reps.empty() || count <= 0) return removed;
  const std::vector<double> tau_snap = sol.schedule();
  const double max_time = max_served_tau(ins, sol);

  // Seed with a uniformly chosen request, then repeatedly remove the one most
  // related to a random already-removed request, softened by the y^p rank draw.
  {
    const int idx = rng.uniform_int(0, static_cast<int>(reps.size()) - 1);
    removed.push_back(reps[idx]);
    reps.erase(reps.begin() + idx);
    remove_request(ins, sol, removed.back());
  }
  while (static_cast<int>(removed.size()) < count && !reps.empty()) {
    const int anchor = removed[static_cast<std::size_t>(
        rng.uniform_int(0, static_cast<int>(removed.size()) - 1))];
    std::vector<std::pair<double, int>> ranked;
    ranked.reserve(reps.size());
    for (int v : reps) {
      ranked.push_back({relatedness_snap(ins, tau_snap, max_time, p, anchor, v), v});
    }
    std::sort(ranked.begin(), ranked.end());
    const int idx = static_cast<int>(std::pow(rng.uniform(), p.p_related) *
                                     static_cast<double>(ranked.size()));
    const int rep = ranked[static_cast<std::size_t>(idx)].second;
    reps.erase(std::find(reps.begin(), reps.end(), rep));
    remove_request(ins, sol, rep);
    removed.push_back(rep);
  }
  return removed;
}

std::vector<int> remove_worst(const Instance& ins, Solution& sol, int count,
                              const RemovalParams& p, Rng& rng) {
  std::vector<int> removed;
  while (count-- > 0) {
    std::vector<int> reps = served_requests(ins, sol);
    if (reps.empty()) break;
    // Most expensive first; gains are recomputed after every removal because
    // neighbors change.
    std::vector<std::pair<double, int>> ranked;
    ranked.reserve(reps.size());
    for (int v : reps) ranked.push_back({-removal_gain(ins, sol, v), v});
    std::sort(ranked.begin(), ranked.end());
    const int idx = static_cast<int>(std::pow(rng.uniform(), p.p_worst) *
                                     static_cast<double>(ranked.size()));
    const int rep = ranked[static_cast<std::size_t>(idx)].second;
    remove_request(ins, sol, rep);
    removed.push_back(rep);
  }
  return removed;
}

// ---------------------------------------------------------------------------
// Insertion
// ---------------------------------------------------------------------------

double insertion_delta(const Instance& ins, VehicleClass k, int prev, int vertex, int next) {
  return ins.travel(k, prev, vertex) + ins.travel(k, vertex, next) -
         ins.travel(k, prev, next);
}

bool regular_insertion_feasible(const Instance& ins, const SolutionTemporal& st,
                                const ArcDelayTable& table, int vertex, int arc) {
  const auto& a = st.problem.arcs()[arc];
  const int vt = st.problem.nodes()[a.tail].vertex;
  const int vh = st.problem.nodes()[a.head].vertex;
  const Vertex& vx = ins.vertex(vertex);
  const double arrival = table.et[a.tail] + ins.service(VehicleClass::regular, vt) +
                         ins.travel(VehicleClass::regular, vt, vertex);
  if (arrival > vx.window_close + kFeasTol) return false;
  const double wait = std::max(0.0, vx.window_open - arrival);
  const double shift = insertion_delta(ins, VehicleClass::regular, vt, vertex, vh) + wait +
                       ins.service(VehicleClass::regular, vertex);
  return shift <= table.delta[arc] + kFeasTol;
}

bool special_insertion_precheck(const Instance& ins, const SolutionTemporal& st,
                                const ArcDelayTable& table, int special_vertex,
                                int arc_regular, int arc_special, double route_load) {
  const Vertex& sj = ins.vertex(special_vertex);
  const int copy = sj.mirror;
  const Vertex& sc = ins.vertex(copy);

  // Capacity of the hosting regular vehicle.
  if (route_load + sc.demand > ins.capacity() + kFeasTol) return false;

  const auto& a1 = st.problem.arcs()[arc_regular];
  const auto& a2 = st.problem.arcs()[arc_special];
  const int vt1 = st.problem.nodes()[a1.tail].vertex;
  const int vh1 = st.problem.nodes()[a1.head].vertex;
  const int vt2 = st.problem.nodes()[a2.tail].vertex;
  const int vh2 = st.problem.nodes()[a2.head].vertex;

  const double et1 = table.et[a1.tail], lt1 = table.lt[a1.head];
  const double et2 = table.et[a2.tail], lt2 = table.lt[a2.head];

  const double arr_c = et1 + ins.service(VehicleClass::regular, vt1) +
                       ins.travel(VehicleClass::regular, vt1, copy);
  const double arr_j = et2 + ins.service(VehicleClass::special, vt2) +
                       ins.travel(VehicleClass::special, vt2, special_vertex);

  const double lb_c = std::max(arr_c, sc.window_open);
  const double ub_c =
      std::min(lt1 - ins.service(VehicleClass::regular, copy) -
                   ins.travel(VehicleClass::regular, copy, vh1),
               sc.window_close);
  const double lb_j = arr_j;
  const double ub_j = lt2 - ins.service(VehicleClass::special, special_vertex) -
                      ins.travel(VehicleClass::special, special_vertex, vh2);

  // Each side must retain a nonempty start-time interval...
  if (lb_c > ub_c + kFeasTol || lb_j > ub_j + kFeasTol) return false;
  // ...and the two intervals must be reachable through the sync band.
  if (lb_j - ub_c > sj.beta + kFeasTol) return false;
  if (ub_j < lb_c - sj.alpha - kFeasTol) return false;

  // Wait-capacity screens. The unavoidable wait of each side (window wait or
  // waiting for the partner, whichever dominates) plus detour and service must
  // fit in the widest slack the arc's endpoints allow. Delaying the tail buys
  // nothing: every unit of delay removes a unit of both wait and slack.
  const double wide1 = lt1 - et1 - a1.span;
  const double wtw_c = std::max(0.0, sc.window_open - arr_c);
  const double wsync_c = std::max(0.0, lb_j - sj.beta - arr_c);
  const double detour1 = insertion_delta(ins, VehicleClass::regular, vt1, copy, vh1);
  if (detour1 + std::max(wtw_c, wsync_c) + ins.service(VehicleClass::regular, copy) >
      wide1 + kFeasTol) {
    return false;
  }

  const double wide2 = lt2 - et2 - a2.span;
  const double wsync_j = std::max(0.0, lb_c - sj.alpha - arr_j);
  const double detour2 =
      insertion_delta(ins, VehicleClass::special, vt2, special_vertex, vh2);
  if (detour2 + wsync_j + ins.service(VehicleClass::special, special_vertex) >
      wide2 + kFeasTol) {
    return false;
  }
  return true;
}

namespace {

struct Candidate {
  double cost = kInf;     // selection cost (noisy when noise is active)
  double true_delta = 0;  // actual objective change
  int r1 = -1, p1 = -1;   // regular route / insertion position
  int r2 = -1, p2 = -1;   // special route / insertion position (special requests)
};

struct RequestEval {
  int rep = -1;
  int feasible_routes = 0;
  double regret = 0;
  Candidate best;
};

struct Ban {
  int rep, r1, p1, r2, p2;
  bool operator==(const Ban&) const = default;
};

struct Repairer {
  const Instance& ins;
  Solution& sol;
  const RepairParams& params;
  Rng& rng;
  SolutionTemporal st;
  ArcDelayTable table;
  std::vector<Ban> bans;
  std::vector<double> route_best;  // scratch: per regular route
  int rollbacks = 0;

  Repairer(const Instance& i, Solution& s, const RepairParams& p, Rng& r)
      : ins(i), sol(s), params(p), rng(r) {}

  bool rebuild() {
    st = build_temporal(ins, sol);
    table = max_delays_all(st.problem);
    return table.feasible;
  }

  double noisy(double cost) {
    if (params.noise <= 0) return cost;
    return std::max(0.0, cost + params.noise * rng.uniform(-1.0, 1.0));
  }

  bool banned(const Ban& b) const {
    return std::find(bans.begin(), bans.end(), b) != bans.end();
  }

  // Routes to scan: all nonempty plus the first empty one per class.
  int first_empty(VehicleClass k) const {
    for (int r = 0; r < sol.route_count(k); ++r) {
      if (sol.route(k, r).empty()) return r;
    }
    return -1;
  }
  bool scan_route(VehicleClass k, int r, int first_empty_r) const {
    return !sol.route(k, r).empty() || r == first_empty_r;
  }

  RequestEval evaluate(int rep, int fe_reg, int fe_spec) {
    RequestEval ev;
    ev.rep = rep;
    const int nreg = sol.route_count(VehicleClass::regular);
    route_best.assign(static_cast<std::size_t>(nreg), kInf);

    if (!is_special_rep(ins, rep)) {
      const Vertex& vx = ins.vertex(rep);
      for (int r = 0; r < nreg; ++r) {
        if (!scan_route(VehicleClass::regular, r, fe_reg)) continue;
        const Route& route = sol.route(VehicleClass::regular, r);
        if (route.load + vx.demand > ins.capacity() + kFeasTol) continue;
        for (int pos = 1; pos < static_cast<int>(route.visits.size()); ++pos) {
          const int prev = route.visits[pos - 1], next = route.visits[pos];
          const double ic = insertion_delta(ins, VehicleClass::regular, prev, rep, next);
          const double nc = noisy(ic);
          if (nc >= route_best[r]) continue;
          if (banned({rep, r, pos, -1, -1})) continue;
          const int arc = st.arc_at(VehicleClass::regular, r, pos - 1);
          if (!regular_insertion_feasible(ins, st, table, rep, arc)) continue;
          route_best[r] = nc;
          if (nc < ev.best.cost) {
            ev.best = {nc, ic, r, pos, -1, -1};
          }
        }
      }
    } else {
      const int copy = ins.vertex(rep).mirror;
      const Vertex& vc = ins.vertex(copy);
      const int nspec = sol.route_count(VehicleClass::special);
      for (int r1 = 0; r1 < nreg; ++r1) {
        if (!scan_route(VehicleClass::regular, r1, fe_reg)) continue;
        const Route& route1 = sol.route(VehicleClass::regular, r1);
        if (route1.load + vc.demand > ins.capacity() + kFeasTol) continue;
        for (int p1 = 1; p1 < static_cast<int>(route1.visits.size()); ++p1) {
          const double ic1 = insertion_delta(ins, VehicleClass::regular,
                                             route1.visits[p1 - 1], copy, route1.visits[p1]);
          const int arc1 = st.arc_at(VehicleClass::regular, r1, p1 - 1);
          for (int r2 = 0; r2 < nspec; ++r2) {
            if (!scan_route(VehicleClass::special, r2, fe_spec)) continue;
            const Route& route2 = sol.route(VehicleClass::special, r2);
            for (int p2 = 1; p2 < static_cast<int>(route2.visits.size()); ++p2) {
              const double ic2 = insertion_delta(ins, VehicleClass::special,
                                                 route2.visits[p2 - 1], rep,
                                                 route2.visits[p2]);
              const double ic = 0.5 * (ic1 + ic2);
              const double nc = noisy(ic);
              if (nc >= route_best[r1]) continue;
              if (banned({rep, r1, p1, r2, p2})) continue;
              const int arc2 = st.arc_at(VehicleClass::special, r2, p2 - 1);
              if (!special_insertion_precheck(ins, st, table, rep, arc1, arc2,
                                              route1.load)) {
                continue;
              }
              if (!check_special_insertion(st.problem, ins, rep, arc1, arc2)) continue;
              route_best[r1] = nc;
              if (nc < ev.best.cost) {
                ev.best = {nc, ic, r1, p1, r2, p2};
              }
            }
          }
        }
      }
    }

    // Regret over the k cheapest per-route bests.
    std::sort(route_best.begin(), route_best.end());
    int m = 0;
    while (m < nreg && !is_inf(route_best[static_cast<std::size_t>(m)])) ++m;
    ev.feasible_routes = m;
    const int terms = std::min(params.k, m);
    for (int j = 1; j < terms; ++j) {
      ev.regret += route_best[static_cast<std::size_t>(j)] - route_best[0];
    }
    return ev;
  }

  void apply(const RequestEval& ev) {
    if (ev.best.r2 >= 0) {
      sol.insert(ins, VehicleClass::regular, ev.best.r1, ev.best.p1,
                 ins.vertex(ev.rep).mirror);
      sol.insert(ins, VehicleClass::special, ev.best.r2, ev.best.p2, ev.rep);
    } else {
      sol.insert(ins, VehicleClass::regular, ev.best.r1, ev.best.p1, ev.rep);
    }
  }

  void undo(const RequestEval& ev) {
    if (ev.best.r2 >= 0) {
      sol.remove(ins, ev.rep);
      sol.remove(ins, ins.vertex(ev.rep).mirror);
    } else {
      sol.remove(ins, ev.rep);
    }
  }
};

}  // namespace

RepairResult regret_insert(const Instance& ins, Solution& sol, const std::vector<int>& bank,
                           const RepairParams& params, Rng& rng) {
  RepairResult res;
  std::vector<int> todo = bank;
  Repairer rep(ins, sol, params, rng);
  if (!rep.rebuild()) {
    res.unplaced = todo;
    return res;
  }

  std::vector<RequestEval> evals;
  while (!todo.empty()) {
    const int fe_reg = rep.first_empty(VehicleClass::regular);
    const int fe_spec = rep.first_empty(VehicleClass::special);
    evals.clear();
    for (int r : todo) evals.push_back(rep.evaluate(r, fe_reg, fe_spec));

    // A request with no feasible slot dooms the attempt: inserting the others
    // only tightens every constraint it already fails.
    for (const auto& ev : evals) {
      if (ev.feasible_routes == 0) {
        res.unplaced = todo;
        res.rollbacks = rep.rollbacks;
        return res;
      }
    }

    // Requests short of k candidate routes come first (fewest routes first);
    // otherwise highest regret wins. Ties fall to the cheaper best insertion,
    // then to the lower request id.
    const RequestEval* chosen = &evals.front();
    auto better = [&](const RequestEval& a, const RequestEval& b) {
      const bool a_short = a.feasible_routes < params.k;
      const bool b_short = b.feasible_routes < params.k;
      if (a_short != b_short) return a_short;
      if (a_short && a.feasible_routes != b.feasible_routes) {
        return a.feasible_routes < b.feasible_routes;
      }
      if (a.regret != b.regret) return a.regret > b.regret;
      if (a.best.cost != b.best.cost) return a.best.cost < b.best.cost;
      return a.rep < b.rep;
    };
    for (const auto& ev : evals) {
      if (better(ev, *chosen)) chosen = &ev;
    }

    rep.apply(*chosen);
    if (!rep.rebuild()) {
      // The screened insertion was refused by the exact system (possible for
      // regular insertions in tightly synchronized corners). Undo and ban it.
      rep.undo(*chosen);
      rep.bans.push_back(
          {chosen->rep, chosen->best.r1, chosen->best.p1, chosen->best.r2, chosen->best.p2});
      ++rep.rollbacks;
      const bool ok = rep.rebuild();
      assert(ok);
      (void)ok;
      continue;
    }
    rep.bans.clear();
    todo.erase(std::find(todo.begin(), todo.end(), chosen->rep));
  }

  const bool ok = refresh_schedule(ins, sol);
  assert(ok);
  (void)ok;
  res.complete = ok;
  res.rollbacks = rep.rollbacks;
  return res;
}

}  // namespace vrpsc
