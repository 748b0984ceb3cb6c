#include "vrpsc/temporal.hpp"

#include <algorithm>
#include <array>
#include <cassert>
#include <functional>
#include <sstream>

namespace vrpsc {

int TemporalProblem::add_node(int vertex, double lo, double hi) {
  const int idx = static_cast<int>(nodes_.size());
  nodes_.push_back({vertex, lo, hi});
  if (vertex >= 0) {
    if (vertex >= static_cast<int>(vertex_to_node_.size())) {
      vertex_to_node_.resize(static_cast<std::size_t>(vertex) + 1, -1);
    }
    if (vertex_to_node_[vertex] < 0) vertex_to_node_[vertex] = idx;
  }
  return idx;
}

int TemporalProblem::add_arc(int tail, int head, double span) {
  assert(tail >= 0 && tail < node_count() && head >= 0 && head < node_count());
  arcs_.push_back({tail, head, span});
  return static_cast<int>(arcs_.size()) - 1;
}

void TemporalProblem::add_sync(int special_node, int copy_node, double alpha, double beta) {
  assert(special_node >= 0 && special_node < node_count());
  assert(copy_node >= 0 && copy_node < node_count());
  syncs_.push_back({special_node, copy_node, alpha, beta});
}

int TemporalProblem::node_of_vertex(int vertex) const {
  if (vertex < 0 || vertex >= static_cast<int>(vertex_to_node_.size())) return -1;
  return vertex_to_node_[vertex];
}

namespace {

// ---------------------------------------------------------------------------
// Difference-constraint solver.
//
// The system is encoded twice:
//  * "relax" rules tau_v >= tau_u + w, used by the earliest/latest fixpoints:
//      arc (t,h,span)        -> (t -> h, +span)
//      sync (s,c,alpha,beta) -> (c -> s, -alpha), (s -> c, -beta)
//  * a bound graph whose edge u -> v with weight w encodes tau_v - tau_u <= w,
//    used by the shortest-path delay queries; it is the reverse of the relax
//    rules plus a ground node z (tau_z = 0) carrying the window bounds:
//      arc            -> (h -> t, -span)
//      sync           -> (s -> c, +alpha), (c -> s, +beta)
//      window of i    -> (z -> i, hi) when hi finite, (i -> z, -lo)
//    The tightest derivable bound on tau_v - tau_u is the shortest path u->v.
//
// The earliest fixpoint doubles as feasibility check (no blow-up and all upper
// bounds respected <=> feasible) and as a potential function that makes every
// bound-graph weight nonnegative, so delay queries can use Dijkstra.
// ---------------------------------------------------------------------------

struct Csr {
  std::vector<int> off, to;
  std::vector<double> w;

  void build(int n, const std::vector<std::array<double, 3>>& edges) {
    off.assign(static_cast<std::size_t>(n) + 1, 0);
    for (const auto& e : edges) ++off[static_cast<int>(e[0]) + 1];
    for (int i = 0; i < n; ++i) off[i + 1] += off[i];
    to.resize(edges.size());
    w.resize(edges.size());
    std::vector<int> cur(off.begin(), off.end() - 1);
    for (const auto& e : edges) {
      int u = static_cast<int>(e[0]);
      to[cur[u]] = static_cast<int>(e[1]);
      w[cur[u]] = e[2];
      ++cur[u];
    }
  }
};

struct Workspace {
  int n = 0;   // problem nodes
  int nz = 0;  // n + 1, ground node z at index n
  Csr relax;   // earliest rules over nodes 0..n-1
  Csr bound;   // bound graph over 0..n (z = n)
  Csr bound_rev;
  std::vector<int> relax_pos_of_arc;  // arc index -> edge position in `relax`

  std::vector<std::array<double, 3>> scratch_edges;
  std::vector<double> tau;
  std::vector<int> qcount;
  std::vector<char> inq;
  std::vector<int> queue;

  std::vector<double> dist;
  std::vector<std::pair<double, int>> heap;

  void build(const TemporalProblem& p) {
    n = p.node_count();
    nz = n + 1;
    auto& edges = scratch_edges;

    edges.clear();
    relax_pos_of_arc.assign(p.arc_count(), -1);
    for (const auto& a : p.arcs()) edges.push_back({double(a.tail), double(a.head), a.span});
    for (const auto& s : p.syncs()) {
      edges.push_back({double(s.copy_node), double(s.special_node), -s.alpha});
      edges.push_back({double(s.special_node), double(s.copy_node), -s.beta});
    }
    relax.build(n, edges);
    // Recover where each arc's rule landed after the counting sort.
    {
      std::vector<int> cur(relax.off.begin(), relax.off.end() - 1);
      for (int a = 0; a < p.arc_count(); ++a) {
        relax_pos_of_arc[a] = cur[p.arcs()[a].tail]++;
      }
    }

    edges.clear();
    for (const auto& a : p.arcs()) edges.push_back({double(a.head), double(a.tail), -a.span});
    for (const auto& s : p.syncs()) {
      edges.push_back({double(s.special_node), double(s.copy_node), s.alpha});
      edges.push_back({double(s.copy_node), double(s.special_node), s.beta});
    }
    for (int i = 0; i < n; ++i) {
      const auto& nd = p.nodes()[i];
      if (!is_inf(nd.hi)) edges.push_back({double(n), double(i), nd.hi});
      edges.push_back({double(i), double(n), -nd.lo});
    }
    bound.build(nz, edges);
    for (auto& e : edges) std::swap(e[0], e[1]);
    bound_rev.build(nz, edges);
  }

  // Least fixpoint of the relax rules starting from the window lower bounds.
  // Returns false on a positive cycle (unbounded propagation). Does not check
  // upper bounds; callers do.
  bool earliest(const TemporalProblem& p, std::vector<double>& out) {
    out.assign(n, 0);
    for (int i = 0; i < n; ++i) out[i] = p.nodes()[i].lo;
    qcount.assign(n, 0);
    inq.assign(n, 1);
    queue.clear();
    for (int i = 0; i < n; ++i) queue.push_back(i);
    std::size_t qhead = 0;
    while (qhead < queue.size()) {
      const int u = queue[qhead++];
      inq[u] = 0;
      if (qhead > 64u && qhead * 2 > queue.size()) {
        // compact the ring
        queue.erase(queue.begin(), queue.begin() + static_cast<long>(qhead));
        qhead = 0;
      }
      for (int e = relax.off[u]; e < relax.off[u + 1]; ++e) {
        const int v = relax.to[e];
        const double cand = out[u] + relax.w[e];
        if (cand > out[v]) {
          out[v] = cand;
          if (!inq[v]) {
            if (++qcount[v] > n + 1) return false;  // positive cycle
            inq[v] = 1;
            queue.push_back(v);
          }
        }
      }
    }
    return true;
  }

  // Greatest fixpoint from the upper bounds downward; assumes no positive
  // cycle (call earliest first).
  void latest(const TemporalProblem& p, std::vector<double>& out) {
    out.assign(n, 0);
    for (int i = 0; i < n; ++i) out[i] = p.nodes()[i].hi;
    qcount.assign(n, 0);
    inq.assign(n, 1);
    queue.clear();
    for (int i = 0; i < n; ++i) queue.push_back(i);
    std::size_t qhead = 0;
    while (qhead < queue.size()) {
      const int u = queue[qhead++];
      inq[u] = 0;
      if (qhead > 64u && qhead * 2 > queue.size()) {
        queue.erase(queue.begin(), queue.begin() + static_cast<long>(qhead));
        qhead = 0;
      }
      // bound graph edges u -> v mean tau_v <= tau_u + w for v != z
      for (int e = bound.off[u]; e < bound.off[u + 1]; ++e) {
        const int v = bound.to[e];
        if (v >= n) continue;
        const double cand = out[u] + bound.w[e];
        if (cand < out[v]) {
          out[v] = cand;
          if (!inq[v]) {
            ++qcount[v];
            inq[v] = 1;
            queue.push_back(v);
          }
        }
      }
    }
  }

  // Dijkstra over the bound graph with reduced weights w' = w + phi_u - phi_v,
  // where phi is the earliest schedule (phi_z = 0). On the reversed graph the
  // valid potential is -phi, which flips the reduction sign; either way a
  // reversed path carries the same reduced length as its forward original, so
  // callers un-reduce identically. dist comes back in *reduced* units.
  void dijkstra(const Csr& g, int source, const std::vector<double>& phi, bool reversed) {
    dist.assign(nz, kInf);
    dist[source] = 0;
    heap.clear();
    heap.push_back({0, source});
    while (!heap.empty()) {
      std::pop_heap(heap.begin(), heap.end(), std::greater<>());
      auto [d, u] = heap.back();
      heap.pop_back();
      if (d > dist[u]) continue;
      for (int e = g.off[u]; e < g.off[u + 1]; ++e) {
        const int v = g.to[e];
        double w = g.w[e] + (reversed ? phi[v] - phi[u] : phi[u] - phi[v]);
        if (w < 0) w = 0;  // floating fuzz; potentials make weights >= 0
        const double cand = d + w;
        if (cand < dist[v]) {
          dist[v] = cand;
          heap.push_back({cand, v});
          std::push_heap(heap.begin(), heap.end(), std::greater<>());
        }
      }
    }
  }
};

thread_local Workspace g_ws;

bool uppers_ok(const TemporalProblem& p, const std::vector<double>& tau) {
  for (int i = 0; i < p.node_count(); ++i) {
    if (tau[i] > p.nodes()[i].hi + kFeasTol) return false;
  }
  return true;
}

// phi over nz nodes: earliest schedule extended with phi_z = 0.
void make_potential(const std::vector<double>& et, int nz, std::vector<double>& phi) {
  phi.assign(nz, 0);
  std::copy(et.begin(), et.end(), phi.begin());
}

}  // namespace

Schedule earliest_schedule(const TemporalProblem& problem) {
  Schedule s;
  Workspace& ws = g_ws;
  ws.build(problem);
  if (!ws.earliest(problem, s.times) || !uppers_ok(problem, s.times)) {
    s.feasible = false;
    s.times.clear();
    return s;
  }
  s.feasible = true;
  return s;
}

ArcDelayTable max_delays_all(const TemporalProblem& problem) {
  ArcDelayTable t;
  Workspace& ws = g_ws;
  ws.build(problem);
  if (!ws.earliest(problem, t.et) || !uppers_ok(problem, t.et)) {
    t.feasible = false;
    t.et.clear();
    return t;
  }
  t.feasible = true;
  ws.latest(problem, t.lt);

  const int n = ws.n;
  static thread_local std::vector<double> phi, d_from_portal, d_to_portal;
  make_potential(t.et, ws.nz, phi);

  // Portals: the ground node plus every sync endpoint. Any bound-graph path
  // from an arc's tail to its head must pass through one of them (route-chain
  // edges only walk backward along a route).
  static thread_local std::vector<int> portals;
  portals.clear();
  portals.push_back(n);
  for (const auto& s : problem.syncs()) {
    portals.push_back(s.special_node);
    portals.push_back(s.copy_node);
  }

  t.delta.assign(problem.arc_count(), kInf);
  for (int pidx : portals) {
    ws.dijkstra(ws.bound, pidx, phi, false);
    d_from_portal = ws.dist;  // reduced d(p, v)
    ws.dijkstra(ws.bound_rev, pidx, phi, true);
    d_to_portal = ws.dist;  // reduced d(v, p)
    const double phi_p = phi[pidx];
    for (int a = 0; a < problem.arc_count(); ++a) {
      const auto& arc = problem.arcs()[a];
      const double dt = d_to_portal[arc.tail];    // reduced d(tail, p)
      const double dh = d_from_portal[arc.head];  // reduced d(p, head)
      if (is_inf(dt) || is_inf(dh)) continue;
      // un-reduce: d = dr - phi_u + phi_v
      const double full =
          (dt - phi[arc.tail] + phi_p) + (dh - phi_p + phi[arc.head]) - arc.span;
      if (full < t.delta[a]) t.delta[a] = full;
    }
  }
  // Delays are nonnegative by construction; clip the floating fuzz.
  for (double& d : t.delta) {
    if (d < 0) d = 0;
  }
  return t;
}

std::optional<double> max_delay_single(const TemporalProblem& problem, int arc) {
  Workspace& ws = g_ws;
  ws.build(problem);
  static thread_local std::vector<double> et, phi;
  if (!ws.earliest(problem, et) || !uppers_ok(problem, et)) return std::nullopt;
  make_potential(et, ws.nz, phi);
  const auto& a = problem.arcs()[arc];
  ws.dijkstra(ws.bound, a.tail, phi, false);
  const double dr = ws.dist[a.head];
  if (is_inf(dr)) return kInf;
  const double d = dr - phi[a.tail] + phi[a.head] - a.span;
  return d < 0 ? 0 : d;
}

bool check_special_insertion(const TemporalProblem& problem, const Instance& instance,
                             int special_vertex, int arc_regular, int arc_special) {
  Workspace& ws = g_ws;
  ws.build(problem);

  const int copy_vertex = instance.vertex(special_vertex).mirror;
  const auto& a1 = problem.arcs()[arc_regular];
  const auto& a2 = problem.arcs()[arc_special];
  const int n = ws.n;
  const int node_copy = n, node_special = n + 1;

  const int skip1 = ws.relax_pos_of_arc[arc_regular];
  const int skip2 = ws.relax_pos_of_arc[arc_special];

  const int p1m1 = a1.tail, p1 = a1.head, p2m1 = a2.tail, p2 = a2.head;
  const int v_p1m1 = problem.nodes()[p1m1].vertex;
  const int v_p1 = problem.nodes()[p1].vertex;
  const int v_p2m1 = problem.nodes()[p2m1].vertex;
  const int v_p2 = problem.nodes()[p2].vertex;

  const double span_in_copy = instance.leg_span(VehicleClass::regular, v_p1m1, copy_vertex);
  const double span_out_copy = instance.leg_span(VehicleClass::regular, copy_vertex, v_p1);
  const double span_in_spec = instance.leg_span(VehicleClass::special, v_p2m1, special_vertex);
  const double span_out_spec = instance.leg_span(VehicleClass::special, special_vertex, v_p2);

  const double lo_copy = instance.vertex(copy_vertex).window_open;
  const double hi_copy = instance.vertex(copy_vertex).window_close;
  const double alpha = instance.vertex(special_vertex).alpha;
  const double beta = instance.vertex(special_vertex).beta;

  // Earliest fixpoint on the patched system: base rules minus the two replaced
  // arcs, plus the four insertion arcs and the new sync pair.
  static thread_local std::vector<double> tau;
  static thread_local std::vector<int> qcount;
  static thread_local std::vector<char> inq;
  static thread_local std::vector<int> queue;
  const int np = n + 2;
  tau.assign(np, 0);
  for (int i = 0; i < n; ++i) tau[i] = problem.nodes()[i].lo;
  tau[node_copy] = lo_copy;
  tau[node_special] = 0;
  qcount.assign(np, 0);
  inq.assign(np, 1);
  queue.clear();
  for (int i = 0; i < np; ++i) queue.push_back(i);
  std::size_t qhead = 0;

  auto relax_to = [&](int v, double cand) -> bool {
    if (cand > tau[v]) {
      tau[v] = cand;
      if (!inq[v]) {
        if (++qcount[v] > np + 1) return false;
        inq[v] = 1;
        queue.push_back(v);
      }
    }
    return true;
  };

  while (qhead < queue.size()) {
    const int u = queue[qhead++];
    inq[u] = 0;
    if (qhead > 64u && qhead * 2 > queue.size()) {
      queue.erase(queue.begin(), queue.begin() + static_cast<long>(qhead));
      qhead = 0;
    }
    if (u < n) {
      for (int e = ws.relax.off[u]; e < ws.relax.off[u + 1]; ++e) {
        if (e == skip1 || e == skip2) continue;
        if (!relax_to(ws.relax.to[e], tau[u] + ws.relax.w[e])) return false;
      }
      if (u == p1m1 && !relax_to(node_copy, tau[u] + span_in_copy)) return false;
      if (u == p2m1 && !relax_to(node_special, tau[u] + span_in_spec)) return false;
    } else if (u == node_copy) {
      if (!relax_to(p1, tau[u] + span_out_copy)) return false;
      if (!relax_to(node_special, tau[u] - alpha)) return false;
    } else {  // node_special
      if (!relax_to(p2, tau[u] + span_out_spec)) return false;
      if (!relax_to(node_copy, tau[u] - beta)) return false;
    }
  }

  for (int i = 0; i < n; ++i) {
    if (tau[i] > problem.nodes()[i].hi + kFeasTol) return false;
  }
  return tau[node_copy] <= hi_copy + kFeasTol;
}

std::string dump_lp(const TemporalProblem& problem) {
  std::ostringstream os;
  os << "Maximize\n obj: 0\nSubject To\n";
  int row = 0;
  for (const auto& a : problem.arcs()) {
    os << " c" << row++ << ": t" << a.head << " - t" << a.tail << " >= " << fmt_num(a.span)
       << "\n";
  }
  for (const auto& s : problem.syncs()) {
    os << " c" << row++ << ": t" << s.special_node << " - t" << s.copy_node
       << " >= " << fmt_num(-s.alpha) << "\n";
    os << " c" << row++ << ": t" << s.special_node << " - t" << s.copy_node
       << " <= " << fmt_num(s.beta) << "\n";
  }
  os << "Bounds\n";
  for (int i = 0; i < problem.node_count(); ++i) {
    const auto& nd = problem.nodes()[i];
    if (is_inf(nd.hi)) {
      os << " t" << i << " >= " << fmt_num(nd.lo) << "\n";
    } else {
      os << " " << fmt_num(nd.lo) << " <= t" << i << " <= " << fmt_num(nd.hi) << "\n";
    }
  }
  os << "End\n";
  return os.str();
}

}  // namespace vrpsc
