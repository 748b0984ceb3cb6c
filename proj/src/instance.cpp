#include "vrpsc/instance.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <sstream>

namespace vrpsc {

namespace {

bool numeric_token(const std::string& t) {
  if (t.empty()) return false;
  char* end = nullptr;
  std::strtod(t.c_str(), &end);
  return end == t.c_str() + t.size();
}

std::vector<std::string> split_ws(const std::string& line) {
  std::istringstream is(line);
  std::vector<std::string> out;
  std::string tok;
  while (is >> tok) out.push_back(tok);
  return out;
}

}  // namespace

// ---------------------------------------------------------------------------
// Raw parsing
// ---------------------------------------------------------------------------

RawVrptw parse_vrptw(const std::string& text) {
  std::istringstream is(text);
  std::string line;
  int lineno = 0;
  RawVrptw raw;

  enum class Section { name, vehicle, customer } section = Section::name;
  int vehicle_numbers_seen = 0;
  bool saw_customer_header = false;

  while (std::getline(is, line)) {
    ++lineno;
    auto toks = split_ws(line);
    if (toks.empty()) continue;

    if (section == Section::name) {
      if (toks[0] == "VEHICLE") {
        throw ParseError(lineno, "missing instance name before VEHICLE section");
      }
      raw.name = toks[0];
      section = Section::vehicle;
      continue;
    }

    if (section == Section::vehicle) {
      if (toks[0] == "VEHICLE" || toks[0] == "NUMBER") continue;
      if (toks[0] == "CUSTOMER") {
        throw ParseError(lineno, "missing vehicle count/capacity before CUSTOMER section");
      }
      if (toks.size() == 2 && numeric_token(toks[0]) && numeric_token(toks[1])) {
        raw.vehicles = static_cast<int>(std::stod(toks[0]));
        raw.capacity = std::stod(toks[1]);
        if (raw.vehicles <= 0) throw ParseError(lineno, "vehicle count must be positive");
        if (raw.capacity < 0) throw ParseError(lineno, "capacity must be nonnegative");
        vehicle_numbers_seen = 1;
        section = Section::customer;
        continue;
      }
      throw ParseError(lineno, "malformed VEHICLE section, expected '<number> <capacity>'");
    }

    // Section::customer
    if (toks[0] == "CUSTOMER") { saw_customer_header = true; continue; }
    if (!numeric_token(toks[0])) {
      // column header line(s) such as "CUST NO. XCOORD. ..."
      saw_customer_header = true;
      continue;
    }
    if (toks.size() != 7) {
      throw ParseError(lineno, "customer row needs 7 fields, got " + std::to_string(toks.size()));
    }
    for (const auto& t : toks) {
      if (!numeric_token(t)) throw ParseError(lineno, "non-numeric field '" + t + "'");
    }
    RawCustomer c;
    c.id = static_cast<int>(std::stod(toks[0]));
    c.x = std::stod(toks[1]);
    c.y = std::stod(toks[2]);
    c.demand = std::stod(toks[3]);
    c.ready = std::stod(toks[4]);
    c.due = std::stod(toks[5]);
    c.service = std::stod(toks[6]);
    if (c.ready > c.due) throw ParseError(lineno, "ready time exceeds due date");
    if (c.demand < 0) throw ParseError(lineno, "negative demand");
    if (raw.rows.empty() && c.id != 0) {
      throw ParseError(lineno, "first customer row must be the depot (id 0)");
    }
    raw.rows.push_back(c);
  }

  if (raw.name.empty()) throw ParseError(lineno, "empty file");
  if (!vehicle_numbers_seen) throw ParseError(lineno, "missing VEHICLE section");
  (void)saw_customer_header;
  if (raw.rows.empty()) throw ParseError(lineno, "missing depot row");
  if (raw.rows.size() < 2) throw ParseError(lineno, "no customers");
  const RawCustomer& depot = raw.rows[0];
  if (depot.demand != 0) throw ParseError(lineno, "depot must have zero demand");
  if (depot.service != 0) throw ParseError(lineno, "depot must have zero service time");
  return raw;
}

std::string write_vrptw(const RawVrptw& raw) {
  std::ostringstream os;
  os << raw.name << "\n\n";
  os << "VEHICLE\n";
  os << "NUMBER     CAPACITY\n";
  os << "  " << raw.vehicles << "         " << fmt_num(raw.capacity) << "\n\n";
  os << "CUSTOMER\n";
  os << "CUST NO.  XCOORD.   YCOORD.    DEMAND   READY TIME  DUE DATE   SERVICE TIME\n\n";
  for (const auto& c : raw.rows) {
    os << "   " << c.id << "     " << fmt_num(c.x) << "      " << fmt_num(c.y) << "       "
       << fmt_num(c.demand) << "       " << fmt_num(c.ready) << "        " << fmt_num(c.due)
       << "       " << fmt_num(c.service) << "\n";
  }
  return os.str();
}

RawVrptw take_customers(const RawVrptw& raw, int n) {
  if (n <= 0 || n + 1 >= static_cast<int>(raw.rows.size())) return raw;
  RawVrptw out = raw;
  out.rows.resize(static_cast<std::size_t>(n) + 1);
  return out;
}

// ---------------------------------------------------------------------------
// Vertex kinds
// ---------------------------------------------------------------------------

const char* to_string(VertexKind k) {
  switch (k) {
    case VertexKind::depot_start_regular: return "depot_start_regular";
    case VertexKind::depot_end_regular: return "depot_end_regular";
    case VertexKind::depot_start_special: return "depot_start_special";
    case VertexKind::depot_end_special: return "depot_end_special";
    case VertexKind::regular_customer: return "regular_customer";
    case VertexKind::special_copy: return "special_copy";
    case VertexKind::special_customer: return "special_customer";
  }
  return "?";
}

std::optional<VertexKind> vertex_kind_from(const std::string& s) {
  for (VertexKind k : {VertexKind::depot_start_regular, VertexKind::depot_end_regular,
                       VertexKind::depot_start_special, VertexKind::depot_end_special,
                       VertexKind::regular_customer, VertexKind::special_copy,
                       VertexKind::special_customer}) {
    if (s == to_string(k)) return k;
  }
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// Transform
// ---------------------------------------------------------------------------

std::vector<int> Instance::special_ids(int customer_count, double ns) {
  std::vector<int> out;
  if (ns <= 0 || customer_count <= 0) return out;
  // ceil(ns * n) customers, every floor(1/ns)-th starting from the first one.
  // The epsilons keep exact products (e.g. 1.0 * n) from tipping over.
  const int count = static_cast<int>(std::ceil(ns * customer_count - 1e-9));
  const int step = std::max(1, static_cast<int>(std::floor(1.0 / ns + 1e-9)));
  for (int k = 0; k < count; ++k) {
    const int id = 1 + k * step;
    if (id > customer_count) break;
    out.push_back(id);
  }
  return out;
}

Instance Instance::transform(const RawVrptw& raw, const TransformOptions& opt) {
  if (opt.ns < 0 || opt.ns > 1) throw std::invalid_argument("ns must be in [0, 1]");
  if (opt.alpha < 0 || opt.beta < 0) throw std::invalid_argument("alpha/beta must be >= 0");

  Instance ins;
  ins.source_ = raw.name;
  ins.ns_ = opt.ns;
  ins.truncate_ = opt.truncate_distances;
  ins.vehicles_regular_ = raw.vehicles;
  ins.vehicles_special_ = opt.vehicles_special > 0 ? opt.vehicles_special : raw.vehicles;
  ins.capacity_ = raw.capacity;
  {
    std::ostringstream nm;
    nm << raw.name << "_n" << (raw.rows.size() - 1) << "_s"
       << fmt_num(std::round(opt.ns * 1000) / 10);
    ins.name_ = nm.str();
  }

  const RawCustomer& depot = raw.rows[0];
  const int customer_count = static_cast<int>(raw.rows.size()) - 1;
  std::vector<char> special(customer_count + 1, 0);
  for (int id : special_ids(customer_count, opt.ns)) special[id] = 1;

  auto depot_vertex = [&](VertexKind kind) {
    Vertex v;
    v.kind = kind;
    v.x = depot.x;
    v.y = depot.y;
    // Only the regular end depot carries the horizon deadline; starts are free
    // (schedules may begin at any time >= 0) and the special end is open.
    if (kind == VertexKind::depot_end_regular) {
      v.window_open = depot.ready;
      v.window_close = depot.due;
    }
    return v;
  };
  ins.vertices_.push_back(depot_vertex(VertexKind::depot_start_regular));
  ins.vertices_.push_back(depot_vertex(VertexKind::depot_end_regular));
  ins.vertices_.push_back(depot_vertex(VertexKind::depot_start_special));
  ins.vertices_.push_back(depot_vertex(VertexKind::depot_end_special));

  for (int i = 1; i <= customer_count; ++i) {
    const RawCustomer& c = raw.rows[static_cast<std::size_t>(i)];
    Vertex v;
    v.x = c.x;
    v.y = c.y;
    v.demand = c.demand;
    v.window_open = c.ready;
    v.window_close = c.due;
    if (!special[i]) {
      v.kind = VertexKind::regular_customer;
      v.service_regular = c.service;
      ins.vertices_.push_back(v);
    } else {
      // The copy keeps the window, demand and regular-fleet service; the
      // special vertex has the raw service as its special-fleet duration and is
      // tied to the copy's start time within [-alpha, +beta].
      Vertex copy = v;
      copy.kind = VertexKind::special_copy;
      copy.service_regular = c.service;
      Vertex spec;
      spec.kind = VertexKind::special_customer;
      spec.x = c.x;
      spec.y = c.y;
      spec.demand = c.demand;
      spec.service_special = c.service;
      spec.alpha = opt.alpha;
      spec.beta = opt.beta;
      const int copy_id = static_cast<int>(ins.vertices_.size());
      copy.mirror = copy_id + 1;
      spec.mirror = copy_id;
      ins.vertices_.push_back(copy);
      ins.vertices_.push_back(spec);
    }
  }

  for (std::size_t i = 0; i < ins.vertices_.size(); ++i) {
    ins.vertices_[i].id = static_cast<int>(i);
  }
  ins.finalize();
  return ins;
}

void Instance::finalize() {
  const int n = size();
  side_mask_.assign(static_cast<std::size_t>(n), 0);
  regular_side_.clear();
  special_side_.clear();
  regular_customers_.clear();
  for (const Vertex& v : vertices_) {
    switch (v.kind) {
      case VertexKind::depot_start_regular:
      case VertexKind::depot_end_regular:
        side_mask_[v.id] = 1;
        break;
      case VertexKind::depot_start_special:
      case VertexKind::depot_end_special:
        side_mask_[v.id] = 2;
        break;
      case VertexKind::regular_customer:
        side_mask_[v.id] = 1;
        regular_side_.push_back(v.id);
        regular_customers_.push_back(v.id);
        break;
      case VertexKind::special_copy:
        side_mask_[v.id] = 1;
        regular_side_.push_back(v.id);
        if (v.mirror < 0 || v.mirror >= n ||
            vertices_[v.mirror].kind != VertexKind::special_customer ||
            vertices_[v.mirror].mirror != v.id) {
          throw std::invalid_argument("special copy without matching special customer");
        }
        break;
      case VertexKind::special_customer:
        side_mask_[v.id] = 2;
        special_side_.push_back(v.id);
        if (v.mirror < 0 || v.mirror >= n ||
            vertices_[v.mirror].kind != VertexKind::special_copy) {
          throw std::invalid_argument("special customer without matching copy");
        }
        if (v.alpha < 0 || v.beta < 0) throw std::invalid_argument("negative sync slack");
        break;
    }
    if (v.window_open < 0 || v.window_open > v.window_close) {
      throw std::invalid_argument("bad window on vertex " + std::to_string(v.id));
    }
  }
  if (vertices_.size() < 4 || vertices_[0].kind != VertexKind::depot_start_regular ||
      vertices_[1].kind != VertexKind::depot_end_regular ||
      vertices_[2].kind != VertexKind::depot_start_special ||
      vertices_[3].kind != VertexKind::depot_end_special) {
    throw std::invalid_argument("vertices 0..3 must be the four depot vertices");
  }

  dist_.assign(static_cast<std::size_t>(n) * n, 0);
  max_travel_ = 0;
  max_demand_ = 0;
  for (int a = 0; a < n; ++a) {
    max_demand_ = std::max(max_demand_, vertices_[a].demand);
    for (int b = 0; b < n; ++b) {
      double d = std::hypot(vertices_[a].x - vertices_[b].x, vertices_[a].y - vertices_[b].y);
      if (truncate_) d = std::floor(d * 10.0) / 10.0;
      dist_at(a, b) = d;
      max_travel_ = std::max(max_travel_, d);
    }
  }
}

bool Instance::on_regular_side(int id) const { return side_mask_[id] == 1; }
bool Instance::on_special_side(int id) const { return side_mask_[id] == 2; }

// A vertex not on side k may stand in for its sync twin (identical location),
// so e.g. the distance between a special customer and its copy is 0 under
// either matrix. Vertices with no stand-in on side k are out of domain.
int Instance::side_stand_in(VehicleClass k, int a) const {
  if (a < 0 || a >= size()) throw std::out_of_range("vertex id out of range");
  const char want = k == VehicleClass::regular ? 1 : 2;
  if (side_mask_[a] == want) return a;
  const int m = vertices_[a].mirror;
  if (m >= 0 && side_mask_[m] == want) return m;
  throw std::out_of_range("travel/service query across fleet domains");
}

double Instance::travel(VehicleClass k, int a, int b) const {
  return dist_at(side_stand_in(k, a), side_stand_in(k, b));
}

double Instance::service(VehicleClass k, int a) const {
  const int v = side_stand_in(k, a);
  return k == VehicleClass::regular ? vertices_[v].service_regular
                                    : vertices_[v].service_special;
}

// ---------------------------------------------------------------------------
// Instance text format
// ---------------------------------------------------------------------------

std::string Instance::to_text() const {
  std::ostringstream os;
  os << "VRPSC 1\n";
  os << "name " << name_ << "\n";
  os << "source " << source_ << "\n";
  os << "ns " << fmt_num(ns_) << "\n";
  os << "vehicles_regular " << vehicles_regular_ << "\n";
  os << "vehicles_special " << vehicles_special_ << "\n";
  os << "capacity " << fmt_num(capacity_) << "\n";
  os << "truncated_distances " << (truncate_ ? 1 : 0) << "\n";
  os << "vertices " << vertices_.size() << "\n";
  os << "# id kind x y demand s_regular s_special open close mirror alpha beta\n";
  for (const Vertex& v : vertices_) {
    os << v.id << ' ' << to_string(v.kind) << ' ' << fmt_num(v.x) << ' ' << fmt_num(v.y) << ' '
       << fmt_num(v.demand) << ' ' << fmt_num(v.service_regular) << ' '
       << fmt_num(v.service_special) << ' ' << fmt_num(v.window_open) << ' '
       << fmt_num(v.window_close) << ' ' << v.mirror << ' ' << fmt_num(v.alpha) << ' '
       << fmt_num(v.beta) << "\n";
  }
  return os.str();
}

Instance Instance::from_text(const std::string& text) {
  std::istringstream is(text);
  std::string line;
  int lineno = 0;
  Instance ins;
  long vertex_count = -1;

  auto next_line = [&]() -> std::optional<std::vector<std::string>> {
    while (std::getline(is, line)) {
      ++lineno;
      if (!line.empty() && line[0] == '#') continue;
      auto toks = split_ws(line);
      if (toks.empty()) continue;
      return toks;
    }
    return std::nullopt;
  };

  auto header = next_line();
  if (!header || header->size() != 2 || (*header)[0] != "VRPSC" || (*header)[1] != "1") {
    throw ParseError(lineno, "expected 'VRPSC 1' header");
  }
  while (vertex_count < 0) {
    auto toks = next_line();
    if (!toks) throw ParseError(lineno, "truncated instance header");
    const std::string& key = (*toks)[0];
    if (toks->size() != 2) throw ParseError(lineno, "expected 'key value'");
    const std::string& val = (*toks)[1];
    try {
      if (key == "name") ins.name_ = val;
      else if (key == "source") ins.source_ = val;
      else if (key == "ns") ins.ns_ = parse_num(val);
      else if (key == "vehicles_regular") ins.vehicles_regular_ = std::stoi(val);
      else if (key == "vehicles_special") ins.vehicles_special_ = std::stoi(val);
      else if (key == "capacity") ins.capacity_ = parse_num(val);
      else if (key == "truncated_distances") ins.truncate_ = std::stoi(val) != 0;
      else if (key == "vertices") vertex_count = std::stol(val);
      else throw ParseError(lineno, "unknown key '" + key + "'");
    } catch (const std::invalid_argument&) {
      throw ParseError(lineno, "bad value for '" + key + "'");
    }
  }
  if (ins.vehicles_regular_ <= 0 || ins.vehicles_special_ <= 0) {
    throw ParseError(lineno, "fleet sizes must be positive");
  }
  for (long i = 0; i < vertex_count; ++i) {
    auto toks = next_line();
    if (!toks) throw ParseError(lineno, "missing vertex row");
    if (toks->size() != 12) throw ParseError(lineno, "vertex row needs 12 fields");
    Vertex v;
    try {
      v.id = std::stoi((*toks)[0]);
      auto kind = vertex_kind_from((*toks)[1]);
      if (!kind) throw ParseError(lineno, "unknown vertex kind '" + (*toks)[1] + "'");
      v.kind = *kind;
      v.x = parse_num((*toks)[2]);
      v.y = parse_num((*toks)[3]);
      v.demand = parse_num((*toks)[4]);
      v.service_regular = parse_num((*toks)[5]);
      v.service_special = parse_num((*toks)[6]);
      v.window_open = parse_num((*toks)[7]);
      v.window_close = parse_num((*toks)[8]);
      v.mirror = std::stoi((*toks)[9]);
      v.alpha = parse_num((*toks)[10]);
      v.beta = parse_num((*toks)[11]);
    } catch (const std::invalid_argument&) {
      throw ParseError(lineno, "non-numeric vertex field");
    }
    if (v.id != static_cast<int>(ins.vertices_.size())) {
      throw ParseError(lineno, "vertex ids must be consecutive from 0");
    }
    ins.vertices_.push_back(v);
  }
  try {
    ins.finalize();
  } catch (const std::invalid_argument& e) {
    throw ParseError(lineno, e.what());
  }
  return ins;
}

}  // namespace vrpsc
