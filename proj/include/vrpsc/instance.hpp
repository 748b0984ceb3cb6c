#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "vrpsc/numbers.hpp"

namespace vrpsc {

// ---------------------------------------------------------------------------
// Raw VRPTW side (Solomon/Homberger file layout)
// ---------------------------------------------------------------------------

struct RawCustomer {
  int id = 0;  // 0 is the depot
  double x = 0, y = 0;
  double demand = 0;
  double ready = 0, due = 0;
  double service = 0;
};

struct RawVrptw {
  std::string name;
  int vehicles = 0;
  double capacity = 0;
  std::vector<RawCustomer> rows;  // rows[0] is the depot
};

struct ParseError : std::runtime_error {
  int line;
  ParseError(int line_, const std::string& what_)
      : std::runtime_error("line " + std::to_string(line_) + ": " + what_), line(line_) {}
};

RawVrptw parse_vrptw(const std::string& text);
std::string write_vrptw(const RawVrptw& raw);
// Keep the depot plus the first n customers (n <= 0 keeps everything).
RawVrptw take_customers(const RawVrptw& raw, int n);

// ---------------------------------------------------------------------------
// Synchronized instance
// ---------------------------------------------------------------------------

enum class VertexKind {
  depot_start_regular,
  depot_end_regular,
  depot_start_special,
  depot_end_special,
  regular_customer,
  special_copy,      // rides a regular route; carries the customer's window
  special_customer,  // rides a special route; bound to its copy by sync
};

enum class VehicleClass { regular = 0, special = 1 };

const char* to_string(VertexKind k);
std::optional<VertexKind> vertex_kind_from(const std::string& s);

struct Vertex {
  int id = 0;
  VertexKind kind = VertexKind::regular_customer;
  double x = 0, y = 0;
  double demand = 0;
  double service_regular = 0;  // service duration when visited by the regular fleet
  double service_special = 0;  // service duration when visited by the special fleet
  double window_open = 0;
  double window_close = kInf;  // kInf when the vertex has no deadline
  int mirror = -1;             // copy <-> special partner, -1 otherwise
  double alpha = 0, beta = 0;  // sync slack, meaningful on special_customer only

  bool windowed() const { return !is_inf(window_close); }
};

struct TransformOptions {
  double ns = 0.25;       // fraction of customers that become special
  double alpha = 0;       // sync slack below the copy's start time
  double beta = 10;       // sync slack above
  int vehicles_special = 0;  // 0: same size as the regular fleet
  bool truncate_distances = false;  // truncate travel values to one decimal
};

class Instance {
 public:
  Instance() = default;

  // Geometry / data accessors ------------------------------------------------
  const std::vector<Vertex>& vertices() const { return vertices_; }
  const Vertex& vertex(int id) const { return vertices_[id]; }
  int size() const { return static_cast<int>(vertices_.size()); }

  int depot_start(VehicleClass k) const {
    return k == VehicleClass::regular ? 0 : 2;
  }
  int depot_end(VehicleClass k) const {
    return k == VehicleClass::regular ? 1 : 3;
  }

  // Customers of each side, in id order. Regular side = regular customers and
  // special copies; special side = special customers.
  const std::vector<int>& regular_side() const { return regular_side_; }
  const std::vector<int>& special_side() const { return special_side_; }
  const std::vector<int>& regular_customers() const { return regular_customers_; }
  const std::vector<int>& special_customers() const { return special_side_; }

  // Number of transport requests: regular customers plus special pairs.
  int request_count() const {
    return static_cast<int>(regular_customers_.size() + special_side_.size());
  }

  bool on_regular_side(int id) const;
  bool on_special_side(int id) const;

  int vehicles(VehicleClass k) const {
    return k == VehicleClass::regular ? vehicles_regular_ : vehicles_special_;
  }
  double capacity() const { return capacity_; }

  // Travel time (= cost) between two vertices served by class k. Each vertex
  // must belong to that class's side or have its sync twin there (the twin,
  // sharing the location, stands in); anything else is out of domain.
  double travel(VehicleClass k, int a, int b) const;
  // Service duration of vertex a under class k.
  double service(VehicleClass k, int a) const;
  // travel + tail service, the span used in schedule propagation.
  double leg_span(VehicleClass k, int tail, int head) const {
    return service(k, tail) + travel(k, tail, head);
  }

  double max_travel() const { return max_travel_; }
  double max_demand() const { return max_demand_; }

  // Metadata -----------------------------------------------------------------
  const std::string& name() const { return name_; }
  const std::string& source() const { return source_; }
  double ns() const { return ns_; }
  bool truncated() const { return truncate_; }

  // Construction -------------------------------------------------------------
  static Instance transform(const RawVrptw& raw, const TransformOptions& opt);
  static Instance from_text(const std::string& text);
  std::string to_text() const;

  // Which raw customer ids become special for a given fraction; exposed for
  // tests and tooling. Picks ids 1, 1+step, 1+2*step, ... with step = 1/ns.
  static std::vector<int> special_ids(int customer_count, double ns);

 private:
  std::string name_, source_;
  double ns_ = 0;
  bool truncate_ = false;
  int vehicles_regular_ = 0, vehicles_special_ = 0;
  double capacity_ = 0;
  std::vector<Vertex> vertices_;
  std::vector<int> regular_side_, special_side_, regular_customers_;
  std::vector<char> side_mask_;  // bit0: regular side, bit1: special side
  std::vector<double> dist_;     // dense |V|x|V|
  double max_travel_ = 0, max_demand_ = 0;

  void finalize();  // builds side sets, distance matrix, invariant checks
  int side_stand_in(VehicleClass k, int a) const;  // a or its twin on side k
  double& dist_at(int a, int b) { return dist_[static_cast<std::size_t>(a) * vertices_.size() + b]; }
  double dist_at(int a, int b) const { return dist_[static_cast<std::size_t>(a) * vertices_.size() + b]; }
};

}  // namespace vrpsc
