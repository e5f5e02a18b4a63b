#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace evrp {

// Absolute tolerance used for all feasibility comparisons.
inline constexpr double kEps = 1e-6;

enum class NodeKind : uint8_t { depot, customer, station };

enum class CoordMode : uint8_t { cartesian, geographic };

struct Node {
  int id = 0;
  NodeKind kind = NodeKind::customer;
  double delivery = 0.0;  // u
  double pickup = 0.0;    // v
  double tw_open = 0.0;   // e
  double tw_close = 0.0;  // l
  double service = 0.0;   // s
  double px = 0.0;        // x, or longitude in degrees
  double py = 0.0;        // y, or latitude in degrees
};

// Thrown when a route or file is malformed (as opposed to infeasible, which
// is always reported as a value).
struct StructureError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ParseError : std::runtime_error {
  ParseError(const std::string &msg, int line)
      : std::runtime_error(msg + " (line " + std::to_string(line) + ")"), line(line) {}
  int line;
};

// Immutable problem description. Node 0 is the depot, 1..M are customers,
// M+1..M+P are stations. Matrices are dense row-major of side M+P+1.
class Instance {
 public:
  Instance() = default;
  Instance(std::string name, std::vector<Node> nodes, int num_customers, int num_stations,
           std::vector<double> dist, std::vector<double> time, double load_capacity,
           double battery_capacity, double charge_rate, double consume_rate, double dispatch_cost,
           double distance_cost, CoordMode coord_mode, bool triangle_ok);

  const std::string &name() const { return name_; }
  int n() const { return static_cast<int>(nodes_.size()); }
  int num_customers() const { return num_customers_; }
  int num_stations() const { return num_stations_; }
  int depot() const { return 0; }
  int first_station() const { return num_customers_ + 1; }

  const Node &node(int id) const { return nodes_[static_cast<size_t>(id)]; }
  const std::vector<Node> &nodes() const { return nodes_; }
  bool is_depot(int id) const { return id == 0; }
  bool is_customer(int id) const { return nodes_[static_cast<size_t>(id)].kind == NodeKind::customer; }
  bool is_station(int id) const { return nodes_[static_cast<size_t>(id)].kind == NodeKind::station; }

  double dist(int i, int j) const { return dist_[static_cast<size_t>(i) * n_ + j]; }
  double time(int i, int j) const { return time_[static_cast<size_t>(i) * n_ + j]; }
  const std::vector<double> &dist_matrix() const { return dist_; }
  const std::vector<double> &time_matrix() const { return time_; }

  double load_capacity() const { return load_capacity_; }       // C
  double battery_capacity() const { return battery_capacity_; } // Q
  double charge_rate() const { return charge_rate_; }           // g, time per energy unit
  double consume_rate() const { return consume_rate_; }         // h, energy per distance unit
  double dispatch_cost() const { return dispatch_cost_; }       // mu1
  double distance_cost() const { return distance_cost_; }       // mu2
  CoordMode coord_mode() const { return coord_mode_; }
  bool triangle_ok() const { return triangle_ok_; }

  // Greatest distance coverable on a full battery.
  double max_range() const { return battery_capacity_ / consume_rate_; }

  // Cartesian coordinates of a node; geographic instances are projected once
  // at construction.
  double x(int id) const { return xy_[static_cast<size_t>(id) * 2]; }
  double y(int id) const { return xy_[static_cast<size_t>(id) * 2 + 1]; }

  // Raw node/scalar data digest, used to pair solution files with the
  // instance they were produced from.
  uint64_t checksum() const { return checksum_; }

  // Used by preprocessing only.
  void replace_matrices(std::vector<double> dist, std::vector<double> time, bool triangle_ok);

 private:
  void validate() const;
  void project_coordinates();
  void compute_checksum();

  std::string name_;
  std::vector<Node> nodes_;
  int num_customers_ = 0;
  int num_stations_ = 0;
  size_t n_ = 0;
  std::vector<double> dist_;
  std::vector<double> time_;
  std::vector<double> xy_;
  double load_capacity_ = 0.0;
  double battery_capacity_ = 0.0;
  double charge_rate_ = 0.0;
  double consume_rate_ = 0.0;
  double dispatch_cost_ = 0.0;
  double distance_cost_ = 0.0;
  CoordMode coord_mode_ = CoordMode::cartesian;
  bool triangle_ok_ = true;
  uint64_t checksum_ = 0;
};

// Constraint tags, numbered after the model's constraint list.
enum class Constraint : uint8_t {
  depot_endpoints = 6,
  customer_coverage = 7,
  load = 8,
  time_window = 9,
  depot_return = 10,
  battery = 11,
};

struct Violation {
  int route = -1;
  int position = -1;
  Constraint tag = Constraint::battery;
};

// Full evaluation trace of one route; entries are per visit position.
struct RouteEval {
  double td = 0.0;
  std::vector<double> arrive;       // a
  std::vector<double> depart;       // b
  std::vector<double> batt_arrive;  // y
  std::vector<double> batt_depart;  // Y
  std::vector<double> load;
  bool feasible = false;
  std::vector<Violation> violated;  // route index left at -1 for single-route eval
  bool valid = false;               // trace filled in

  bool has(Constraint c) const {
    for (const auto &v : violated)
      if (v.tag == c) return true;
    return false;
  }
};

struct Route {
  std::vector<int> visits;     // first and last are the depot
  std::vector<double> charge;  // parallel to visits; nonzero only at stations
  RouteEval eval;

  Route() = default;
  explicit Route(std::vector<int> v) : visits(std::move(v)), charge(visits.size(), 0.0) {}

  int size() const { return static_cast<int>(visits.size()); }
  bool empty() const { return visits.size() <= 2; }
};

struct Solution {
  std::vector<Route> routes;
  double tc = 0.0;

  int k() const { return static_cast<int>(routes.size()); }
};

struct FeasibilityReport {
  bool depot_endpoints = true;   // (6)
  bool customer_coverage = true; // (7)
  bool load = true;              // (8)
  bool time_window = true;       // (9)
  bool depot_return = true;      // (10)
  bool battery = true;           // (11)
  std::vector<Violation> violations;

  bool feasible() const {
    return depot_endpoints && customer_coverage && load && time_window && depot_return && battery;
  }
};

// Evaluates the route trace and single-route constraints (8)-(11).
// Malformed routes (non-depot endpoints, duplicate customers, charge on a
// non-station) throw StructureError.
RouteEval evaluate_route(const Instance &inst, const Route &route);

// mu1*K + mu2*sum(TD); requires every route evaluated.
double total_cost(const Instance &inst, const Solution &sol);

// Re-derives every trace from scratch and checks constraints (6)-(11).
// Options allow the non-electric variant used by the strip-stations check.
struct FeasibilityOptions {
  bool check_battery = true;
};
FeasibilityReport check_feasibility(const Instance &inst, const Solution &sol,
                                    const FeasibilityOptions &opt = {});

// Removes all station visits (and their charges) from each route.
Route strip_stations(const Instance &inst, const Route &route);
Solution strip_stations(const Instance &inst, const Solution &sol);

}  // namespace evrp
