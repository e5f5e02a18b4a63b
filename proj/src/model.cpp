#include "evrp/model.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>

#include "evrp/preprocess.hpp"

namespace evrp {

Instance::Instance(std::string name, std::vector<Node> nodes, int num_customers, int num_stations,
                   std::vector<double> dist, std::vector<double> time, double load_capacity,
                   double battery_capacity, double charge_rate, double consume_rate,
                   double dispatch_cost, double distance_cost, CoordMode coord_mode,
                   bool triangle_ok)
    : name_(std::move(name)),
      nodes_(std::move(nodes)),
      num_customers_(num_customers),
      num_stations_(num_stations),
      n_(nodes_.size()),
      dist_(std::move(dist)),
      time_(std::move(time)),
      load_capacity_(load_capacity),
      battery_capacity_(battery_capacity),
      charge_rate_(charge_rate),
      consume_rate_(consume_rate),
      dispatch_cost_(dispatch_cost),
      distance_cost_(distance_cost),
      coord_mode_(coord_mode),
      triangle_ok_(triangle_ok) {
  validate();
  project_coordinates();
  compute_checksum();
}

void Instance::validate() const {
  const size_t n = nodes_.size();
  if (n == 0 || n != static_cast<size_t>(num_customers_ + num_stations_ + 1))
    throw StructureError("node count does not match customer/station counts");
  if (dist_.size() != n * n || time_.size() != n * n)
    throw StructureError("matrix size does not match node count");
  if (load_capacity_ <= 0 || battery_capacity_ <= 0 || charge_rate_ <= 0 || consume_rate_ <= 0)
    throw StructureError("capacities and rates must be positive");
  if (dispatch_cost_ < 0 || distance_cost_ < 0)
    throw StructureError("cost coefficients must be nonnegative");
  for (size_t i = 0; i < n; i++) {
    if (dist_[i * n + i] != 0.0 || time_[i * n + i] != 0.0)
      throw StructureError("matrix diagonal must be zero");
    for (size_t j = 0; j < n; j++) {
      if (dist_[i * n + j] < 0 || time_[i * n + j] < 0)
        throw StructureError("matrix entries must be nonnegative");
    }
  }
  const Node &d = nodes_[0];
  if (d.kind != NodeKind::depot || d.delivery != 0 || d.pickup != 0 || d.service != 0)
    throw StructureError("node 0 must be a depot with zero demands and service");
  for (size_t i = 0; i < n; i++) {
    const Node &nd = nodes_[i];
    if (nd.id != static_cast<int>(i)) throw StructureError("node ids must be contiguous");
    if (nd.tw_open > nd.tw_close) throw StructureError("time window open exceeds close");
    if (nd.delivery < 0 || nd.pickup < 0 || nd.service < 0)
      throw StructureError("demands and service times must be nonnegative");
    const bool want_customer = i >= 1 && i <= static_cast<size_t>(num_customers_);
    if (want_customer && nd.kind != NodeKind::customer)
      throw StructureError("ids 1..M must be customers");
    if (!want_customer && i > 0 && nd.kind != NodeKind::station)
      throw StructureError("ids M+1..M+P must be stations");
    if (nd.kind == NodeKind::station) {
      if (nd.delivery != 0 || nd.pickup != 0 || nd.service != 0)
        throw StructureError("stations must have zero demands and service");
      if (nd.tw_open != d.tw_open || nd.tw_close != d.tw_close)
        throw StructureError("station time windows must equal the depot's");
    }
  }
}

void Instance::project_coordinates() {
  xy_.resize(n_ * 2);
  for (size_t i = 0; i < n_; i++) {
    if (coord_mode_ == CoordMode::geographic) {
      auto [x, y] = mercator_project(nodes_[i].px, nodes_[i].py);
      xy_[i * 2] = x;
      xy_[i * 2 + 1] = y;
    } else {
      xy_[i * 2] = nodes_[i].px;
      xy_[i * 2 + 1] = nodes_[i].py;
    }
  }
}

namespace {

inline uint64_t fnv1a(uint64_t h, const void *data, size_t len) {
  const auto *p = static_cast<const unsigned char *>(data);
  for (size_t i = 0; i < len; i++) {
    h ^= p[i];
    h *= 0x100000001b3ULL;
  }
  return h;
}

inline uint64_t fnv1a_double(uint64_t h, double v) {
  // Normalize -0.0 so equal values hash equally.
  if (v == 0.0) v = 0.0;
  uint64_t bits;
  std::memcpy(&bits, &v, sizeof bits);
  return fnv1a(h, &bits, sizeof bits);
}

}  // namespace

void Instance::compute_checksum() {
  uint64_t h = 0xcbf29ce484222325ULL;
  h = fnv1a(h, name_.data(), name_.size());
  const int counts[2] = {num_customers_, num_stations_};
  h = fnv1a(h, counts, sizeof counts);
  for (const Node &nd : nodes_) {
    h = fnv1a_double(h, nd.delivery);
    h = fnv1a_double(h, nd.pickup);
    h = fnv1a_double(h, nd.tw_open);
    h = fnv1a_double(h, nd.tw_close);
    h = fnv1a_double(h, nd.service);
    h = fnv1a_double(h, nd.px);
    h = fnv1a_double(h, nd.py);
  }
  for (double v : dist_) h = fnv1a_double(h, v);
  for (double v : time_) h = fnv1a_double(h, v);
  for (double v : {load_capacity_, battery_capacity_, charge_rate_, consume_rate_, dispatch_cost_,
                   distance_cost_})
    h = fnv1a_double(h, v);
  checksum_ = h;
}

void Instance::replace_matrices(std::vector<double> dist, std::vector<double> time,
                                bool triangle_ok) {
  if (dist.size() != n_ * n_ || time.size() != n_ * n_)
    throw StructureError("matrix size does not match node count");
  dist_ = std::move(dist);
  time_ = std::move(time);
  triangle_ok_ = triangle_ok;
  compute_checksum();
}

namespace {

void check_route_structure(const Instance &inst, const Route &route) {
  const auto &v = route.visits;
  if (v.size() < 2) throw StructureError("route must contain at least the two depot endpoints");
  if (v.front() != inst.depot() || v.back() != inst.depot())
    throw StructureError("route must start and end at the depot");
  if (route.charge.size() != v.size())
    throw StructureError("charge vector must parallel the visit sequence");
  std::vector<char> seen(static_cast<size_t>(inst.n()), 0);
  for (size_t i = 0; i < v.size(); i++) {
    const int id = v[i];
    if (id < 0 || id >= inst.n()) throw StructureError("route references unknown node id");
    if (i > 0 && i + 1 < v.size() && inst.is_depot(id))
      throw StructureError("depot may not appear strictly inside a route");
    if (inst.is_customer(id)) {
      if (seen[static_cast<size_t>(id)]) throw StructureError("duplicate customer in route");
      seen[static_cast<size_t>(id)] = 1;
    }
    if (route.charge[i] != 0.0 && !inst.is_station(id))
      throw StructureError("charge amount on a non-station visit");
    if (route.charge[i] < 0.0) throw StructureError("negative charge amount");
  }
}

}  // namespace

RouteEval evaluate_route(const Instance &inst, const Route &route) {
  check_route_structure(inst, route);
  const auto &v = route.visits;
  const size_t L = v.size();
  const double Q = inst.battery_capacity();
  const double C = inst.load_capacity();
  const double g = inst.charge_rate();
  const double h = inst.consume_rate();
  const Node &depot = inst.node(inst.depot());

  RouteEval ev;
  ev.valid = true;
  ev.arrive.resize(L);
  ev.depart.resize(L);
  ev.batt_arrive.resize(L);
  ev.batt_depart.resize(L);
  ev.load.resize(L);

  double total_delivery = 0.0;
  for (int id : v) total_delivery += inst.node(id).delivery;

  ev.arrive[0] = depot.tw_open;
  ev.depart[0] = depot.tw_open;  // b at the first depot is e_0
  ev.batt_arrive[0] = Q;
  ev.batt_depart[0] = Q;
  ev.load[0] = total_delivery;

  auto flag = [&](int pos, Constraint c) { ev.violated.push_back({-1, pos, c}); };

  if (total_delivery > C + kEps) flag(0, Constraint::load);

  for (size_t j = 1; j < L; j++) {
    const int prev = v[j - 1];
    const int cur = v[j];
    const Node &nd = inst.node(cur);

    ev.arrive[j] = ev.depart[j - 1] + inst.time(prev, cur);
    ev.batt_arrive[j] = ev.batt_depart[j - 1] - h * inst.dist(prev, cur);
    ev.load[j] = ev.load[j - 1] - inst.node(prev).delivery + inst.node(prev).pickup;
    ev.td += inst.dist(prev, cur);

    if (ev.load[j] > C + kEps || ev.load[j] < -kEps) flag(static_cast<int>(j), Constraint::load);
    if (ev.batt_arrive[j] < -kEps) flag(static_cast<int>(j), Constraint::battery);

    if (inst.is_station(cur)) {
      const double q = route.charge[j];
      ev.batt_depart[j] = ev.batt_arrive[j] + q;
      ev.depart[j] = ev.arrive[j] + g * q;  // no waiting at stations
      if (ev.batt_depart[j] > Q + kEps) flag(static_cast<int>(j), Constraint::battery);
      if (ev.arrive[j] > nd.tw_close + kEps) flag(static_cast<int>(j), Constraint::time_window);
    } else {
      ev.batt_depart[j] = ev.batt_arrive[j];
      ev.depart[j] = std::max(ev.arrive[j], nd.tw_open) + nd.service;
      if (j + 1 == L) {
        if (ev.arrive[j] > depot.tw_close + kEps) flag(static_cast<int>(j), Constraint::depot_return);
      } else if (ev.arrive[j] > nd.tw_close + kEps) {
        flag(static_cast<int>(j), Constraint::time_window);
      }
    }
  }
  ev.feasible = ev.violated.empty();
  return ev;
}

double total_cost(const Instance &inst, const Solution &sol) {
  double td = 0.0;
  for (const Route &r : sol.routes) {
    if (!r.eval.valid) throw StructureError("total_cost requires evaluated routes");
    td += r.eval.td;
  }
  return inst.dispatch_cost() * static_cast<double>(sol.routes.size()) +
         inst.distance_cost() * td;
}

FeasibilityReport check_feasibility(const Instance &inst, const Solution &sol,
                                    const FeasibilityOptions &opt) {
  FeasibilityReport rep;
  const double Q = inst.battery_capacity();
  const double C = inst.load_capacity();
  const double g = inst.charge_rate();
  const double h = inst.consume_rate();
  const Node &depot = inst.node(inst.depot());

  std::vector<int> count(static_cast<size_t>(inst.n()), 0);

  for (size_t ri = 0; ri < sol.routes.size(); ri++) {
    const Route &r = sol.routes[ri];
    const auto &v = r.visits;
    auto flag = [&](int pos, Constraint c, bool &ok) {
      ok = false;
      rep.violations.push_back({static_cast<int>(ri), pos, c});
    };

    if (v.size() < 2 || v.front() != inst.depot() || v.back() != inst.depot()) {
      flag(0, Constraint::depot_endpoints, rep.depot_endpoints);
      continue;
    }
    for (size_t j = 1; j + 1 < v.size(); j++) {
      if (inst.is_depot(v[j])) flag(static_cast<int>(j), Constraint::depot_endpoints, rep.depot_endpoints);
      if (inst.is_customer(v[j])) count[static_cast<size_t>(v[j])]++;
    }

    double load = 0.0;
    for (int id : v) load += inst.node(id).delivery;
    if (load > C + kEps || load < -kEps) flag(0, Constraint::load, rep.load);

    double t = depot.tw_open;
    double batt = Q;
    for (size_t j = 1; j < v.size(); j++) {
      const int prev = v[j - 1];
      const int cur = v[j];
      const Node &nd = inst.node(cur);
      t += inst.time(prev, cur);
      batt -= h * inst.dist(prev, cur);
      load = load - inst.node(prev).delivery + inst.node(prev).pickup;

      if (load > C + kEps || load < -kEps) flag(static_cast<int>(j), Constraint::load, rep.load);
      if (opt.check_battery && batt < -kEps) flag(static_cast<int>(j), Constraint::battery, rep.battery);

      if (inst.is_station(cur)) {
        const double q = j < r.charge.size() ? r.charge[j] : 0.0;
        if (t > nd.tw_close + kEps) flag(static_cast<int>(j), Constraint::time_window, rep.time_window);
        if (opt.check_battery) {
          batt += q;
          if (batt > Q + kEps || q < 0) flag(static_cast<int>(j), Constraint::battery, rep.battery);
        }
        t += g * q;
      } else if (j + 1 == v.size()) {
        if (t > depot.tw_close + kEps) flag(static_cast<int>(j), Constraint::depot_return, rep.depot_return);
      } else {
        if (t > nd.tw_close + kEps) flag(static_cast<int>(j), Constraint::time_window, rep.time_window);
        t = std::max(t, nd.tw_open) + nd.service;
      }
    }
  }

  for (int c = 1; c <= inst.num_customers(); c++) {
    if (count[static_cast<size_t>(c)] != 1) {
      rep.customer_coverage = false;
      rep.violations.push_back({-1, c, Constraint::customer_coverage});
    }
  }
  return rep;
}

Route strip_stations(const Instance &inst, const Route &route) {
  Route out;
  out.visits.reserve(route.visits.size());
  for (int id : route.visits)
    if (!inst.is_station(id)) out.visits.push_back(id);
  out.charge.assign(out.visits.size(), 0.0);
  return out;
}

Solution strip_stations(const Instance &inst, const Solution &sol) {
  Solution out;
  out.routes.reserve(sol.routes.size());
  for (const Route &r : sol.routes) out.routes.push_back(strip_stations(inst, r));
  return out;
}

}  // namespace evrp
