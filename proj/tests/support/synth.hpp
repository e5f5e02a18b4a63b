#pragma once

// Small synthetic instances and randomized routes/solutions shared across
// the test suites.

#include <algorithm>
#include <cmath>
#include <vector>

#include "evrp/charge.hpp"
#include "evrp/model.hpp"
#include "evrp/pssi.hpp"
#include "evrp/preprocess.hpp"
#include "evrp/rng.hpp"
#include "support/oracles.hpp"

namespace synth {

using namespace evrp;

struct NodeSpec {
  double x = 0, y = 0;
  double u = 0, v = 0;
  double e = 0, l = 1000, s = 0;
};

// Cartesian instance from explicit node specs (Euclidean distances,
// travel time == distance).
inline Instance make_instance(const NodeSpec &depot, const std::vector<NodeSpec> &customers,
                              const std::vector<NodeSpec> &stations, double C, double Q, double g,
                              double h, double mu1 = 1000.0, double mu2 = 1.0,
                              const std::string &name = "synth") {
  std::vector<Node> nodes;
  auto push = [&](const NodeSpec &sp, NodeKind k) {
    Node nd;
    nd.id = static_cast<int>(nodes.size());
    nd.kind = k;
    nd.px = sp.x;
    nd.py = sp.y;
    nd.delivery = k == NodeKind::customer ? sp.u : 0.0;
    nd.pickup = k == NodeKind::customer ? sp.v : 0.0;
    nd.service = k == NodeKind::customer ? sp.s : 0.0;
    nd.tw_open = k == NodeKind::customer ? sp.e : depot.e;
    nd.tw_close = k == NodeKind::customer ? sp.l : depot.l;
    nodes.push_back(nd);
  };
  push(depot, NodeKind::depot);
  for (const auto &c : customers) push(c, NodeKind::customer);
  for (const auto &s : stations) push(s, NodeKind::station);

  const size_t n = nodes.size();
  std::vector<double> dist(n * n, 0.0), time(n * n, 0.0);
  for (size_t i = 0; i < n; i++)
    for (size_t j = 0; j < n; j++) {
      if (i == j) continue;
      const double dx = nodes[i].px - nodes[j].px;
      const double dy = nodes[i].py - nodes[j].py;
      const double d = std::sqrt(dx * dx + dy * dy);
      dist[i * n + j] = d;
      time[i * n + j] = d;
    }
  return Instance(name, std::move(nodes), static_cast<int>(customers.size()),
                  static_cast<int>(stations.size()), std::move(dist), std::move(time), C, Q, g, h,
                  mu1, mu2, CoordMode::cartesian, true);
}

struct RandomOpts {
  int customers = 5;
  int stations = 2;
  double box = 20.0;
  double capacity = 100.0;
  double battery_factor = 0.9;  // Q as a fraction of the max solo round trip
  double horizon = 200.0;
  bool tight_windows = false;
  double mu1 = 1000.0, mu2 = 1.0;
};

inline Instance random_instance(uint64_t seed, const RandomOpts &opt = {}) {
  Rng rng(seed);
  NodeSpec depot;
  depot.x = opt.box / 2;
  depot.y = opt.box / 2;
  depot.e = 0;
  depot.l = opt.horizon;

  std::vector<NodeSpec> customers, stations;
  double max_round = 0.0;
  for (int i = 0; i < opt.customers; i++) {
    NodeSpec c;
    c.x = rng.real(0, opt.box);
    c.y = rng.real(0, opt.box);
    c.u = std::floor(rng.real(0, 30));
    c.v = std::floor(rng.real(0, 20));
    const double span = opt.tight_windows ? 0.15 : 0.4;
    c.e = std::floor(rng.real(0, opt.horizon * 0.5));
    c.l = std::min(opt.horizon, c.e + std::floor(rng.real(opt.horizon * 0.1, opt.horizon * span)));
    c.s = 5;
    customers.push_back(c);
    const double d = std::hypot(c.x - depot.x, c.y - depot.y);
    max_round = std::max(max_round, 2 * d);
  }
  for (int i = 0; i < opt.stations; i++) {
    NodeSpec s;
    s.x = rng.real(0, opt.box);
    s.y = rng.real(0, opt.box);
    stations.push_back(s);
  }
  const double Q = std::max(1.0, opt.battery_factor * max_round);
  return make_instance(depot, customers, stations, opt.capacity, Q, 2.0, 1.0, opt.mu1, opt.mu2,
                       "rand" + std::to_string(seed));
}

// Random instance where every customer admits a feasible one-customer route
// (so a feasible solution always exists). Deterministic in `seed`.
inline Instance random_feasible_instance(uint64_t seed, RandomOpts opt = {}) {
  for (uint64_t attempt = 0;; attempt++) {
    Instance inst = random_instance(seed * 1000003ULL + attempt, opt);
    bool ok = true;
    for (int c = 1; c <= inst.num_customers() && ok; c++)
      ok = oracle::best_route_distance(inst, {c}, 2) < oracle::kInf;
    if (ok) return inst;
  }
}

// Random feasible solution built by shuffling customers into routes and
// fixing electricity greedily; the caller gets variety, the validator gets a
// workout.
inline Solution random_feasible_solution(const Instance &inst, const StationRanking &ranking,
                                         Rng &rng) {
  std::vector<int> order;
  for (int c = 1; c <= inst.num_customers(); c++) order.push_back(c);
  rng.shuffle(order);

  Solution sol;
  Route cur(std::vector<int>{0, 0});
  schedule_route(inst, cur);
  for (int c : order) {
    Route cand;
    cand.visits = cur.visits;
    const int pos = cur.size() - 1;
    cand.visits.insert(cand.visits.begin() + pos, c);
    bool placed = false;
    if (rng.chance(0.7)) {  // sometimes force a fresh route for variety
      if (schedule_route(inst, cand) == ScheduleStatus::ok) {
        cur = cand;
        placed = true;
      } else if (auto fixed = ssi_fix(inst, ranking, cand)) {
        cur = *fixed;
        placed = true;
      }
    }
    if (!placed) {
      if (cur.size() > 2) sol.routes.push_back(cur);
      Route fresh(std::vector<int>{0, c, 0});
      if (schedule_route(inst, fresh) == ScheduleStatus::ok) {
        cur = fresh;
      } else {
        auto fixed = ssi_fix(inst, ranking, fresh);
        if (!fixed)
          throw std::runtime_error("synth: solo route for customer " + std::to_string(c) +
                                   " could not be fixed");
        cur = *fixed;
      }
    }
  }
  if (cur.size() > 2) sol.routes.push_back(cur);
  double tc = 0.0;
  for (Route &r : sol.routes) {
    schedule_route(inst, r);
    tc += inst.dispatch_cost() + inst.distance_cost() * r.eval.td;
  }
  sol.tc = tc;
  return sol;
}

}  // namespace synth
