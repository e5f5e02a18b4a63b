#include "evrp/construct.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace evrp {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

double route_cost(const Instance &inst, const Route &r) {
  if (r.empty()) return 0.0;
  return inst.dispatch_cost() + inst.distance_cost() * r.eval.td;
}

void refresh_cost(const Instance &inst, Solution &sol) {
  sol.routes.erase(std::remove_if(sol.routes.begin(), sol.routes.end(),
                                  [](const Route &r) { return r.empty(); }),
                   sol.routes.end());
  double tc = 0.0;
  for (const Route &r : sol.routes) tc += route_cost(inst, r);
  sol.tc = tc;
}

InsertionOutcome try_insert(const Instance &inst, const StationRanking &ranking, const Route &r,
                            int customer, int pos) {
  InsertionOutcome out;
  Route cand;
  cand.visits = r.visits;
  cand.visits.insert(cand.visits.begin() + pos, customer);
  const ScheduleStatus st = schedule_route(inst, cand);
  if (st == ScheduleStatus::ok) {
    out.ok = true;
    out.route = std::move(cand);
  } else if (st == ScheduleStatus::battery || st == ScheduleStatus::battery_capacity) {
    if (auto fixed = ssi_fix(inst, ranking, cand)) {
      out.ok = true;
      out.route = std::move(*fixed);
    }
  }
  if (out.ok) {
    Route base = r;
    if (!base.eval.valid) schedule_route(inst, base);
    out.delta = route_cost(inst, out.route) - route_cost(inst, base);
  }
  return out;
}

namespace {

// Fresh one-customer route, electricity fixed if needed.
InsertionOutcome fresh_route(const Instance &inst, const StationRanking &ranking, int customer) {
  Route empty(std::vector<int>{inst.depot(), inst.depot()});
  return try_insert(inst, ranking, empty, customer, 1);
}

double max_arrival_load(const Route &r) {
  double m = 0.0;
  for (double v : r.eval.load) m = std::max(m, v);
  return m;
}

// Residual capacity and radial surcharge criterion for inserting `customer`
// into the scheduled candidate route.
double rcrs_value(const Instance &inst, const RcrsParams &p, const Route &cand, int customer,
                  double detour) {
  const double residual = inst.load_capacity() - max_arrival_load(cand);
  return detour - p.lambda * residual + p.gamma * inst.dist(inst.depot(), customer);
}

}  // namespace

Solution rcrs_construct(const Instance &inst, const StationRanking &ranking,
                        const RcrsParams &params, Rng &rng) {
  std::vector<int> unassigned(static_cast<size_t>(inst.num_customers()));
  std::iota(unassigned.begin(), unassigned.end(), 1);

  Solution sol;
  while (!unassigned.empty()) {
    // Seed a new route with a random unassigned customer.
    const int seed_idx = rng.below(static_cast<int>(unassigned.size()));
    const int seed = unassigned[static_cast<size_t>(seed_idx)];
    InsertionOutcome first = fresh_route(inst, ranking, seed);
    if (!first.ok)
      throw InstanceInfeasible("customer " + std::to_string(seed) +
                               " cannot be served by a fresh vehicle");
    unassigned.erase(unassigned.begin() + seed_idx);
    Route route = std::move(first.route);

    // Fill the route: feasible-as-is insertions take priority over ones that
    // need a station fix.
    while (!unassigned.empty()) {
      double best_value = kInf;
      int best_idx = -1;
      bool best_plain = false;
      InsertionOutcome best;
      for (size_t ui = 0; ui < unassigned.size(); ui++) {
        const int u = unassigned[ui];
        for (int pos = 1; pos < route.size(); pos++) {
          Route cand;
          cand.visits = route.visits;
          cand.visits.insert(cand.visits.begin() + pos, u);
          const ScheduleStatus st = schedule_route(inst, cand);
          bool plain = st == ScheduleStatus::ok;
          if (!plain) {
            if (st != ScheduleStatus::battery && st != ScheduleStatus::battery_capacity) continue;
            auto fixed = ssi_fix(inst, ranking, cand);
            if (!fixed) continue;
            cand = std::move(*fixed);
          }
          const double detour = inst.dist(route.visits[static_cast<size_t>(pos - 1)], u) +
                                inst.dist(u, route.visits[static_cast<size_t>(pos)]) -
                                inst.dist(route.visits[static_cast<size_t>(pos - 1)],
                                          route.visits[static_cast<size_t>(pos)]);
          const double value = rcrs_value(inst, params, cand, u, detour);
          const bool better = (plain && !best_plain) ||
                              (plain == best_plain && value < best_value - kEps);
          if (better) {
            best_value = value;
            best_idx = static_cast<int>(ui);
            best_plain = plain;
            best.ok = true;
            best.route = std::move(cand);
          }
        }
      }
      if (best_idx < 0) break;  // no candidate fits this route
      route = std::move(best.route);
      unassigned.erase(unassigned.begin() + best_idx);
    }
    sol.routes.push_back(std::move(route));
  }
  refresh_cost(inst, sol);
  return sol;
}

Solution regret_insert(const Instance &inst, const StationRanking &ranking, Solution partial,
                       std::vector<int> unassigned, Rng &rng) {
  (void)rng;
  for (Route &r : partial.routes)
    if (!r.eval.valid) schedule_route(inst, r);

  struct Best {
    double delta = kInf;
    int pos = -1;
  };
  const size_t U = unassigned.size();
  // per customer, per route: best insertion
  std::vector<std::vector<Best>> table(U);
  std::vector<char> done(U, 0);

  auto scan_route = [&](size_t ui, size_t ri) {
    const int u = unassigned[ui];
    const Route &r = partial.routes[ri];
    Best b;
    for (int pos = 1; pos < r.size(); pos++) {
      InsertionOutcome oc = try_insert(inst, ranking, r, u, pos);
      if (oc.ok && oc.delta < b.delta - kEps) {
        b.delta = oc.delta;
        b.pos = pos;
      }
    }
    table[ui][ri] = b;
  };

  for (size_t ui = 0; ui < U; ui++) {
    table[ui].resize(partial.routes.size());
    for (size_t ri = 0; ri < partial.routes.size(); ri++) scan_route(ui, ri);
  }

  size_t remaining = U;
  while (remaining > 0) {
    // Customers with no feasible position anywhere must open a route now.
    int open_ui = -1;
    double open_cost = kInf;
    InsertionOutcome open_oc;
    for (size_t ui = 0; ui < U; ui++) {
      if (done[ui]) continue;
      bool any = false;
      for (const Best &b : table[ui])
        if (b.pos >= 0) any = true;
      if (any) continue;
      InsertionOutcome oc = fresh_route(inst, ranking, unassigned[ui]);
      if (!oc.ok)
        throw InstanceInfeasible("customer " + std::to_string(unassigned[ui]) +
                                 " cannot be served by a fresh vehicle");
      if (oc.delta < open_cost - kEps) {
        open_cost = oc.delta;
        open_ui = static_cast<int>(ui);
        open_oc = std::move(oc);
      }
    }
    if (open_ui >= 0) {
      partial.routes.push_back(std::move(open_oc.route));
      done[static_cast<size_t>(open_ui)] = 1;
      remaining--;
      const size_t new_ri = partial.routes.size() - 1;
      for (size_t ui = 0; ui < U; ui++) {
        if (done[ui]) continue;
        table[ui].resize(partial.routes.size());
        scan_route(ui, new_ri);
      }
      continue;
    }

    // Largest 2-regret across routes; ties prefer the cheaper insertion,
    // then the lower customer id.
    int pick = -1;
    double pick_regret = -kInf, pick_best = kInf;
    int pick_route = -1;
    for (size_t ui = 0; ui < U; ui++) {
      if (done[ui]) continue;
      double best = kInf, second = kInf;
      int best_ri = -1;
      for (size_t ri = 0; ri < table[ui].size(); ri++) {
        const Best &b = table[ui][ri];
        if (b.pos < 0) continue;
        if (b.delta < best - kEps) {
          second = best;
          best = b.delta;
          best_ri = static_cast<int>(ri);
        } else if (b.delta < second - kEps) {
          second = b.delta;
        }
      }
      const double regret = second == kInf ? 0.0 : second - best;
      bool better;
      if (regret > pick_regret + kEps)
        better = true;
      else if (regret < pick_regret - kEps)
        better = false;
      else if (best < pick_best - kEps)
        better = true;
      else if (best > pick_best + kEps)
        better = false;
      else
        better = pick >= 0 && unassigned[ui] < unassigned[static_cast<size_t>(pick)];
      if (pick < 0 || better) {
        pick = static_cast<int>(ui);
        pick_regret = regret;
        pick_best = best;
        pick_route = best_ri;
      }
    }

    const int u = unassigned[static_cast<size_t>(pick)];
    const Best &b = table[static_cast<size_t>(pick)][static_cast<size_t>(pick_route)];
    InsertionOutcome oc = try_insert(inst, ranking, partial.routes[static_cast<size_t>(pick_route)],
                                     u, b.pos);
    if (!oc.ok) {
      // position went stale against an epsilon boundary; rescan this customer
      scan_route(static_cast<size_t>(pick), static_cast<size_t>(pick_route));
      continue;
    }
    partial.routes[static_cast<size_t>(pick_route)] = std::move(oc.route);
    done[static_cast<size_t>(pick)] = 1;
    remaining--;
    for (size_t ui = 0; ui < U; ui++) {
      if (done[ui]) continue;
      scan_route(ui, static_cast<size_t>(pick_route));
    }
  }
  refresh_cost(inst, partial);
  return partial;
}

Solution destroy_repair(const Instance &inst, const StationRanking &ranking, const Solution &sol,
                        const DestroyParams &params, Rng &rng) {
  const int M = inst.num_customers();
  int lo = std::max(1, static_cast<int>(std::ceil(params.omega1 * M)));
  int hi = std::max(lo, static_cast<int>(std::floor(params.omega2 * M)));
  lo = std::min(lo, M);
  hi = std::min(hi, M);
  const int rho = rng.range(lo, hi);

  // Seed customer plus its rho-1 nearest customers.
  const int seed = 1 + rng.below(M);
  std::vector<int> order(static_cast<size_t>(M));
  std::iota(order.begin(), order.end(), 1);
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    const double da = inst.dist(seed, a), db = inst.dist(seed, b);
    if (da != db) return da < db;
    return a < b;
  });
  std::vector<char> removed(static_cast<size_t>(inst.n()), 0);
  std::vector<int> removed_list;
  for (int i = 0; i < rho; i++) {
    removed[static_cast<size_t>(order[static_cast<size_t>(i)])] = 1;
    removed_list.push_back(order[static_cast<size_t>(i)]);
  }

  Solution partial;
  for (const Route &r : sol.routes) {
    bool touched = false;
    Route nr;
    for (size_t i = 0; i < r.visits.size(); i++) {
      const int id = r.visits[i];
      if (inst.is_customer(id) && removed[static_cast<size_t>(id)]) {
        touched = true;
        continue;
      }
      nr.visits.push_back(id);
    }
    if (!touched) {
      partial.routes.push_back(r);
      continue;
    }
    if (nr.size() <= 2) continue;  // route emptied
    // Re-place stations from scratch on the shortened route.
    Route stripped = strip_stations(inst, nr);
    if (schedule_route(inst, stripped) == ScheduleStatus::ok) {
      partial.routes.push_back(std::move(stripped));
    } else if (auto fixed = ssi_fix(inst, ranking, stripped)) {
      partial.routes.push_back(std::move(*fixed));
    } else {
      nr.charge.assign(nr.visits.size(), 0.0);
      if (schedule_route(inst, nr) == ScheduleStatus::ok) {
        partial.routes.push_back(std::move(nr));
      } else {
        return sol;  // cannot rebuild this route; perturbation is best-effort
      }
    }
  }

  try {
    return regret_insert(inst, ranking, std::move(partial), std::move(removed_list), rng);
  } catch (const InstanceInfeasible &) {
    return sol;
  }
}

}  // namespace evrp
