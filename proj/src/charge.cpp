#include "evrp/charge.hpp"

#include <algorithm>
#include <cmath>

namespace evrp {

double PathSegment::td() const {
  double d = 0.0;
  int prev = start;
  for (int c : customers) {
    d += inst->dist(prev, c);
    prev = c;
  }
  d += inst->dist(prev, terminal);
  return d;
}

double minimal_charge(const PathSegment &seg) {
  return std::max(0.0, seg.inst->consume_rate() * seg.td() - seg.arrive_batt);
}

std::pair<double, std::vector<double>> additional_charge(const PathSegment &seg, double q0) {
  const Instance &inst = *seg.inst;
  const double sentinel = inst.node(inst.depot()).tw_close + 1.0;  // stands in for infinity
  double b = seg.arrive_time + inst.charge_rate() * q0;
  double tau = sentinel;
  double slack_time = 0.0;
  std::vector<double> delta;
  delta.reserve(seg.customers.size());
  int prev = seg.start;
  for (int c : seg.customers) {
    const Node &nd = inst.node(c);
    const double a = b + inst.time(prev, c);
    const double d = std::min(tau, std::max(0.0, nd.tw_open - a));
    delta.push_back(d);
    slack_time += d;
    tau = std::min(tau, nd.tw_close - a) - d;
    b = std::max(nd.tw_open, a + d) + nd.service;
    prev = c;
    if (tau <= 1e-12) break;  // every remaining slack is forced to zero
  }
  return {slack_time / inst.charge_rate(), std::move(delta)};
}

ChargePlan charge_amount(const PathSegment &seg) {
  const Instance &inst = *seg.inst;
  const double Q = inst.battery_capacity();
  const double g = inst.charge_rate();
  ChargePlan plan;
  plan.q0 = minimal_charge(seg);
  const double headroom = Q - seg.arrive_batt;
  if (plan.q0 > headroom + kEps) {
    plan.status = ScheduleStatus::battery_capacity;
    return plan;
  }
  auto [q1, delta] = additional_charge(seg, plan.q0);
  plan.q1 = q1;
  plan.delta = std::move(delta);
  plan.q = std::min(plan.q0 + plan.q1, headroom);

  // tau trace re-derived for the record (the recursion may stop early).
  {
    const double sentinel = inst.node(inst.depot()).tw_close + 1.0;
    double b = seg.arrive_time + g * plan.q0;
    double tau = sentinel;
    int prev = seg.start;
    size_t j = 0;
    for (int c : seg.customers) {
      const Node &nd = inst.node(c);
      const double a = b + inst.time(prev, c);
      const double d = j < plan.delta.size() ? plan.delta[j] : 0.0;
      tau = std::min(tau, nd.tw_close - a) - d;
      plan.tau.push_back(tau);
      b = std::max(nd.tw_open, a + d) + nd.service;
      prev = c;
      j++;
    }
  }

  // Actual trace under the final amount; windows are checked here.
  double t = seg.arrive_time + g * plan.q;
  int prev = seg.start;
  for (int c : seg.customers) {
    const Node &nd = inst.node(c);
    t += inst.time(prev, c);
    plan.a_prime.push_back(t);
    if (t > nd.tw_close + kEps) {
      plan.status = ScheduleStatus::time_window;
      return plan;
    }
    t = std::max(t, nd.tw_open) + nd.service;
    plan.b_prime.push_back(t);
    prev = c;
  }
  t += inst.time(prev, seg.terminal);
  if (t > inst.node(seg.terminal).tw_close + kEps) {
    plan.status = ScheduleStatus::time_window;
    return plan;
  }
  return plan;
}

ScheduleStatus schedule_route(const Instance &inst, Route &route) {
  route.charge.assign(route.visits.size(), 0.0);
  route.eval = RouteEval{};

  const auto &v = route.visits;
  const double Q = inst.battery_capacity();
  const double h = inst.consume_rate();
  ScheduleStatus status = ScheduleStatus::ok;
  auto note = [&](ScheduleStatus s) {
    if (status == ScheduleStatus::ok) status = s;
  };

  // Walk segment by segment, carrying arrival time and battery. Infeasible
  // segments do not stop the walk: every station still receives its
  // best-effort amount so the evaluation pinpoints the first violation.
  double t = inst.node(inst.depot()).tw_open;
  double batt = Q;
  size_t seg_start_pos = 0;

  while (seg_start_pos + 1 < v.size()) {
    PathSegment seg;
    seg.inst = &inst;
    seg.start = v[seg_start_pos];
    seg.arrive_time = t;
    seg.arrive_batt = batt;
    size_t pos = seg_start_pos + 1;
    while (pos + 1 < v.size() && !inst.is_station(v[pos])) {
      seg.customers.push_back(v[pos]);
      pos++;
    }
    seg.terminal = v[pos];

    double q = 0.0;
    if (inst.is_station(seg.start)) {
      ChargePlan plan = charge_amount(seg);
      if (plan.status == ScheduleStatus::battery_capacity) {
        // the minimal charge does not fit; fill to capacity and let the
        // downstream violation surface
        q = std::max(0.0, Q - batt);
        note(ScheduleStatus::battery_capacity);
      } else {
        q = plan.q;
        if (plan.status != ScheduleStatus::ok) note(plan.status);
      }
      route.charge[seg_start_pos] = q;
    }

    // Advance the state across the segment under the chosen charge.
    t += inst.charge_rate() * q;
    batt += q;
    int prev = seg.start;
    for (int c : seg.customers) {
      const Node &nd = inst.node(c);
      t += inst.time(prev, c);
      batt -= h * inst.dist(prev, c);
      if (batt < -kEps) note(ScheduleStatus::battery);
      if (t > nd.tw_close + kEps) note(ScheduleStatus::time_window);
      t = std::max(t, nd.tw_open) + nd.service;
      prev = c;
    }
    t += inst.time(prev, seg.terminal);
    batt -= h * inst.dist(prev, seg.terminal);
    if (batt < -kEps) note(ScheduleStatus::battery);
    if (t > inst.node(seg.terminal).tw_close + kEps) note(ScheduleStatus::time_window);
    seg_start_pos = pos;
  }

  route.eval = evaluate_route(inst, route);
  if (route.eval.has(Constraint::load)) {
    if (status == ScheduleStatus::ok) status = ScheduleStatus::capacity;
  } else if (status != ScheduleStatus::ok && route.eval.feasible) {
    status = ScheduleStatus::ok;  // epsilon-boundary disagreement; trust the trace
  } else if (status == ScheduleStatus::ok && !route.eval.feasible) {
    status = route.eval.has(Constraint::battery) ? ScheduleStatus::battery
                                                 : ScheduleStatus::time_window;
  }
  return status;
}

}  // namespace evrp
