#include "doctest.h"

#include <cmath>

#include "evrp/charge.hpp"
#include "evrp/preprocess.hpp"
#include "support/oracles.hpp"
#include "support/synth.hpp"

using namespace evrp;

namespace {

PathSegment make_segment(const Instance &inst, int start, double a, double y,
                         std::vector<int> customers, int terminal) {
  PathSegment seg;
  seg.inst = &inst;
  seg.start = start;
  seg.arrive_time = a;
  seg.arrive_batt = y;
  seg.customers = std::move(customers);
  seg.terminal = terminal;
  return seg;
}

// Brute-force reference: the largest grid charge that keeps the segment
// battery- and window-feasible without delaying the arrival at the terminal
// beyond what the minimal charge alone would give.
double grid_best_q(const PathSegment &seg, double step = 1e-3) {
  const Instance &inst = *seg.inst;
  const double Q = inst.battery_capacity();
  const double g = inst.charge_rate();
  const double h = inst.consume_rate();

  // returns the arrival time at the terminal, or -1 when infeasible
  auto simulate = [&](double q) {
    double t = seg.arrive_time + g * q;
    double batt = seg.arrive_batt + q;
    if (batt > Q + kEps) return -1.0;
    int prev = seg.start;
    for (int c : seg.customers) {
      const Node &nd = inst.node(c);
      t += inst.time(prev, c);
      batt -= h * inst.dist(prev, c);
      if (batt < -kEps) return -1.0;
      if (t > nd.tw_close + kEps) return -1.0;
      t = std::max(t, nd.tw_open) + nd.service;
      prev = c;
    }
    t += inst.time(prev, seg.terminal);
    batt -= h * inst.dist(prev, seg.terminal);
    if (batt < -kEps) return -1.0;
    if (t > inst.node(seg.terminal).tw_close + kEps) return -1.0;
    return t;
  };

  const double q0 = minimal_charge(seg);
  const double base_arrival = simulate(q0);
  if (base_arrival < 0) return -1.0;

  // grid anchored at the minimal charge, capped at the battery headroom
  const double q_cap = Q - seg.arrive_batt;
  double best = -1.0;
  for (double q = q0;; q += step) {
    const double qq = std::min(q, q_cap);
    const double arrival = simulate(qq);
    if (arrival >= 0 && arrival <= base_arrival + 1e-9) best = qq;
    if (q >= q_cap) break;
  }
  return best;
}

}  // namespace

TEST_CASE("minimal charge clamps at zero and follows the formula") {
  Instance inst = synth::make_instance({0, 0, 0, 0, 0, 1000}, {{7, 0, 1, 1, 0, 1000, 0}},
                                       {{1, 0}}, 50, 50, 1, 1);
  // segment: station(2) -> customer(1) -> depot, distance 6 + 7 = 13
  auto seg = make_segment(inst, 2, 10.0, 20.0, {1}, 0);
  CHECK(minimal_charge(seg) == doctest::Approx(0.0));
  seg.arrive_batt = 0.0;
  CHECK(minimal_charge(seg) == doctest::Approx(13.0));
  seg.arrive_batt = 6.0;
  CHECK(minimal_charge(seg) == doctest::Approx(7.0));
}

TEST_CASE("additional charge converts waiting into charging time") {
  // g = 1 so slack time equals energy
  Instance inst = synth::make_instance({0, 0, 0, 0, 0, 1000}, {{5, 0, 1, 1, 30, 500, 2}},
                                       {{1, 0}}, 50, 100, 1, 1);
  auto seg = make_segment(inst, 2, 10.0, 50.0, {1}, 0);
  // arrival at customer: 10 + 0 (q0=0) + 4 = 14, window opens at 30 -> delta 16
  auto [q1, delta] = additional_charge(seg, minimal_charge(seg));
  CHECK(minimal_charge(seg) == doctest::Approx(0.0));
  CHECK(q1 == doctest::Approx(16.0));
  REQUIRE(delta.size() == 1);
  CHECK(delta[0] == doctest::Approx(16.0));

  SUBCASE("no waiting means no additional charge") {
    Instance loose = synth::make_instance({0, 0, 0, 0, 0, 1000}, {{5, 0, 1, 1, 0, 500, 2}},
                                          {{1, 0}}, 50, 100, 1, 1);
    auto seg2 = make_segment(loose, 2, 10.0, 50.0, {1}, 0);
    auto [q1b, db] = additional_charge(seg2, 0.0);
    CHECK(q1b == doctest::Approx(0.0));
  }
}

TEST_CASE("slack recursion agrees with the literal interpreter") {
  int compared = 0;
  for (uint64_t seed = 1; seed <= 200; seed++) {
    synth::RandomOpts opt;
    opt.customers = 4;
    opt.stations = 2;
    opt.tight_windows = seed % 2 == 0;
    Instance inst = synth::random_feasible_instance(seed, opt);
    Rng rng(seed * 13);
    // station start, customers in random order, depot terminal
    std::vector<int> cs;
    for (int c = 1; c <= inst.num_customers(); c++) cs.push_back(c);
    rng.shuffle(cs);
    cs.resize(static_cast<size_t>(rng.range(1, 3)));
    const double at = rng.real(0, 30);
    const double ab = rng.real(0, inst.battery_capacity());
    auto seg = make_segment(inst, inst.first_station(), at, ab, cs, 0);
    // the recursion is defined on window-feasible paths only
    if (charge_amount(seg).status != ScheduleStatus::ok) continue;
    const double q0 = minimal_charge(seg);
    auto [q1, delta] = additional_charge(seg, q0);
    auto full = oracle::slack_recursion(inst, seg.start, seg.arrive_time, cs, q0, false);
    auto early = oracle::slack_recursion(inst, seg.start, seg.arrive_time, cs, q0, true);
    CHECK(q1 == doctest::Approx(full.q1).epsilon(1e-12));
    CHECK(full.q1 == doctest::Approx(early.q1).epsilon(1e-12));  // early stop is lossless
    for (size_t i = 0; i < delta.size(); i++)
      CHECK(delta[i] == doctest::Approx(full.delta[i]).epsilon(1e-12));
    compared++;
  }
  CHECK(compared >= 25);
}

TEST_CASE("charge amount clamps at capacity and flags impossible legs") {
  Instance inst = synth::make_instance({0, 0, 0, 0, 0, 1000}, {{5, 0, 1, 1, 30, 500, 2}},
                                       {{1, 0}}, 50, 18.0, 1, 1);
  auto seg = make_segment(inst, 2, 10.0, 10.0, {1}, 0);
  // q0 = 9 - 10 < 0 -> 0; waiting 16 but headroom Q - y = 8
  ChargePlan plan = charge_amount(seg);
  CHECK(plan.status == ScheduleStatus::ok);
  CHECK(plan.q == doctest::Approx(8.0));
  CHECK(plan.q0 == doctest::Approx(0.0));
  CHECK(plan.q1 == doctest::Approx(16.0));

  SUBCASE("unclamped when headroom allows") {
    Instance big = synth::make_instance({0, 0, 0, 0, 0, 1000}, {{5, 0, 1, 1, 30, 500, 2}},
                                        {{1, 0}}, 50, 100.0, 1, 1);
    auto seg2 = make_segment(big, 2, 10.0, 10.0, {1}, 0);
    ChargePlan p2 = charge_amount(seg2);
    CHECK(p2.q == doctest::Approx(p2.q0 + p2.q1));
  }
  SUBCASE("leg beyond battery capacity is an infeasible segment") {
    auto seg3 = make_segment(inst, 2, 10.0, 0.5, {1}, 0);
    // q0 = 9 - 0.5 = 8.5 but headroom is 17.5 -> fine; shrink Q instead
    Instance tiny = synth::make_instance({0, 0, 0, 0, 0, 1000}, {{5, 0, 1, 1, 0, 500, 2}},
                                         {{1, 0}}, 50, 5.0, 1, 1);
    auto seg4 = make_segment(tiny, 2, 10.0, 0.5, {1}, 0);
    CHECK(charge_amount(seg4).status == ScheduleStatus::battery_capacity);
    (void)seg3;
  }
}

TEST_CASE("charge amount matches the grid-search reference") {
  int compared = 0;
  for (uint64_t seed = 1; seed <= 70; seed++) {
    synth::RandomOpts opt;
    opt.customers = 3;
    opt.stations = 1;
    opt.box = 8.0;  // keep Q small so the grid stays dense
    opt.tight_windows = seed % 2 == 0;
    Instance inst = synth::random_feasible_instance(seed + 500, opt);
    Rng rng(seed);
    std::vector<int> cs;
    for (int c = 1; c <= inst.num_customers(); c++) cs.push_back(c);
    rng.shuffle(cs);
    cs.resize(static_cast<size_t>(rng.range(1, 2)));
    const double at = rng.real(0, 40);
    const double ab = rng.real(0, inst.battery_capacity() * 0.8);
    auto seg = make_segment(inst, inst.first_station(), at, ab, cs, 0);
    ChargePlan plan = charge_amount(seg);
    const double want = grid_best_q(seg);
    if (plan.status == ScheduleStatus::ok) {
      REQUIRE(want >= 0.0);
      CHECK(plan.q == doctest::Approx(want).epsilon(0).scale(1).epsilon(2e-3));
      compared++;
    } else {
      CHECK(want < 0.0);
    }
  }
  CHECK(compared >= 20);
}

TEST_CASE("schedule_route leaves station-free feasible routes unchanged") {
  Instance inst = synth::make_instance({0, 0, 0, 0, 0, 1000}, {{5, 0, 1, 1, 0, 500, 2}},
                                       {{9, 9}}, 50, 100, 1, 1);
  Route r(std::vector<int>{0, 1, 0});
  CHECK(schedule_route(inst, r) == ScheduleStatus::ok);
  for (double q : r.charge) CHECK(q == 0.0);
  CHECK(r.eval.feasible);
}

TEST_CASE("schedule_route flags physically impossible legs") {
  Instance inst = synth::make_instance({0, 0, 0, 0, 0, 10000}, {{60, 0, 1, 1, 0, 10000, 0}},
                                       {{30, 0}}, 50, 50, 1, 1);
  Route direct(std::vector<int>{0, 1, 0});
  CHECK(schedule_route(inst, direct) != ScheduleStatus::ok);
  // even with the station midway, 30 + 30 needs 60 > Q on the second leg
  Route with_station(std::vector<int>{0, 2, 1, 0});
  CHECK(schedule_route(inst, with_station) == ScheduleStatus::battery_capacity);
}

TEST_CASE("scheduled stations match the grid reference end to end") {
  for (uint64_t seed = 1; seed <= 12; seed++) {
    synth::RandomOpts opt;
    opt.customers = 4;
    opt.stations = 2;
    opt.box = 8.0;
    opt.battery_factor = 0.8;
    opt.tight_windows = true;
    Instance inst = synth::random_feasible_instance(seed + 900, opt);
    StationRanking ranking = rank_stations(inst, 1.0);
    Rng rng(seed);
    Solution sol = synth::random_feasible_solution(inst, ranking, rng);
    for (const Route &r : sol.routes) {
      // walk the route segment by segment, cross-checking each station's q
      double t = inst.node(0).tw_open;
      double batt = inst.battery_capacity();
      size_t start = 0;
      while (start + 1 < r.visits.size()) {
        size_t pos = start + 1;
        std::vector<int> cs;
        while (pos + 1 < r.visits.size() && !inst.is_station(r.visits[pos])) {
          cs.push_back(r.visits[pos]);
          pos++;
        }
        auto seg = make_segment(inst, r.visits[start], t, batt, cs, r.visits[pos]);
        double q = 0.0;
        if (inst.is_station(r.visits[start])) {
          q = r.charge[start];
          const double want = grid_best_q(seg);
          REQUIRE(want >= 0.0);
          CHECK(q == doctest::Approx(want).epsilon(0).scale(1).epsilon(2e-3));
        }
        t += inst.charge_rate() * q;
        batt += q;
        int prev = r.visits[start];
        for (int c : cs) {
          t = std::max(t + inst.time(prev, c), inst.node(c).tw_open) + inst.node(c).service;
          batt -= inst.consume_rate() * inst.dist(prev, c);
          prev = c;
        }
        t += inst.time(prev, r.visits[pos]);
        batt -= inst.consume_rate() * inst.dist(prev, r.visits[pos]);
        start = pos;
      }
    }
  }
}

TEST_CASE("charge plans respect the capacity envelope and battery bounds") {
  for (uint64_t seed = 40; seed <= 70; seed++) {
    synth::RandomOpts opt;
    opt.customers = 5;
    opt.stations = 2;
    opt.battery_factor = 0.85;
    Instance inst = synth::random_feasible_instance(seed, opt);
    StationRanking ranking = rank_stations(inst, 1.0);
    Rng rng(seed);
    Solution sol = synth::random_feasible_solution(inst, ranking, rng);
    for (const Route &r : sol.routes) {
      REQUIRE(r.eval.feasible);
      for (size_t i = 0; i < r.visits.size(); i++) {
        if (inst.is_station(r.visits[i])) {
          CHECK(r.charge[i] >= 0.0);
          CHECK(r.charge[i] <= inst.battery_capacity() - r.eval.batt_arrive[i] + kEps);
        }
        CHECK(r.eval.batt_arrive[i] >= -kEps);
        CHECK(r.eval.batt_depart[i] <= inst.battery_capacity() + kEps);
      }
    }
  }
}

TEST_CASE("raising the arrival battery never raises the minimal charge") {
  Instance inst = synth::random_feasible_instance(5);
  auto seg = make_segment(inst, inst.first_station(), 0.0, 0.0, {1, 2}, 0);
  double prev = std::numeric_limits<double>::infinity();
  for (double y = 0.0; y <= inst.battery_capacity(); y += inst.battery_capacity() / 16) {
    seg.arrive_batt = y;
    const double q0 = minimal_charge(seg);
    CHECK(q0 <= prev + 1e-12);
    prev = q0;
  }
}

TEST_CASE("scheduler feasibility coincides with the exact frontier oracle") {
  // the scheduler must find a plan whenever one exists, and never invent one
  int feasible_seen = 0, infeasible_seen = 0;
  for (uint64_t seed = 1; seed <= 200; seed++) {
    synth::RandomOpts opt;
    opt.customers = 5;
    opt.stations = 2;
    opt.battery_factor = 0.7 + 0.15 * (seed % 8);  // spans dead to comfortable
    opt.tight_windows = seed % 3 == 0;
    Instance inst = synth::random_instance(seed + 2000, opt);
    Rng rng(seed);
    // random visit order with stations sprinkled in
    std::vector<int> cs;
    for (int c = 1; c <= inst.num_customers(); c++)
      if (rng.chance(0.8)) cs.push_back(c);
    rng.shuffle(cs);
    if (cs.size() > 3 && rng.chance(0.5)) cs.resize(static_cast<size_t>(rng.range(1, 3)));
    std::vector<int> visits{0};
    for (int c : cs) {
      if (rng.chance(0.45)) visits.push_back(inst.first_station() + rng.below(inst.num_stations()));
      visits.push_back(c);
    }
    if (rng.chance(0.3)) visits.push_back(inst.first_station() + rng.below(inst.num_stations()));
    visits.push_back(0);

    Route r;
    r.visits = visits;
    const bool scheduled = schedule_route(inst, r) == ScheduleStatus::ok;
    const bool oracle_feasible = oracle::dp_route_feasible(inst, visits);
    CHECK(scheduled == oracle_feasible);
    if (scheduled) feasible_seen++;
    else infeasible_seen++;
  }
  // the sweep must exercise both outcomes to mean anything
  CHECK(feasible_seen > 10);
  CHECK(infeasible_seen > 10);
}
