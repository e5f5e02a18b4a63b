#pragma once

#include <utility>
#include <vector>

#include "evrp/model.hpp"

namespace evrp {

// One station-to-station (or depot) stretch of a route. `start` is the
// charging station the plan is computed for; for the leading depot stretch no
// plan exists and the scheduler only verifies it.
struct PathSegment {
  const Instance *inst = nullptr;
  int start = 0;                // f_i (station or depot)
  double arrive_time = 0.0;     // a at f_i
  double arrive_batt = 0.0;     // y at f_i
  std::vector<int> customers;   // c_{i,1..m}
  int terminal = 0;             // f_{i+1} (station or depot)

  double td() const;  // total distance start -> customers -> terminal
};

enum class ScheduleStatus : uint8_t {
  ok,
  battery_capacity,  // q0 exceeds Q - y: the leg cannot be covered
  battery,           // negative battery with the given stations
  time_window,       // charging time breaks a window downstream
  capacity,          // load violation (independent of charging)
};

struct ChargePlan {
  double q0 = 0.0;  // minimal charge
  double q1 = 0.0;  // additional charge absorbed into waiting
  double q = 0.0;   // final amount, min(q0 + q1, Q - y)
  std::vector<double> delta;    // realized slack per customer
  std::vector<double> tau;      // remaining usable time per customer
  std::vector<double> a_prime;  // arrival per customer under the final q
  std::vector<double> b_prime;  // departure per customer under the final q
  ScheduleStatus status = ScheduleStatus::ok;
};

// max{0, h * TD(P_i) - y_{f_i}}
double minimal_charge(const PathSegment &seg);

// Slack-time recursion; returns the additional charge and the realized slack
// sequence. Terminates early once the usable time reaches zero.
std::pair<double, std::vector<double>> additional_charge(const PathSegment &seg, double q0);

ChargePlan charge_amount(const PathSegment &seg);

// Fills the charge map station by station in visit order and evaluates the
// route. Returns ok iff the route is fully feasible; the evaluation trace is
// left on the route either way.
ScheduleStatus schedule_route(const Instance &inst, Route &route);

}  // namespace evrp
