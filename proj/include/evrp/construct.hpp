#pragma once

#include <vector>

#include "evrp/model.hpp"
#include "evrp/preprocess.hpp"
#include "evrp/pssi.hpp"
#include "evrp/rng.hpp"

namespace evrp {

struct RcrsParams {
  double lambda = 0.5;
  double gamma = 0.5;
};

struct DestroyParams {
  double omega1 = 0.1;
  double omega2 = 0.2;
};

// Raised when a single customer cannot be served by a fresh vehicle even with
// the best station insertion.
struct InstanceInfeasible : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Feasible solution covering all customers; routes are scheduled and tc set.
Solution rcrs_construct(const Instance &inst, const StationRanking &ranking,
                        const RcrsParams &params, Rng &rng);

// Inserts every unassigned customer into the partial solution by largest
// 2-regret; opens new routes only for customers with no feasible position.
Solution regret_insert(const Instance &inst, const StationRanking &ranking, Solution partial,
                       std::vector<int> unassigned, Rng &rng);

// Removes a Shaw-style related customer cluster and repairs by regret
// insertion. Best effort: returns the input unchanged if repair fails.
Solution destroy_repair(const Instance &inst, const StationRanking &ranking, const Solution &sol,
                        const DestroyParams &params, Rng &rng);

// Cost of one scheduled route under Eq-style accounting (empty routes are
// free). Shared by search modules.
double route_cost(const Instance &inst, const Route &r);

// Recomputes tc from route evals.
void refresh_cost(const Instance &inst, Solution &sol);

// Insertion evaluation with electricity fixed by best station insertion.
struct InsertionOutcome {
  bool ok = false;
  double delta = 0.0;  // route cost increase
  Route route;         // scheduled result
};
InsertionOutcome try_insert(const Instance &inst, const StationRanking &ranking, const Route &r,
                            int customer, int pos);

}  // namespace evrp
