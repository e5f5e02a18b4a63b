#pragma once

#include <cstdint>
#include <limits>
#include <vector>

#include "evrp/cdns.hpp"
#include "evrp/construct.hpp"
#include "evrp/model.hpp"
#include "evrp/preprocess.hpp"
#include "evrp/pssi.hpp"
#include "evrp/rng.hpp"

namespace evrp {

struct HmaParams {
  int g1 = 20;               // LNS stagnation limit
  int g2 = 20;               // MS stagnation limit
  int population = 9;        // N
  double alpha = 3.0;        // PSI population proportionality
  int b_generations = 5;     // PSI generations
  double sr = 1.0;           // station selection range
  double omega1 = 0.2;       // destroy lower bound
  double omega2 = 0.4;       // destroy upper bound
  double lambda = 0.5;       // RCRS weights for the initial construction
  double gamma = 0.5;
  double time_limit_s = std::numeric_limits<double>::infinity();
  int large_scale_threshold = 200;
  int subproblems = 0;       // 0 -> by scale: nearest of {2,4,6,8,10} to M/100
  uint64_t seed = 1;
};

struct RunLogEntry {
  double elapsed_s = 0.0;
  double tc = 0.0;
  int vehicles = 0;
};

struct RunResult {
  Solution best;
  std::vector<RunLogEntry> log;
  double time_to_best_s = 0.0;
  double wall_s = 0.0;
  PssiStats pssi;
};

struct Barycenter {
  int route = -1;
  double x = 0.0;
  double y = 0.0;
};

// Mean Cartesian coordinate over each route's non-depot visits.
std::vector<Barycenter> route_barycenters(const Instance &inst, const Solution &sol);

struct SubProblem {
  Instance instance;
  Solution elite;             // elite routes restated on the subinstance
  std::vector<int> orig_of;   // subinstance id -> original id
};

// Splits by route barycenters (k-means, deterministic); every subinstance
// keeps the depot and all stations, customer sets partition V.
std::vector<SubProblem> bcd_decompose(const Instance &inst, const Solution &sol, int k);

int choose_subproblem_count(int num_customers);

// (lambda, gamma) pair for the even-index member of the seeding grid.
std::pair<double, double> rcrs_grid_weights(int index, int population);

std::vector<Solution> population_init(const Instance &inst, const StationRanking &ranking,
                                      const Solution &elite, int n, const HmaParams &params,
                                      Rng &rng);

// Route-assembly-regret-insertion crossover; falls back to a copy of p1 when
// the completion fails.
Solution rari_crossover(const Instance &inst, const StationRanking &ranking, const Solution &p1,
                        const Solution &p2, Rng &rng);

Solution memetic_search(const Instance &inst, const StationRanking &ranking,
                        const Solution &elite, const HmaParams &params, SearchMode mode, Rng &rng,
                        PssiStats *stats = nullptr, const Deadline &deadline = {});

RunResult hma_solve(const Instance &inst, const HmaParams &params);

}  // namespace evrp
