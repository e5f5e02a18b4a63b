#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "evrp/charge.hpp"
#include "evrp/model.hpp"
#include "evrp/preprocess.hpp"
#include "evrp/rng.hpp"

namespace evrp {

struct PssiParams {
  double alpha = 3.0;          // population size is alpha * gap count
  int b_generations = 5;       // B
  double sr = 1.0;             // selection range used to build the ranking
  double flip_prob = 0.02;
  double one_to_zero_prob = 0.20;
  int regen_cap = 0;           // 0 -> 50 * population size, per chromosome
};

// One bit per consecutive gap of the station-free route.
struct GapChromosome {
  std::vector<uint8_t> bits;
  Route realized;
  bool ok = false;
};

// Timing/share counters for the two insertion strategies.
struct PssiStats {
  long calls = 0;
  long psi_exclusive = 0;
  long ssi_exclusive = 0;
  long shared = 0;
  double psi_time_s = 0.0;
  double ssi_time_s = 0.0;
};

// Failure is a value: nullopt means no feasible route was found. A returned
// route is scheduled and fully feasible.
using RouteResult = std::optional<Route>;

// Inserts stations into the station-free route following the bit pattern,
// trying ranked stations per active gap.
RouteResult decode(const Instance &inst, const StationRanking &ranking,
                   const std::vector<uint8_t> &bits, const Route &stripped);

RouteResult psi(const Instance &inst, const StationRanking &ranking, const Route &route,
                const PssiParams &params, Rng &rng);

RouteResult ssi(const Instance &inst, const StationRanking &ranking, const Route &route);

// Best of the two strategies; ties favor the sequential result.
RouteResult pssi(const Instance &inst, const StationRanking &ranking, const Route &route,
                 const PssiParams &params, Rng &rng, PssiStats *stats = nullptr);

// Sequential insertion loop without the consecutive-station refinement; used
// by construction and repair to fix battery-infeasible insertions.
RouteResult ssi_fix(const Instance &inst, const StationRanking &ranking, const Route &route);

}  // namespace evrp
