#pragma once

#include <chrono>
#include <cstdint>
#include <vector>

#include "evrp/construct.hpp"
#include "evrp/model.hpp"
#include "evrp/preprocess.hpp"
#include "evrp/pssi.hpp"
#include "evrp/rng.hpp"

namespace evrp {

enum class Domain : uint8_t { non_electric, electric };

enum class SearchMode : uint8_t { full, large_scale };

enum class MoveKind : uint8_t { two_opt, two_opt_star, or_opt, swap, relocate };

// Index conventions (positions index the route's visit sequence):
//   two_opt:      r1 == r2; inverts visits[i], visits[i+1].
//   two_opt_star: r1 < r2; tails starting at i (in r1) and j (in r2) are
//                 exchanged.
//   or_opt:       segment [i, i+len1-1] of r1 reinserted before position j of
//                 r2 (same or different route).
//   swap:         segments [i, i+len1-1] of r1 and [j, j+len2-1] of r2 are
//                 exchanged; r1 <= r2 and for r1 == r2 the first segment ends
//                 before the second starts.
//   relocate:     or_opt with a single customer.
// Moved/inverted segments consist of customers only; stations move only as
// part of a two_opt_star tail.
struct Move {
  MoveKind kind = MoveKind::two_opt;
  int r1 = -1, r2 = -1;
  int i = -1, j = -1;
  int len1 = 0, len2 = 0;
  double delta = 0.0;
};

// Soft wall-clock bound; checks happen between atomic steps.
struct Deadline {
  bool armed = false;
  std::chrono::steady_clock::time_point at{};

  static Deadline in_seconds(double s) {
    Deadline d;
    if (s < 1e17) {
      d.armed = true;
      d.at = std::chrono::steady_clock::now() +
             std::chrono::duration_cast<std::chrono::steady_clock::duration>(
                 std::chrono::duration<double>(s));
    }
    return d;
  }
  bool expired() const { return armed && std::chrono::steady_clock::now() >= at; }
};

// Every structurally distinct move whose outcome is feasible in the domain,
// with its exact cost delta. In the electric domain feasibility includes the
// battery constraint via full rescheduling of the touched routes.
std::vector<Move> enumerate_moves(const Instance &inst, const Solution &sol, Domain domain);

// Aggressive local search: steepest descent in the station-free space with
// per-step PSSI reconstruction of the electric solution.
Solution als(const Instance &inst, const StationRanking &ranking, const Solution &input,
             const PssiParams &params, Rng &rng, PssiStats *stats = nullptr,
             const Deadline &deadline = {});

// Conservative local search: steepest descent directly on electric routes,
// rescheduling charge amounts per candidate move.
Solution cls(const Instance &inst, const Solution &input, const Deadline &deadline = {});

// ALS followed by CLS (full mode) or ALS alone (large-scale mode).
Solution cdns(const Instance &inst, const StationRanking &ranking, const Solution &input,
              SearchMode mode, const PssiParams &params, Rng &rng, PssiStats *stats = nullptr,
              const Deadline &deadline = {});

}  // namespace evrp
