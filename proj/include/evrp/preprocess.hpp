#pragma once

#include <utility>
#include <vector>

#include "evrp/model.hpp"

namespace evrp {

// WGS84 web-style Mercator projection, meters. Latitude must lie strictly
// inside (-90, 90).
std::pair<double, double> mercator_project(double lng_deg, double lat_deg);

// Shortest station-relayed paths: for each ordered node pair the minimum
// travel-time path whose interior visits stations only.
struct HyperArcMap {
  int n = 0;
  // via[i*n+j] is the last interior station on the shortest path i->j, or -1
  // for a direct arc.
  std::vector<int> via;

  // Interior station sequence of the stored path (empty for direct arcs).
  std::vector<int> relay(int i, int j) const;
};

// Replaces dist/time with the station-relayed shortest-path values and sets
// triangle_ok. Distances follow the minimum-time paths.
HyperArcMap hyperarc_closure(Instance &inst);

// Rewrites a solution expressed on the closed instance as explicit visits on
// the original instance: relay stations are spliced in with zero charge.
// Charge amounts must be recomputed by the charge scheduler afterwards.
Solution expand_hyperarcs(const Instance &original, const HyperArcMap &map, const Solution &sol);

// Per ordered node pair: candidate stations sorted by detour cost
// d_ik + d_kj - d_ij, ties broken by lower station id, truncated to
// ceil(sr * P) entries.
class StationRanking {
 public:
  StationRanking() = default;
  StationRanking(int n, int trunc, std::vector<int32_t> ids)
      : n_(n), trunc_(trunc), ids_(std::move(ids)) {}

  int truncation() const { return trunc_; }
  const int32_t *at(int i, int j) const {
    return ids_.data() + (static_cast<size_t>(i) * n_ + j) * trunc_;
  }

 private:
  int n_ = 0;
  int trunc_ = 0;
  std::vector<int32_t> ids_;
};

StationRanking rank_stations(const Instance &inst, double sr);

}  // namespace evrp
