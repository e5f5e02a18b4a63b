#include "evrp/preprocess.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <stdexcept>

namespace evrp {

std::pair<double, double> mercator_project(double lng_deg, double lat_deg) {
  constexpr double R = 6378137.0;  // WGS84 semi-major axis
  constexpr double pi = std::numbers::pi;
  if (!(lat_deg > -90.0 && lat_deg < 90.0))
    throw std::domain_error("latitude must lie strictly inside (-90, 90)");
  const double x = R * pi * lng_deg / 180.0;
  const double y = R * std::log(std::tan(pi / 4.0 + pi * lat_deg / 360.0));
  return {x, y};
}

HyperArcMap hyperarc_closure(Instance &inst) {
  const int n = inst.n();
  std::vector<double> time = inst.time_matrix();
  std::vector<double> dist = inst.dist_matrix();
  HyperArcMap map;
  map.n = n;
  map.via.assign(static_cast<size_t>(n) * n, -1);

  // Floyd-Warshall restricted to station intermediates.
  for (int k = inst.first_station(); k < n; k++) {
    for (int i = 0; i < n; i++) {
      if (i == k) continue;
      const double tik = time[static_cast<size_t>(i) * n + k];
      const double dik = dist[static_cast<size_t>(i) * n + k];
      for (int j = 0; j < n; j++) {
        if (j == k || j == i) continue;
        const double cand = tik + time[static_cast<size_t>(k) * n + j];
        if (cand < time[static_cast<size_t>(i) * n + j] - 1e-12) {
          time[static_cast<size_t>(i) * n + j] = cand;
          dist[static_cast<size_t>(i) * n + j] = dik + dist[static_cast<size_t>(k) * n + j];
          map.via[static_cast<size_t>(i) * n + j] = k;
        }
      }
    }
  }
  inst.replace_matrices(std::move(dist), std::move(time), true);
  return map;
}

namespace {
void collect_relay(const HyperArcMap &map, int i, int j, int depth, std::vector<int> &out) {
  if (depth > map.n) throw StructureError("hyperarc relay reconstruction cycled");
  const int k = map.via[static_cast<size_t>(i) * map.n + j];
  if (k < 0) return;
  collect_relay(map, i, k, depth + 1, out);
  out.push_back(k);
  collect_relay(map, k, j, depth + 1, out);
}
}  // namespace

std::vector<int> HyperArcMap::relay(int i, int j) const {
  std::vector<int> seq;
  collect_relay(*this, i, j, 0, seq);
  return seq;
}

Solution expand_hyperarcs(const Instance &original, const HyperArcMap &map, const Solution &sol) {
  Solution out;
  out.routes.reserve(sol.routes.size());
  for (const Route &r : sol.routes) {
    Route nr;
    nr.visits.push_back(r.visits.front());
    for (size_t i = 1; i < r.visits.size(); i++) {
      const int a = r.visits[i - 1];
      const int b = r.visits[i];
      for (int k : map.relay(a, b)) nr.visits.push_back(k);
      nr.visits.push_back(b);
    }
    nr.charge.assign(nr.visits.size(), 0.0);
    out.routes.push_back(std::move(nr));
  }
  (void)original;
  return out;
}

StationRanking rank_stations(const Instance &inst, double sr) {
  if (!(sr > 0.0 && sr <= 1.0)) throw std::invalid_argument("sr must lie in (0, 1]");
  const int n = inst.n();
  const int P = inst.num_stations();
  const int trunc = std::min(P, static_cast<int>(std::ceil(sr * P)));
  std::vector<int32_t> ids(static_cast<size_t>(n) * n * trunc, -1);

  std::vector<int32_t> order(static_cast<size_t>(P));
  for (int i = 0; i < n; i++) {
    for (int j = 0; j < n; j++) {
      std::iota(order.begin(), order.end(), inst.first_station());
      const double dij = inst.dist(i, j);
      auto detour = [&](int32_t k) { return inst.dist(i, k) + inst.dist(k, j) - dij; };
      std::partial_sort(order.begin(), order.begin() + trunc, order.end(),
                        [&](int32_t a, int32_t b) {
                          const double da = detour(a), db = detour(b);
                          if (da != db) return da < db;
                          return a < b;
                        });
      std::copy(order.begin(), order.begin() + trunc,
                ids.begin() + (static_cast<size_t>(i) * n + j) * trunc);
    }
  }
  return StationRanking(n, trunc, std::move(ids));
}

}  // namespace evrp
