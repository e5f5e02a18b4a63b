#include "evrp/hma.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <future>
#include <limits>
#include <numeric>

namespace evrp {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double solution_tc(const Instance &inst, Solution &s) {
  for (Route &r : s.routes)
    if (!r.eval.valid) schedule_route(inst, r);
  refresh_cost(inst, s);
  return s.tc;
}

}  // namespace

std::vector<Barycenter> route_barycenters(const Instance &inst, const Solution &sol) {
  std::vector<Barycenter> out;
  out.reserve(sol.routes.size());
  for (size_t ri = 0; ri < sol.routes.size(); ri++) {
    const Route &r = sol.routes[ri];
    Barycenter b;
    b.route = static_cast<int>(ri);
    int cnt = 0;
    for (int id : r.visits) {
      if (inst.is_depot(id)) continue;
      b.x += inst.x(id);
      b.y += inst.y(id);
      cnt++;
    }
    if (cnt > 0) {
      b.x /= cnt;
      b.y /= cnt;
    }
    out.push_back(b);
  }
  return out;
}

namespace {

// Deterministic k-means++ with restarts over the barycenter cloud.
std::vector<int> kmeans_assign(const std::vector<Barycenter> &pts, int k) {
  const int n = static_cast<int>(pts.size());
  Rng rng(0x5bd1e995u ^ (static_cast<uint64_t>(n) << 32) ^ static_cast<uint64_t>(k));
  auto sq = [&](int a, double cx, double cy) {
    const double dx = pts[static_cast<size_t>(a)].x - cx;
    const double dy = pts[static_cast<size_t>(a)].y - cy;
    return dx * dx + dy * dy;
  };

  std::vector<int> best_assign(static_cast<size_t>(n), 0);
  double best_sse = kInf;
  for (int restart = 0; restart < 50; restart++) {
    // k-means++ seeding
    std::vector<std::pair<double, double>> centers;
    centers.reserve(static_cast<size_t>(k));
    int first = rng.below(n);
    centers.emplace_back(pts[static_cast<size_t>(first)].x, pts[static_cast<size_t>(first)].y);
    std::vector<double> d2(static_cast<size_t>(n));
    while (static_cast<int>(centers.size()) < k) {
      double total = 0.0;
      for (int i = 0; i < n; i++) {
        double m = kInf;
        for (auto &c : centers) m = std::min(m, sq(i, c.first, c.second));
        d2[static_cast<size_t>(i)] = m;
        total += m;
      }
      int pick;
      if (total <= 0) {
        pick = rng.below(n);
      } else {
        double target = rng.real01() * total;
        pick = n - 1;
        for (int i = 0; i < n; i++) {
          target -= d2[static_cast<size_t>(i)];
          if (target <= 0) {
            pick = i;
            break;
          }
        }
      }
      centers.emplace_back(pts[static_cast<size_t>(pick)].x, pts[static_cast<size_t>(pick)].y);
    }

    std::vector<int> assign(static_cast<size_t>(n), 0);
    for (int iter = 0; iter < 100; iter++) {
      bool moved = false;
      for (int i = 0; i < n; i++) {
        int bestc = 0;
        double bestd = kInf;
        for (int c = 0; c < k; c++) {
          const double d = sq(i, centers[static_cast<size_t>(c)].first,
                              centers[static_cast<size_t>(c)].second);
          if (d < bestd - 1e-12) {
            bestd = d;
            bestc = c;
          }
        }
        if (assign[static_cast<size_t>(i)] != bestc) {
          assign[static_cast<size_t>(i)] = bestc;
          moved = true;
        }
      }
      for (int c = 0; c < k; c++) {
        double sx = 0, sy = 0;
        int cnt = 0;
        for (int i = 0; i < n; i++)
          if (assign[static_cast<size_t>(i)] == c) {
            sx += pts[static_cast<size_t>(i)].x;
            sy += pts[static_cast<size_t>(i)].y;
            cnt++;
          }
        if (cnt > 0) centers[static_cast<size_t>(c)] = {sx / cnt, sy / cnt};
      }
      if (!moved) break;
    }
    double sse = 0.0;
    for (int i = 0; i < n; i++)
      sse += sq(i, centers[static_cast<size_t>(assign[static_cast<size_t>(i)])].first,
                centers[static_cast<size_t>(assign[static_cast<size_t>(i)])].second);
    if (sse < best_sse - 1e-9) {
      best_sse = sse;
      best_assign = assign;
    }
  }
  return best_assign;
}

}  // namespace

int choose_subproblem_count(int num_customers) {
  const double r = num_customers / 100.0;
  const int supported[5] = {2, 4, 6, 8, 10};
  int best = supported[0];
  for (int s : supported)
    if (std::abs(r - s) < std::abs(r - best) - 1e-12) best = s;
  return best;
}

std::vector<SubProblem> bcd_decompose(const Instance &inst, const Solution &sol, int k) {
  k = std::max(1, std::min(k, static_cast<int>(sol.routes.size())));
  const auto pts = route_barycenters(inst, sol);
  std::vector<int> assign =
      k == 1 ? std::vector<int>(pts.size(), 0) : kmeans_assign(pts, k);

  // Group routes per cluster; empty clusters simply vanish.
  std::vector<std::vector<int>> groups(static_cast<size_t>(k));
  for (size_t i = 0; i < assign.size(); i++)
    groups[static_cast<size_t>(assign[i])].push_back(static_cast<int>(i));

  std::vector<SubProblem> subs;
  for (const auto &group : groups) {
    if (group.empty()) continue;
    SubProblem sp;

    std::vector<int> customers;
    for (int ri : group)
      for (int id : sol.routes[static_cast<size_t>(ri)].visits)
        if (inst.is_customer(id)) customers.push_back(id);
    std::sort(customers.begin(), customers.end());

    sp.orig_of.push_back(inst.depot());
    for (int c : customers) sp.orig_of.push_back(c);
    for (int s = inst.first_station(); s < inst.n(); s++) sp.orig_of.push_back(s);

    const int sub_n = static_cast<int>(sp.orig_of.size());
    std::vector<Node> nodes(static_cast<size_t>(sub_n));
    std::vector<double> dist(static_cast<size_t>(sub_n) * sub_n);
    std::vector<double> time(static_cast<size_t>(sub_n) * sub_n);
    for (int a = 0; a < sub_n; a++) {
      nodes[static_cast<size_t>(a)] = inst.node(sp.orig_of[static_cast<size_t>(a)]);
      nodes[static_cast<size_t>(a)].id = a;
      for (int b = 0; b < sub_n; b++) {
        dist[static_cast<size_t>(a) * sub_n + b] =
            inst.dist(sp.orig_of[static_cast<size_t>(a)], sp.orig_of[static_cast<size_t>(b)]);
        time[static_cast<size_t>(a) * sub_n + b] =
            inst.time(sp.orig_of[static_cast<size_t>(a)], sp.orig_of[static_cast<size_t>(b)]);
      }
    }
    sp.instance = Instance(
        inst.name() + ":sub" + std::to_string(subs.size()), std::move(nodes),
        static_cast<int>(customers.size()), inst.num_stations(), std::move(dist), std::move(time),
        inst.load_capacity(), inst.battery_capacity(), inst.charge_rate(), inst.consume_rate(),
        inst.dispatch_cost(), inst.distance_cost(), inst.coord_mode(), inst.triangle_ok());

    std::vector<int> new_of(static_cast<size_t>(inst.n()), -1);
    for (int a = 0; a < sub_n; a++) new_of[static_cast<size_t>(sp.orig_of[static_cast<size_t>(a)])] = a;
    for (int ri : group) {
      Route nr;
      for (int id : sol.routes[static_cast<size_t>(ri)].visits)
        nr.visits.push_back(new_of[static_cast<size_t>(id)]);
      nr.charge = sol.routes[static_cast<size_t>(ri)].charge;
      schedule_route(sp.instance, nr);
      sp.elite.routes.push_back(std::move(nr));
    }
    refresh_cost(sp.instance, sp.elite);
    subs.push_back(std::move(sp));
  }
  return subs;
}

std::pair<double, double> rcrs_grid_weights(int index, int population) {
  const int sqrt_n = static_cast<int>(std::ceil(std::sqrt(static_cast<double>(population))));
  if (sqrt_n <= 1) return {0.0, 0.0};
  const int p = (index + sqrt_n - 1) / sqrt_n;  // ceil(index / sqrt_n)
  const int q = index - sqrt_n * (p - 1);
  const double lambda = std::clamp(static_cast<double>(p - 1) / (sqrt_n - 1), 0.0, 1.0);
  const double gamma = std::clamp(static_cast<double>(q - 1) / (sqrt_n - 1), 0.0, 1.0);
  return {lambda, gamma};
}

std::vector<Solution> population_init(const Instance &inst, const StationRanking &ranking,
                                      const Solution &elite, int n,
                                      [[maybe_unused]] const HmaParams &params, Rng &rng) {
  std::vector<Solution> pop;
  pop.reserve(static_cast<size_t>(n));
  pop.push_back(elite);

  for (int i = 2; i <= n; i++) {
    if (i % 2 == 1) {
      DestroyParams dp;
      dp.omega1 = dp.omega2 = static_cast<double>(i) / n;
      pop.push_back(destroy_repair(inst, ranking, elite, dp, rng));
    } else {
      const auto [lambda, gamma] = rcrs_grid_weights(i, n);
      RcrsParams rp{lambda, gamma};
      pop.push_back(rcrs_construct(inst, ranking, rp, rng));
    }
  }
  return pop;
}

Solution rari_crossover(const Instance &inst, const StationRanking &ranking, const Solution &p1,
                        const Solution &p2, Rng &rng) {
  const Solution *parents[2] = {&p1, &p2};
  std::vector<char> assigned(static_cast<size_t>(inst.n()), 0);
  Solution child;

  auto admissible = [&](const Route &r) {
    for (int id : r.visits)
      if (inst.is_customer(id) && assigned[static_cast<size_t>(id)]) return false;
    return true;
  };
  auto cost_per_customer = [&](const Route &r) {
    int c = 0;
    for (int id : r.visits)
      if (inst.is_customer(id)) c++;
    if (c == 0) return kInf;
    return route_cost(inst, r) / c;
  };

  int turn = 0;
  while (true) {
    int found_turn = -1;
    int best_route = -1;
    double best_cpc = kInf;
    for (int attempt = 0; attempt < 2 && found_turn < 0; attempt++) {
      const int t = (turn + attempt) % 2;
      for (size_t ri = 0; ri < parents[t]->routes.size(); ri++) {
        const Route &r = parents[t]->routes[ri];
        if (r.empty() || !admissible(r)) continue;
        const double cpc = cost_per_customer(r);
        if (cpc < best_cpc - kEps) {
          best_cpc = cpc;
          best_route = static_cast<int>(ri);
          found_turn = t;
        }
      }
    }
    if (found_turn < 0) break;
    Route copy = parents[found_turn]->routes[static_cast<size_t>(best_route)];
    if (!copy.eval.valid) schedule_route(inst, copy);
    for (int id : copy.visits)
      if (inst.is_customer(id)) assigned[static_cast<size_t>(id)] = 1;
    child.routes.push_back(std::move(copy));
    turn = (found_turn + 1) % 2;
  }

  std::vector<int> missing;
  for (int c = 1; c <= inst.num_customers(); c++)
    if (!assigned[static_cast<size_t>(c)]) missing.push_back(c);

  if (missing.empty()) {
    refresh_cost(inst, child);
    return child;
  }
  try {
    return regret_insert(inst, ranking, std::move(child), std::move(missing), rng);
  } catch (const InstanceInfeasible &) {
    Solution fallback = p1;
    for (Route &r : fallback.routes)
      if (!r.eval.valid) schedule_route(inst, r);
    refresh_cost(inst, fallback);
    return fallback;
  }
}

Solution memetic_search(const Instance &inst, const StationRanking &ranking,
                        const Solution &elite, const HmaParams &params, SearchMode mode, Rng &rng,
                        PssiStats *stats, const Deadline &deadline) {
  const int n = std::max(1, params.population);
  std::vector<Solution> pop = population_init(inst, ranking, elite, n, params, rng);
  for (Solution &s : pop) solution_tc(inst, s);

  Solution best = pop[0];
  for (const Solution &s : pop)
    if (s.tc < best.tc - kEps) best = s;

  PssiParams pssi_params;
  pssi_params.alpha = params.alpha;
  pssi_params.b_generations = params.b_generations;
  pssi_params.sr = params.sr;

  std::vector<int> perm(static_cast<size_t>(n));
  std::iota(perm.begin(), perm.end(), 0);

  int no_improve = 0;
  while (no_improve < params.g2 && !deadline.expired()) {
    rng.shuffle(perm);
    for (int i = 0; i < n && !deadline.expired(); i++) {
      const int a = perm[static_cast<size_t>(i)];
      const int b = perm[static_cast<size_t>((i + 1) % n)];
      Solution child = rari_crossover(inst, ranking, pop[static_cast<size_t>(a)],
                                      pop[static_cast<size_t>(b)], rng);
      child = cdns(inst, ranking, child, mode, pssi_params, rng, stats, deadline);
      if (child.tc < pop[static_cast<size_t>(a)].tc - kEps)
        pop[static_cast<size_t>(a)] = std::move(child);
    }
    double gen_best = kInf;
    int gen_idx = -1;
    for (int i = 0; i < n; i++)
      if (pop[static_cast<size_t>(i)].tc < gen_best - kEps) {
        gen_best = pop[static_cast<size_t>(i)].tc;
        gen_idx = i;
      }
    if (gen_idx >= 0 && gen_best < best.tc - kEps) {
      best = pop[static_cast<size_t>(gen_idx)];
      no_improve = 0;
    } else {
      no_improve++;
    }
  }
  return best;
}

namespace {

int worker_cap() {
  if (const char *env = std::getenv("EVRP_WORKERS")) {
    const int v = std::atoi(env);
    if (v >= 1) return v;
  }
  const unsigned hc = std::thread::hardware_concurrency();
  return hc == 0 ? 1 : static_cast<int>(hc);
}

// Decomposed memetic search: independent subproblems with derived seeds,
// reassembled into one solution on the full instance.
Solution decomposed_ms(const Instance &inst, const StationRanking &ranking, const Solution &elite,
                       const HmaParams &params, Rng &rng, PssiStats *stats,
                       const Deadline &deadline) {
  const int k = params.subproblems > 0 ? params.subproblems
                                       : choose_subproblem_count(inst.num_customers());
  std::vector<SubProblem> subs = bcd_decompose(inst, elite, k);
  if (subs.size() <= 1)
    return memetic_search(inst, ranking, elite, params, SearchMode::large_scale, rng, stats,
                          deadline);

  std::vector<uint64_t> seeds;
  seeds.reserve(subs.size());
  for (size_t i = 0; i < subs.size(); i++) seeds.push_back(rng.child(i).u64());

  std::vector<Solution> results(subs.size());
  std::vector<PssiStats> sub_stats(subs.size());
  const int cap = worker_cap();
  for (size_t base = 0; base < subs.size(); base += static_cast<size_t>(cap)) {
    std::vector<std::future<void>> batch;
    const size_t end = std::min(subs.size(), base + static_cast<size_t>(cap));
    for (size_t i = base; i < end; i++) {
      batch.push_back(std::async(std::launch::async, [&, i]() {
        const SubProblem &sp = subs[i];
        StationRanking sub_ranking = rank_stations(sp.instance, params.sr);
        Rng sub_rng(seeds[i]);
        results[i] = memetic_search(sp.instance, sub_ranking, sp.elite, params,
                                    SearchMode::large_scale, sub_rng, &sub_stats[i], deadline);
      }));
    }
    for (auto &f : batch) f.get();
  }

  if (stats) {
    for (const PssiStats &s : sub_stats) {
      stats->calls += s.calls;
      stats->psi_exclusive += s.psi_exclusive;
      stats->ssi_exclusive += s.ssi_exclusive;
      stats->shared += s.shared;
      stats->psi_time_s += s.psi_time_s;
      stats->ssi_time_s += s.ssi_time_s;
    }
  }

  Solution assembled;
  for (size_t i = 0; i < subs.size(); i++) {
    for (const Route &r : results[i].routes) {
      Route nr;
      for (int id : r.visits)
        nr.visits.push_back(subs[i].orig_of[static_cast<size_t>(id)]);
      nr.charge = r.charge;
      schedule_route(inst, nr);
      assembled.routes.push_back(std::move(nr));
    }
  }
  refresh_cost(inst, assembled);
  return assembled;
}

RunResult solve_on(const Instance &inst, const HmaParams &params) {
  using clock = std::chrono::steady_clock;
  const auto t0 = clock::now();
  const Deadline deadline = Deadline::in_seconds(params.time_limit_s);
  auto elapsed = [&]() { return std::chrono::duration<double>(clock::now() - t0).count(); };

  RunResult res;
  Rng rng(params.seed);
  const StationRanking ranking = rank_stations(inst, params.sr);
  const SearchMode mode = inst.num_customers() >= params.large_scale_threshold
                              ? SearchMode::large_scale
                              : SearchMode::full;

  PssiParams pssi_params;
  pssi_params.alpha = params.alpha;
  pssi_params.b_generations = params.b_generations;
  pssi_params.sr = params.sr;

  RcrsParams rcrs{params.lambda, params.gamma};
  Solution s = rcrs_construct(inst, ranking, rcrs, rng);
  solution_tc(inst, s);
  res.log.push_back({elapsed(), s.tc, s.k()});

  DestroyParams dp{params.omega1, params.omega2};
  int stagnation = 0;
  while (!deadline.expired()) {
    Solution cand = destroy_repair(inst, ranking, s, dp, rng);
    cand = cdns(inst, ranking, cand, mode, pssi_params, rng, &res.pssi, deadline);
    if (cand.tc < s.tc - kEps) {
      s = std::move(cand);
      res.log.push_back({elapsed(), s.tc, s.k()});
      stagnation = 0;
    } else {
      stagnation++;
    }
    if (deadline.expired()) break;
    if (stagnation >= params.g1) {
      Solution ms = mode == SearchMode::large_scale
                        ? decomposed_ms(inst, ranking, s, params, rng, &res.pssi, deadline)
                        : memetic_search(inst, ranking, s, params, mode, rng, &res.pssi, deadline);
      if (ms.tc < s.tc - kEps) {
        s = std::move(ms);
        res.log.push_back({elapsed(), s.tc, s.k()});
        stagnation = 0;
      } else {
        break;  // the memetic phase could not improve the incumbent
      }
    }
  }

  res.best = std::move(s);
  res.wall_s = elapsed();
  res.time_to_best_s = res.log.empty() ? res.wall_s : res.log.back().elapsed_s;
  return res;
}

}  // namespace

RunResult hma_solve(const Instance &inst, const HmaParams &params) {
  if (inst.triangle_ok()) return solve_on(inst, params);

  // Restore the triangle inequality first, then restate the best solution on
  // the original instance with relay stations spliced back in.
  Instance closed = inst;
  const HyperArcMap map = hyperarc_closure(closed);
  RunResult res = solve_on(closed, params);
  Solution expanded = expand_hyperarcs(inst, map, res.best);
  for (Route &r : expanded.routes) schedule_route(inst, r);
  refresh_cost(inst, expanded);
  res.best = std::move(expanded);
  return res;
}

}  // namespace evrp
