#include "doctest.h"

#include <cstdlib>
#include <set>

#include "evrp/hma.hpp"
#include "evrp/io.hpp"
#include "support/oracles.hpp"
#include "support/synth.hpp"

using namespace evrp;

namespace {

std::set<int> coverage(const Instance &inst, const Solution &s) {
  std::set<int> out;
  for (const Route &r : s.routes)
    for (int id : r.visits)
      if (inst.is_customer(id)) out.insert(id);
  return out;
}

bool same_solution(const Solution &a, const Solution &b) {
  if (a.routes.size() != b.routes.size()) return false;
  for (size_t i = 0; i < a.routes.size(); i++) {
    if (a.routes[i].visits != b.routes[i].visits) return false;
    for (size_t j = 0; j < a.routes[i].charge.size(); j++)
      if (a.routes[i].charge[j] != b.routes[i].charge[j]) return false;
  }
  return true;
}

}  // namespace

TEST_CASE("seeding grid arithmetic") {
  {
    auto [l, g] = rcrs_grid_weights(6, 9);  // p=2, q=3
    CHECK(l == doctest::Approx(0.5));
    CHECK(g == doctest::Approx(1.0));
  }
  {
    auto [l, g] = rcrs_grid_weights(2, 9);  // p=1, q=2
    CHECK(l == doctest::Approx(0.0));
    CHECK(g == doctest::Approx(0.5));
  }
  {
    auto [l, g] = rcrs_grid_weights(2, 4);  // p=1, q=2
    CHECK(l == doctest::Approx(0.0));
    CHECK(g == doctest::Approx(1.0));
  }
  {
    auto [l, g] = rcrs_grid_weights(4, 4);  // p=2, q=2
    CHECK(l == doctest::Approx(1.0));
    CHECK(g == doctest::Approx(1.0));
  }
}

TEST_CASE("population seeding copies the elite and keeps everyone feasible") {
  synth::RandomOpts opt;
  opt.customers = 8;
  opt.stations = 2;
  Instance inst = synth::random_feasible_instance(31, opt);
  StationRanking ranking = rank_stations(inst, 1.0);
  Rng rng(4);
  Solution elite = rcrs_construct(inst, ranking, {}, rng);

  SUBCASE("n = 1 is just the elite") {
    auto pop = population_init(inst, ranking, elite, 1, {}, rng);
    REQUIRE(pop.size() == 1);
    CHECK(same_solution(pop[0], elite));
  }
  SUBCASE("n = 9 produces nine feasible members") {
    auto pop = population_init(inst, ranking, elite, 9, {}, rng);
    REQUIRE(pop.size() == 9);
    CHECK(same_solution(pop[0], elite));
    for (auto &s : pop) {
      CHECK(check_feasibility(inst, s).feasible());
      CHECK(coverage(inst, s).size() == static_cast<size_t>(inst.num_customers()));
    }
  }
}

TEST_CASE("rari crossover with identical parents preserves coverage") {
  synth::RandomOpts opt;
  opt.customers = 6;
  opt.stations = 2;
  Instance inst = synth::random_feasible_instance(32, opt);
  StationRanking ranking = rank_stations(inst, 1.0);
  Rng rng(9);
  Solution p = rcrs_construct(inst, ranking, {}, rng);
  Solution child = rari_crossover(inst, ranking, p, p, rng);
  CHECK(coverage(inst, child) == coverage(inst, p));
  CHECK(check_feasibility(inst, child).feasible());
}

TEST_CASE("rari crossover joins disjoint single-route parents") {
  Instance inst = synth::make_instance({0, 0, 0, 0, 0, 1000},
                                       {{4, 0, 1, 1, 0, 900, 1}, {0, 4, 1, 1, 0, 900, 1}},
                                       {{2, 2}}, 50, 100, 1, 1);
  StationRanking ranking = rank_stations(inst, 1.0);
  Rng rng(1);
  Solution p1, p2;
  p1.routes.emplace_back(std::vector<int>{0, 1, 0});
  p2.routes.emplace_back(std::vector<int>{0, 2, 0});
  for (auto *s : {&p1, &p2}) {
    for (Route &r : s->routes) schedule_route(inst, r);
    refresh_cost(inst, *s);
  }
  Solution child = rari_crossover(inst, ranking, p1, p2, rng);
  CHECK(coverage(inst, child) == std::set<int>{1, 2});
  CHECK(check_feasibility(inst, child).feasible());
}

TEST_CASE("random crossovers always produce feasible children") {
  synth::RandomOpts opt;
  opt.customers = 8;
  opt.stations = 2;
  int done = 0;
  for (uint64_t seed = 1; seed <= 10; seed++) {
    Instance inst = synth::random_feasible_instance(seed + 50, opt);
    StationRanking ranking = rank_stations(inst, 1.0);
    Rng rng(seed);
    Solution a = rcrs_construct(inst, ranking, {}, rng);
    for (int k = 0; k < 10; k++) {
      Solution b = destroy_repair(inst, ranking, a, {0.3, 0.5}, rng);
      Solution child = rari_crossover(inst, ranking, a, b, rng);
      CHECK(check_feasibility(inst, child).feasible());
      CHECK(coverage(inst, child).size() == static_cast<size_t>(inst.num_customers()));
      done++;
    }
  }
  CHECK(done == 100);
}

TEST_CASE("memetic search never loses to the elite and is deterministic") {
  synth::RandomOpts opt;
  opt.customers = 7;
  opt.stations = 2;
  Instance inst = synth::random_feasible_instance(33, opt);
  StationRanking ranking = rank_stations(inst, 1.0);
  Rng rng(2);
  Solution elite = rcrs_construct(inst, ranking, {}, rng);

  HmaParams params;
  params.population = 4;
  params.g2 = 3;
  Rng a(5), b(5);
  Solution ra = memetic_search(inst, ranking, elite, params, SearchMode::full, a);
  Solution rb = memetic_search(inst, ranking, elite, params, SearchMode::full, b);
  CHECK(ra.tc <= elite.tc + kEps);
  CHECK(same_solution(ra, rb));

  SUBCASE("population of one degenerates to self-crossover") {
    HmaParams p1 = params;
    p1.population = 1;
    Rng c(6);
    Solution rc = memetic_search(inst, ranking, elite, p1, SearchMode::full, c);
    CHECK(rc.tc <= elite.tc + kEps);
    CHECK(check_feasibility(inst, rc).feasible());
  }
}

TEST_CASE("barycenters average the non-depot visits") {
  Instance inst = synth::make_instance({0, 0, 0, 0, 0, 1000},
                                       {{2, 0, 1, 1, 0, 900, 0}, {4, 2, 1, 1, 0, 900, 0}},
                                       {{2, 4}}, 50, 100, 1, 1);
  Solution s;
  s.routes.emplace_back(std::vector<int>{0, 1, 3, 2, 0});
  auto bc = route_barycenters(inst, s);
  REQUIRE(bc.size() == 1);
  CHECK(bc[0].x == doctest::Approx((2.0 + 2.0 + 4.0) / 3));
  CHECK(bc[0].y == doctest::Approx((0.0 + 4.0 + 2.0) / 3));
}

TEST_CASE("bcd with k = 1 is the whole instance restated") {
  synth::RandomOpts opt;
  opt.customers = 6;
  opt.stations = 2;
  Instance inst = synth::random_feasible_instance(34, opt);
  StationRanking ranking = rank_stations(inst, 1.0);
  Rng rng(3);
  Solution s = rcrs_construct(inst, ranking, {}, rng);
  auto subs = bcd_decompose(inst, s, 1);
  REQUIRE(subs.size() == 1);
  CHECK(subs[0].instance.num_customers() == inst.num_customers());
  CHECK(subs[0].instance.num_stations() == inst.num_stations());
  CHECK(check_feasibility(subs[0].instance, subs[0].elite).feasible());
}

TEST_CASE("bcd recovers planted route clusters and partitions the customers") {
  // two far-apart blobs of customers, two routes each
  std::vector<synth::NodeSpec> customers;
  for (int i = 0; i < 4; i++) customers.push_back({double(i % 2), 100.0 + i / 2, 1, 1, 0, 4000, 0});
  for (int i = 0; i < 4; i++) customers.push_back({50.0 + i % 2, -80.0 + i / 2, 1, 1, 0, 4000, 0});
  Instance inst = synth::make_instance({10, 10, 0, 0, 0, 4000}, customers, {{9, 9}, {11, 11}},
                                       50, 1000, 1, 1);
  Solution s;
  s.routes.emplace_back(std::vector<int>{0, 1, 2, 0});
  s.routes.emplace_back(std::vector<int>{0, 3, 4, 0});
  s.routes.emplace_back(std::vector<int>{0, 5, 6, 0});
  s.routes.emplace_back(std::vector<int>{0, 7, 8, 0});
  for (Route &r : s.routes) schedule_route(inst, r);

  auto subs = bcd_decompose(inst, s, 2);
  REQUIRE(subs.size() == 2);
  std::set<int> seen;
  for (auto &sp : subs) {
    CHECK(sp.instance.num_stations() == inst.num_stations());
    std::set<int> mine;
    for (int c = 1; c <= sp.instance.num_customers(); c++) {
      const int orig = sp.orig_of[static_cast<size_t>(c)];
      mine.insert(orig);
      CHECK(!seen.count(orig));
      seen.insert(orig);
    }
    // the planted blobs must not be split
    const bool first_blob = mine.count(1) > 0;
    for (int c : mine) CHECK(first_blob == (c <= 4));
  }
  CHECK(seen.size() == 8);
}

TEST_CASE("customer partition holds for random solutions and any k") {
  for (uint64_t seed = 1; seed <= 6; seed++) {
    synth::RandomOpts opt;
    opt.customers = 9;
    opt.stations = 2;
    Instance inst = synth::random_feasible_instance(seed + 70, opt);
    StationRanking ranking = rank_stations(inst, 1.0);
    Rng rng(seed);
    Solution s = synth::random_feasible_solution(inst, ranking, rng);
    for (int k = 1; k <= 4; k++) {
      auto subs = bcd_decompose(inst, s, k);
      CHECK(static_cast<int>(subs.size()) <= std::max(1, std::min(k, s.k())));
      std::set<int> seen;
      size_t total = 0;
      for (auto &sp : subs) {
        for (int c = 1; c <= sp.instance.num_customers(); c++) {
          seen.insert(sp.orig_of[static_cast<size_t>(c)]);
          total++;
        }
        CHECK(check_feasibility(sp.instance, sp.elite).feasible());
      }
      CHECK(seen.size() == total);
      CHECK(seen.size() == static_cast<size_t>(inst.num_customers()));
    }
  }
}

TEST_CASE("subproblem count mapping follows the published scales") {
  CHECK(choose_subproblem_count(200) == 2);
  CHECK(choose_subproblem_count(400) == 4);
  CHECK(choose_subproblem_count(600) == 6);
  CHECK(choose_subproblem_count(800) == 8);
  CHECK(choose_subproblem_count(1000) == 10);
  CHECK(choose_subproblem_count(1700) == 10);
}

TEST_CASE("hma matches the exhaustive optimum on small instances") {
  for (uint64_t seed = 1; seed <= 6; seed++) {
    synth::RandomOpts opt;
    opt.customers = 4;
    opt.stations = 2;
    opt.battery_factor = 0.85;
    Instance inst = synth::random_feasible_instance(seed + 150, opt);
    const double want = oracle::brute_force_optimum(inst);
    REQUIRE(want < oracle::kInf);

    HmaParams params;
    params.g1 = 6;
    params.g2 = 4;
    params.population = 4;
    params.seed = seed;
    RunResult res = hma_solve(inst, params);
    CHECK(check_feasibility(inst, res.best).feasible());
    CHECK(res.best.tc == doctest::Approx(want).epsilon(0).scale(1).epsilon(1e-3));

    // the improvement log is consistent and monotone
    REQUIRE(!res.log.empty());
    for (size_t i = 1; i < res.log.size(); i++) CHECK(res.log[i].tc < res.log[i - 1].tc + kEps);
    CHECK(res.best.tc == doctest::Approx(res.log.back().tc).epsilon(1e-9));
    CHECK(res.best.k() == res.log.back().vehicles);
  }
}

TEST_CASE("hma runs are deterministic, including with decomposed memetic search") {
  synth::RandomOpts opt;
  opt.customers = 10;
  opt.stations = 2;
  Instance inst = synth::random_feasible_instance(35, opt);
  HmaParams params;
  params.g1 = 3;
  params.g2 = 2;
  params.population = 4;
  params.seed = 99;
  params.large_scale_threshold = 5;  // force large-scale mode and BCD
  params.subproblems = 2;

  setenv("EVRP_WORKERS", "1", 1);
  RunResult a = hma_solve(inst, params);
  setenv("EVRP_WORKERS", "4", 1);
  RunResult b = hma_solve(inst, params);
  unsetenv("EVRP_WORKERS");
  CHECK(same_solution(a.best, b.best));
  CHECK(a.best.tc == doctest::Approx(b.best.tc).epsilon(1e-12));
  CHECK(check_feasibility(inst, a.best).feasible());

  RunResult c = hma_solve(inst, params);
  CHECK(same_solution(a.best, c.best));
}

TEST_CASE("geographic instances are closed, solved, and restated losslessly") {
  JdGenParams gen;
  gen.customers = 8;
  gen.stations = 3;
  gen.seed = 5;
  gen.road_noise = 0.4;
  Instance inst = parse_jd(generate_jd_like(gen));
  REQUIRE(!inst.triangle_ok());

  HmaParams params;
  params.g1 = 4;
  params.g2 = 2;
  params.population = 4;
  params.seed = 3;
  RunResult res = hma_solve(inst, params);
  // the returned solution lives on the original, non-closed instance
  CHECK(check_feasibility(inst, res.best).feasible());
  CHECK(coverage(inst, res.best).size() == static_cast<size_t>(inst.num_customers()));
  CHECK(res.best.tc == doctest::Approx(total_cost(inst, res.best)).epsilon(1e-9));
}
