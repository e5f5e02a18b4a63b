#include "doctest.h"

#include "evrp/construct.hpp"
#include "evrp/io.hpp"
#include "evrp/preprocess.hpp"
#include "support/synth.hpp"

using namespace evrp;

namespace {

const char *kMiniAkb =
    "StringID Type x y delivery pickup ReadyTime DueDate ServiceTime\n"
    "D0 d 40.0 50.0 0.0 0.0 0.0 1236.0 0.0\n"
    "S0 f 30.0 50.0 0.0 0.0 0.0 1236.0 0.0\n"
    "C1 c 45.0 68.0 8.0 2.0 912.0 967.0 90.0\n"
    "\n"
    "Q Vehicle fuel tank capacity /77.75/\n"
    "C Vehicle load capacity /200.0/\n"
    "r fuel consumption rate /1.0/\n"
    "g inverse refueling rate /3.39/\n"
    "v average Velocity /1.0/\n";

}  // namespace

TEST_CASE("akb parsing reads nodes, scalars, and defaults") {
  Instance inst = parse_akb(kMiniAkb, "mini");
  CHECK(inst.num_customers() == 1);
  CHECK(inst.num_stations() == 1);
  CHECK(inst.battery_capacity() == doctest::Approx(77.75));
  CHECK(inst.load_capacity() == doctest::Approx(200.0));
  CHECK(inst.consume_rate() == doctest::Approx(1.0));
  CHECK(inst.charge_rate() == doctest::Approx(3.39));
  CHECK(inst.dispatch_cost() == doctest::Approx(1000.0));
  CHECK(inst.distance_cost() == doctest::Approx(1.0));
  CHECK(inst.triangle_ok());
  // customer is id 1, station id 2 regardless of file order
  CHECK(inst.is_customer(1));
  CHECK(inst.is_station(2));
  CHECK(inst.node(1).delivery == doctest::Approx(8.0));
  CHECK(inst.node(1).pickup == doctest::Approx(2.0));
  // distances Euclidean and symmetric with zero diagonal
  for (int i = 0; i < inst.n(); i++) {
    CHECK(inst.dist(i, i) == 0.0);
    for (int j = 0; j < inst.n(); j++) {
      CHECK(inst.dist(i, j) == doctest::Approx(inst.dist(j, i)));
      CHECK(inst.time(i, j) == doctest::Approx(inst.dist(i, j)));  // velocity 1
    }
  }
  CHECK(inst.dist(0, 2) == doctest::Approx(10.0));
}

TEST_CASE("akb parse errors carry line numbers and nothing defaults silently") {
  SUBCASE("missing battery capacity") {
    std::string text =
        "D0 d 0 0 0 0 0 100 0\n"
        "C1 c 1 0 1 1 0 100 0\n"
        "C Vehicle load capacity /200.0/\n"
        "r fuel consumption rate /1.0/\n"
        "g inverse refueling rate /3.39/\n";
    CHECK_THROWS_AS(parse_akb(text, "x"), ParseError);
  }
  SUBCASE("garbage line is rejected with its line number") {
    std::string text = std::string(kMiniAkb) + "what is this\n";
    try {
      parse_akb(text, "x");
      FAIL("expected a parse error");
    } catch (const ParseError &e) {
      CHECK(e.line == 11);
    }
  }
  SUBCASE("bad number in a node row") {
    std::string text =
        "D0 d 0 0 0 0 0 1x0 0\n"
        "C1 c 1 0 1 1 0 100 0\n"
        "Q Vehicle fuel tank capacity /10/\n"
        "C Vehicle load capacity /200.0/\n"
        "r fuel consumption rate /1.0/\n"
        "g inverse refueling rate /3.39/\n";
    CHECK_THROWS_AS(parse_akb(text, "x"), ParseError);
  }
}

TEST_CASE("jd files round-trip losslessly, keeping asymmetry") {
  JdGenParams gen;
  gen.customers = 6;
  gen.stations = 2;
  gen.seed = 17;
  gen.road_noise = 0.4;
  const std::string text = generate_jd_like(gen);
  Instance inst = parse_jd(text);
  CHECK(inst.num_customers() == 6);
  CHECK(inst.num_stations() == 2);
  CHECK(!inst.triangle_ok());
  CHECK(inst.coord_mode() == CoordMode::geographic);
  CHECK(inst.dispatch_cost() == doctest::Approx(300.0));
  CHECK(inst.distance_cost() == doctest::Approx(0.014));

  // asymmetric entries survive
  bool asym = false;
  for (int i = 0; i < inst.n() && !asym; i++)
    for (int j = 0; j < inst.n() && !asym; j++)
      if (inst.dist(i, j) != inst.dist(j, i)) asym = true;
  CHECK(asym);

  const std::string again = write_jd(inst);
  CHECK(text == again);
  Instance reparsed = parse_jd(again);
  CHECK(reparsed.checksum() == inst.checksum());
}

TEST_CASE("generator output is byte-identical per seed and violates the triangle") {
  JdGenParams gen;
  gen.customers = 10;
  gen.stations = 3;
  gen.seed = 4;
  CHECK(generate_jd_like(gen) == generate_jd_like(gen));
  gen.seed = 5;
  const std::string other = generate_jd_like(gen);
  CHECK(other != generate_jd_like({10, 3, 4}));

  Instance inst = parse_jd(other);
  long violations = 0;
  for (int i = 0; i < inst.n(); i++)
    for (int j = 0; j < inst.n(); j++)
      for (int k = 0; k < inst.n(); k++)
        if (i != j && j != k && i != k &&
            inst.dist(i, j) > inst.dist(i, k) + inst.dist(k, j) + 1e-9)
          violations++;
    CHECK(violations > 0);

  SUBCASE("node counts follow the requested sizes") {
    JdGenParams big;
    big.customers = 200;
    big.stations = 100;
    big.seed = 1;
    Instance large = parse_jd(generate_jd_like(big));
    CHECK(large.n() == 301);
  }
}

TEST_CASE("jd parser rejects malformed files precisely") {
  JdGenParams gen;
  gen.customers = 3;
  gen.stations = 1;
  const std::string good = generate_jd_like(gen);

  SUBCASE("wrong magic") { CHECK_THROWS_AS(parse_jd("EVRP-XX 1\n"), ParseError); }
  SUBCASE("dimension mismatch") {
    std::string text = good;
    const auto pos = text.find("customers 3");
    text.replace(pos, 11, "customers 4");
    CHECK_THROWS_AS(parse_jd(text), ParseError);
  }
  SUBCASE("negative matrix entry") {
    std::string text = good;
    const auto pos = text.find("\ndist\n");
    // negate the first off-diagonal entry of the dist matrix
    auto row_start = text.find('\n', pos + 6);
    auto space = text.find(' ', pos + 6);
    text.insert(space + 1, "-");
    (void)row_start;
    CHECK_THROWS_AS(parse_jd(text), ParseError);
  }
  SUBCASE("missing scalar") {
    std::string text = good;
    const auto pos = text.find("charge_rate");
    const auto end = text.find('\n', pos);
    text.erase(pos, end - pos + 1);
    CHECK_THROWS_AS(parse_jd(text), ParseError);
  }
}

TEST_CASE("solution files round-trip and guard instance pairing") {
  synth::RandomOpts opt;
  opt.customers = 6;
  opt.stations = 2;
  opt.battery_factor = 0.8;
  Instance inst = synth::random_feasible_instance(3, opt);
  StationRanking ranking = rank_stations(inst, 1.0);
  Rng rng(8);
  Solution sol = synth::random_feasible_solution(inst, ranking, rng);
  refresh_cost(inst, sol);

  SUBCASE("empty solution round trip") {
    Solution empty;
    Solution back = read_solution(inst, write_solution(inst, empty));
    CHECK(back.routes.empty());
    CHECK(back.tc == 0.0);
  }

  const std::string text = write_solution(inst, sol);
  Solution back = read_solution(inst, text);
  REQUIRE(back.routes.size() == sol.routes.size());
  for (size_t i = 0; i < back.routes.size(); i++) {
    CHECK(back.routes[i].visits == sol.routes[i].visits);
    for (size_t j = 0; j < back.routes[i].charge.size(); j++)
      CHECK(back.routes[i].charge[j] == sol.routes[i].charge[j]);
  }
  CHECK(back.tc == doctest::Approx(sol.tc).epsilon(1e-9));
  CHECK(total_cost(inst, back) == doctest::Approx(sol.tc).epsilon(1e-9));

  SUBCASE("checksum mismatch against another instance") {
    Instance other = synth::random_feasible_instance(4, opt);
    CHECK_THROWS_AS(read_solution(other, text), ChecksumError);
  }
  SUBCASE("tampered charge breaks the battery check downstream") {
    Solution bad = back;
    for (Route &r : bad.routes)
      for (size_t i = 0; i < r.visits.size(); i++)
        if (inst.is_station(r.visits[i])) r.charge[i] = inst.battery_capacity() * 2;
    bool any_station = false;
    for (Route &r : bad.routes)
      for (int id : r.visits)
        if (inst.is_station(id)) any_station = true;
    if (any_station) {
      auto rep = check_feasibility(inst, bad);
      CHECK(!rep.battery);
    }
  }
}
