#pragma once

#include <string>
#include <vector>

#include "evrp/model.hpp"

namespace evrp {

struct ChecksumError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Schneider-style text with split delivery/pickup demands: one header line,
// node rows (id type x y delivery pickup ready due service), then scalar
// lines (Q, C, r|h, g, optional v) with the value between slashes.
Instance parse_akb(const std::string &text, const std::string &name);

// Line-oriented versioned format with explicit matrices ("EVRP-JD 1").
Instance parse_jd(const std::string &text);
std::string write_jd(const Instance &inst);

struct JdGenParams {
  int customers = 200;
  int stations = 100;
  uint64_t seed = 1;
  double lng0 = 116.20, lat0 = 39.75;  // region box, degrees
  double lng1 = 116.55, lat1 = 40.05;
  double road_noise = 0.3;     // multiplicative factor in [1, 1+noise]
  double speed = 500.0;        // distance units per time unit
  double battery_capacity = 60000.0;
  double load_capacity = 200.0;
  double charge_rate = 0.002;  // time per energy unit
  double consume_rate = 0.001; // energy per distance unit
  double dispatch_cost = 300.0;
  double distance_cost = 0.014;
  double horizon = 1440.0;
  double delivery_max = 50.0;
  double pickup_max = 30.0;
  double window_start_max = 720.0;
  double window_len_min = 60.0;
  double window_len_max = 600.0;
  double service_time = 10.0;
  std::string name;  // default jd<M>_s<seed>
};

// Deterministic per seed; breaks the triangle inequality whenever
// road_noise > 0 (asymmetric per-arc factors).
std::string generate_jd_like(const JdGenParams &params);

std::string write_solution(const Instance &inst, const Solution &sol);
Solution read_solution(const Instance &inst, const std::string &text);

std::string read_file(const std::string &path);
void write_file(const std::string &path, const std::string &content);

// Loads either format; format "auto" sniffs the magic line, otherwise pass
// "akb" or "jd".
Instance load_instance(const std::string &path, const std::string &format = "auto");

}  // namespace evrp
