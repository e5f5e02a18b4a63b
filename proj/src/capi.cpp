#include "evrp.h"

#include <cmath>
#include <cstring>
#include <limits>
#include <string>

#include "evrp/hma.hpp"
#include "evrp/io.hpp"
#include "evrp/model.hpp"
#include "evrp/params.hpp"

#if defined(__GNUC__)
#define EVRP_EXPORT __attribute__((visibility("default")))
#else
#define EVRP_EXPORT
#endif

namespace {

thread_local std::string g_last_error;

void set_error(const std::string &msg) { g_last_error = msg; }

template <class F>
evrp_status guarded(F &&f) {
  try {
    return f();
  } catch (const evrp::ChecksumError &e) {
    set_error(e.what());
    return EVRP_ERR_CHECKSUM;
  } catch (const evrp::ParseError &e) {
    set_error(e.what());
    return EVRP_ERR_PARSE;
  } catch (const evrp::StructureError &e) {
    set_error(e.what());
    return EVRP_ERR_PARSE;
  } catch (const evrp::InstanceInfeasible &e) {
    set_error(e.what());
    return EVRP_ERR_INFEASIBLE_INSTANCE;
  } catch (const std::invalid_argument &e) {
    set_error(e.what());
    return EVRP_ERR_INVALID_ARG;
  } catch (const std::exception &e) {
    set_error(e.what());
    return EVRP_ERR_IO;
  } catch (...) {
    set_error("unknown error");
    return EVRP_ERR_INTERNAL;
  }
}

evrp::HmaParams to_core(const evrp_params &p) {
  evrp::HmaParams out;
  out.g1 = p.g1;
  out.g2 = p.g2;
  out.population = p.population;
  out.alpha = p.alpha;
  out.b_generations = p.b_generations;
  out.sr = p.sr;
  out.omega1 = p.omega1;
  out.omega2 = p.omega2;
  out.lambda = p.lambda;
  out.gamma = p.gamma;
  out.time_limit_s =
      p.time_limit_s > 0 ? p.time_limit_s : std::numeric_limits<double>::infinity();
  out.large_scale_threshold = p.large_scale_threshold;
  out.subproblems = p.subproblems;
  out.seed = p.seed;
  return out;
}

evrp_params from_core(const evrp::HmaParams &p) {
  evrp_params out;
  out.g1 = p.g1;
  out.g2 = p.g2;
  out.population = p.population;
  out.alpha = p.alpha;
  out.b_generations = p.b_generations;
  out.sr = p.sr;
  out.omega1 = p.omega1;
  out.omega2 = p.omega2;
  out.lambda = p.lambda;
  out.gamma = p.gamma;
  out.time_limit_s = std::isfinite(p.time_limit_s) ? p.time_limit_s : 0.0;
  out.large_scale_threshold = p.large_scale_threshold;
  out.subproblems = p.subproblems;
  out.seed = p.seed;
  return out;
}

}  // namespace

struct evrp_instance {
  evrp::Instance core;
};

struct evrp_solution {
  evrp::Solution core;
};

struct evrp_run {
  evrp::RunResult core;
};

extern "C" {

EVRP_EXPORT const char *evrp_version(void) { return "1.0.0"; }

EVRP_EXPORT const char *evrp_last_error(void) { return g_last_error.c_str(); }

EVRP_EXPORT evrp_status evrp_instance_load(const char *path, const char *format,
                                           evrp_instance **out) {
  if (!path || !out) {
    set_error("null argument");
    return EVRP_ERR_INVALID_ARG;
  }
  return guarded([&]() {
    const std::string fmt = format ? format : "auto";
    auto *handle = new evrp_instance{evrp::load_instance(path, fmt)};
    *out = handle;
    return EVRP_OK;
  });
}

EVRP_EXPORT void evrp_instance_free(evrp_instance *inst) { delete inst; }

EVRP_EXPORT evrp_status evrp_instance_get_info(const evrp_instance *inst,
                                               evrp_instance_info *out) {
  if (!inst || !out) {
    set_error("null argument");
    return EVRP_ERR_INVALID_ARG;
  }
  out->customers = inst->core.num_customers();
  out->stations = inst->core.num_stations();
  out->load_capacity = inst->core.load_capacity();
  out->battery_capacity = inst->core.battery_capacity();
  out->charge_rate = inst->core.charge_rate();
  out->consume_rate = inst->core.consume_rate();
  out->dispatch_cost = inst->core.dispatch_cost();
  out->distance_cost = inst->core.distance_cost();
  out->geographic = inst->core.coord_mode() == evrp::CoordMode::geographic ? 1 : 0;
  out->checksum = inst->core.checksum();
  return EVRP_OK;
}

EVRP_EXPORT evrp_status evrp_params_profile(const char *name, evrp_params *out) {
  if (!name || !out) {
    set_error("null argument");
    return EVRP_ERR_INVALID_ARG;
  }
  return guarded([&]() {
    *out = from_core(evrp::profile_params(name));
    return EVRP_OK;
  });
}

EVRP_EXPORT evrp_status evrp_params_load(const char *path, evrp_params *params) {
  if (!path || !params) {
    set_error("null argument");
    return EVRP_ERR_INVALID_ARG;
  }
  return guarded([&]() {
    *params = from_core(evrp::parse_params(evrp::read_file(path), to_core(*params)));
    return EVRP_OK;
  });
}

EVRP_EXPORT evrp_status evrp_solve(const evrp_instance *inst, const evrp_params *params,
                                   evrp_run **out) {
  if (!inst || !params || !out) {
    set_error("null argument");
    return EVRP_ERR_INVALID_ARG;
  }
  return guarded([&]() {
    auto *run = new evrp_run{evrp::hma_solve(inst->core, to_core(*params))};
    *out = run;
    return EVRP_OK;
  });
}

EVRP_EXPORT void evrp_run_free(evrp_run *run) { delete run; }

EVRP_EXPORT evrp_status evrp_run_get_stats(const evrp_run *run, evrp_run_stats *out) {
  if (!run || !out) {
    set_error("null argument");
    return EVRP_ERR_INVALID_ARG;
  }
  out->best_tc = run->core.best.tc;
  out->vehicles = run->core.best.k();
  out->time_to_best_s = run->core.time_to_best_s;
  out->wall_s = run->core.wall_s;
  out->pssi_calls = run->core.pssi.calls;
  out->psi_exclusive = run->core.pssi.psi_exclusive;
  out->ssi_exclusive = run->core.pssi.ssi_exclusive;
  out->pssi_shared = run->core.pssi.shared;
  out->psi_time_s = run->core.pssi.psi_time_s;
  out->ssi_time_s = run->core.pssi.ssi_time_s;
  return EVRP_OK;
}

EVRP_EXPORT int evrp_run_log_size(const evrp_run *run) {
  return run ? static_cast<int>(run->core.log.size()) : 0;
}

EVRP_EXPORT evrp_status evrp_run_log_entry(const evrp_run *run, int index, double *elapsed_s,
                                           double *tc, int *vehicles) {
  if (!run || index < 0 || index >= evrp_run_log_size(run)) {
    set_error("log index out of range");
    return EVRP_ERR_INVALID_ARG;
  }
  const auto &e = run->core.log[static_cast<size_t>(index)];
  if (elapsed_s) *elapsed_s = e.elapsed_s;
  if (tc) *tc = e.tc;
  if (vehicles) *vehicles = e.vehicles;
  return EVRP_OK;
}

EVRP_EXPORT evrp_status evrp_run_solution(const evrp_run *run, evrp_solution **out) {
  if (!run || !out) {
    set_error("null argument");
    return EVRP_ERR_INVALID_ARG;
  }
  *out = new evrp_solution{run->core.best};
  return EVRP_OK;
}

EVRP_EXPORT void evrp_solution_free(evrp_solution *sol) { delete sol; }

EVRP_EXPORT evrp_status evrp_solution_write(const evrp_instance *inst, const evrp_solution *sol,
                                            const char *path) {
  if (!inst || !sol || !path) {
    set_error("null argument");
    return EVRP_ERR_INVALID_ARG;
  }
  return guarded([&]() {
    evrp::write_file(path, evrp::write_solution(inst->core, sol->core));
    return EVRP_OK;
  });
}

EVRP_EXPORT evrp_status evrp_solution_read(const evrp_instance *inst, const char *path,
                                           evrp_solution **out) {
  if (!inst || !path || !out) {
    set_error("null argument");
    return EVRP_ERR_INVALID_ARG;
  }
  return guarded([&]() {
    auto *sol = new evrp_solution{evrp::read_solution(inst->core, evrp::read_file(path))};
    *out = sol;
    return EVRP_OK;
  });
}

EVRP_EXPORT evrp_status evrp_validate(const evrp_instance *inst, const evrp_solution *sol,
                                      evrp_feasibility *out) {
  if (!inst || !sol || !out) {
    set_error("null argument");
    return EVRP_ERR_INVALID_ARG;
  }
  return guarded([&]() {
    const auto rep = evrp::check_feasibility(inst->core, sol->core);
    out->feasible = rep.feasible() ? 1 : 0;
    out->depot_endpoints = rep.depot_endpoints ? 1 : 0;
    out->customer_coverage = rep.customer_coverage ? 1 : 0;
    out->load = rep.load ? 1 : 0;
    out->time_window = rep.time_window ? 1 : 0;
    out->depot_return = rep.depot_return ? 1 : 0;
    out->battery = rep.battery ? 1 : 0;
    out->violation_count = static_cast<int>(rep.violations.size());
    double td = 0.0;
    for (const auto &r : sol->core.routes) td += evrp::evaluate_route(inst->core, r).td;
    out->total_cost = inst->core.dispatch_cost() * static_cast<double>(sol->core.routes.size()) +
                      inst->core.distance_cost() * td;
    out->vehicles = static_cast<int>(sol->core.routes.size());
    return EVRP_OK;
  });
}

EVRP_EXPORT evrp_status evrp_generate_jd(const evrp_gen_params *params, const char *name,
                                         const char *out_path) {
  if (!params || !out_path) {
    set_error("null argument");
    return EVRP_ERR_INVALID_ARG;
  }
  return guarded([&]() {
    evrp::JdGenParams gp;
    gp.customers = params->customers;
    gp.stations = params->stations;
    gp.seed = params->seed;
    if (params->lng0 != 0 || params->lat0 != 0 || params->lng1 != 0 || params->lat1 != 0) {
      gp.lng0 = params->lng0;
      gp.lat0 = params->lat0;
      gp.lng1 = params->lng1;
      gp.lat1 = params->lat1;
    }
    if (params->road_noise >= 0) gp.road_noise = params->road_noise;
    if (name) gp.name = name;
    evrp::write_file(out_path, evrp::generate_jd_like(gp));
    return EVRP_OK;
  });
}

}  // extern "C"
