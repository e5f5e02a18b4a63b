/* C interface to the EVRP-TW-SPD solver library.
 *
 * All functions return EVRP_OK on success; on failure evrp_last_error()
 * holds a thread-local message. Handles are opaque and freed with the
 * matching *_free function. Instances are immutable after loading and safe
 * to share across concurrent solves.
 */
#ifndef EVRP_H
#define EVRP_H

#include <stddef.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum evrp_status {
  EVRP_OK = 0,
  EVRP_ERR_INVALID_ARG = 1,
  EVRP_ERR_IO = 2,
  EVRP_ERR_PARSE = 3,
  EVRP_ERR_CHECKSUM = 4,
  EVRP_ERR_INFEASIBLE_INSTANCE = 5,
  EVRP_ERR_INTERNAL = 6
} evrp_status;

typedef struct evrp_instance evrp_instance;
typedef struct evrp_run evrp_run;
typedef struct evrp_solution evrp_solution;

const char *evrp_version(void);
/* Message for the most recent failure on this thread. */
const char *evrp_last_error(void);

/* format: "akb", "jd", or NULL/"auto" to sniff. */
evrp_status evrp_instance_load(const char *path, const char *format, evrp_instance **out);
void evrp_instance_free(evrp_instance *inst);

typedef struct evrp_instance_info {
  int customers;
  int stations;
  double load_capacity;
  double battery_capacity;
  double charge_rate;
  double consume_rate;
  double dispatch_cost;
  double distance_cost;
  int geographic; /* 1 when coordinates are lng/lat */
  unsigned long long checksum;
} evrp_instance_info;
evrp_status evrp_instance_get_info(const evrp_instance *inst, evrp_instance_info *out);

typedef struct evrp_params {
  int g1;
  int g2;
  int population;
  double alpha;
  int b_generations;
  double sr;
  double omega1;
  double omega2;
  double lambda;
  double gamma;
  double time_limit_s; /* <= 0 means unlimited */
  int large_scale_threshold;
  int subproblems; /* 0 = automatic by scale */
  unsigned long long seed;
} evrp_params;

/* name: "default", "akb_small", "akb_medium", or "jd". */
evrp_status evrp_params_profile(const char *name, evrp_params *out);
/* Overlays a key-value config file onto *params. */
evrp_status evrp_params_load(const char *path, evrp_params *params);

evrp_status evrp_solve(const evrp_instance *inst, const evrp_params *params, evrp_run **out);
void evrp_run_free(evrp_run *run);

typedef struct evrp_run_stats {
  double best_tc;
  int vehicles;
  double time_to_best_s;
  double wall_s;
  long pssi_calls;
  long psi_exclusive;
  long ssi_exclusive;
  long pssi_shared;
  double psi_time_s;
  double ssi_time_s;
} evrp_run_stats;
evrp_status evrp_run_get_stats(const evrp_run *run, evrp_run_stats *out);

/* Improvement log: (elapsed seconds, total cost, vehicle count) triples. */
int evrp_run_log_size(const evrp_run *run);
evrp_status evrp_run_log_entry(const evrp_run *run, int index, double *elapsed_s, double *tc,
                               int *vehicles);
evrp_status evrp_run_solution(const evrp_run *run, evrp_solution **out);

void evrp_solution_free(evrp_solution *sol);
evrp_status evrp_solution_write(const evrp_instance *inst, const evrp_solution *sol,
                                const char *path);
evrp_status evrp_solution_read(const evrp_instance *inst, const char *path, evrp_solution **out);

typedef struct evrp_feasibility {
  int feasible;
  /* one flag per model constraint */
  int depot_endpoints;
  int customer_coverage;
  int load;
  int time_window;
  int depot_return;
  int battery;
  int violation_count;
  double total_cost; /* recomputed from the routes */
  int vehicles;
} evrp_feasibility;
evrp_status evrp_validate(const evrp_instance *inst, const evrp_solution *sol,
                          evrp_feasibility *out);

typedef struct evrp_gen_params {
  int customers;
  int stations;
  unsigned long long seed;
  double lng0, lat0, lng1, lat1; /* sampling box, degrees; 0s = default box */
  double road_noise;             /* arc factor drawn from [1, 1+noise] */
} evrp_gen_params;
evrp_status evrp_generate_jd(const evrp_gen_params *params, const char *name,
                             const char *out_path);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* EVRP_H */
