// Command-line front end: solve, validate, bench, report, gen.
// Talks to the solver exclusively through the C API in evrp.h.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <mutex>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "evrp.h"

namespace {

constexpr const char *kBenchSchema = "# evrp-bench-csv v1";
constexpr const char *kRunlogSchema = "# evrp-runlog-csv v1";
constexpr const char *kGapSchema = "# evrp-gap-csv v1";

struct CliError {
  int exit_code;
  std::string message;
};

void fail(int code, const std::string &msg) { throw CliError{code, msg}; }

void check(evrp_status st, int exit_code = 2) {
  if (st != EVRP_OK) fail(exit_code, evrp_last_error());
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string fmt2(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

struct ParamsCli {
  std::string profile = "default";
  std::string config;
  uint64_t seed = 1;
  double time_limit = 0.0;
  int subproblems = 0;

  void attach(CLI::App *cmd) {
    cmd->add_option("--profile", profile,
                    "parameter profile: default, akb_small, akb_medium, jd");
    cmd->add_option("--config", config, "key-value parameter file overlaying the profile");
    cmd->add_option("--seed", seed, "random seed");
    cmd->add_option("--time-limit", time_limit, "wall-clock budget in seconds (0 = unlimited)");
    cmd->add_option("--subproblems", subproblems,
                    "decomposition count for large-scale runs (0 = by scale)");
  }

  evrp_params resolve() const {
    evrp_params p;
    check(evrp_params_profile(profile.c_str(), &p));
    if (!config.empty()) check(evrp_params_load(config.c_str(), &p));
    p.seed = seed;
    if (time_limit > 0) p.time_limit_s = time_limit;
    if (subproblems > 0) p.subproblems = subproblems;
    return p;
  }
};

struct InstanceHandle {
  evrp_instance *ptr = nullptr;
  ~InstanceHandle() { evrp_instance_free(ptr); }
};

struct RunHandle {
  evrp_run *ptr = nullptr;
  ~RunHandle() { evrp_run_free(ptr); }
};

struct SolutionHandle {
  evrp_solution *ptr = nullptr;
  ~SolutionHandle() { evrp_solution_free(ptr); }
};

std::string instance_stem(const std::string &path) {
  std::string name = path;
  const auto slash = name.find_last_of("/\\");
  if (slash != std::string::npos) name = name.substr(slash + 1);
  const auto dot = name.find_last_of('.');
  if (dot != std::string::npos) name = name.substr(0, dot);
  return name;
}

int worker_cap(int requested) {
  if (const char *env = std::getenv("EVRP_WORKERS")) {
    const int v = std::atoi(env);
    if (v >= 1) return v;
  }
  return std::max(1, requested);
}

// ---------------------------------------------------------------- solve ---

int cmd_solve(const std::string &path, const std::string &format, const ParamsCli &pc,
              const std::string &out_path, const std::string &log_path) {
  InstanceHandle inst;
  check(evrp_instance_load(path.c_str(), format.empty() ? nullptr : format.c_str(), &inst.ptr));
  const evrp_params params = pc.resolve();

  RunHandle run;
  check(evrp_solve(inst.ptr, &params, &run.ptr));
  evrp_run_stats stats;
  check(evrp_run_get_stats(run.ptr, &stats));

  SolutionHandle sol;
  check(evrp_run_solution(run.ptr, &sol.ptr));
  if (!out_path.empty()) check(evrp_solution_write(inst.ptr, sol.ptr, out_path.c_str()));

  if (!log_path.empty()) {
    std::ofstream log(log_path);
    if (!log) fail(2, "cannot write run log: " + log_path);
    log << kRunlogSchema << "\n";
    log << "elapsed_s,tc,vehicles\n";
    for (int i = 0; i < evrp_run_log_size(run.ptr); i++) {
      double t, tc;
      int k;
      check(evrp_run_log_entry(run.ptr, i, &t, &tc, &k));
      log << fmt(t) << "," << fmt(tc) << "," << k << "\n";
    }
  }

  std::cout << "instance " << instance_stem(path) << "\n";
  std::cout << "tc " << fmt2(stats.best_tc) << "\n";
  std::cout << "vehicles " << stats.vehicles << "\n";
  std::cout << "time_to_best_s " << fmt2(stats.time_to_best_s) << "\n";
  std::cout << "wall_s " << fmt2(stats.wall_s) << "\n";
  return 0;
}

// -------------------------------------------------------------- validate ---

int cmd_validate(const std::string &instance_path, const std::string &solution_path,
                 const std::string &format) {
  InstanceHandle inst;
  check(evrp_instance_load(instance_path.c_str(), format.empty() ? nullptr : format.c_str(),
                           &inst.ptr));
  SolutionHandle sol;
  const evrp_status rd = evrp_solution_read(inst.ptr, solution_path.c_str(), &sol.ptr);
  if (rd == EVRP_ERR_CHECKSUM) fail(3, evrp_last_error());
  check(rd);

  evrp_feasibility rep;
  check(evrp_validate(inst.ptr, sol.ptr, &rep));
  auto verdict = [](int ok) { return ok ? "ok" : "violated"; };
  std::cout << "constraint_6_depot_endpoints " << verdict(rep.depot_endpoints) << "\n";
  std::cout << "constraint_7_customer_coverage " << verdict(rep.customer_coverage) << "\n";
  std::cout << "constraint_8_load " << verdict(rep.load) << "\n";
  std::cout << "constraint_9_time_windows " << verdict(rep.time_window) << "\n";
  std::cout << "constraint_10_depot_return " << verdict(rep.depot_return) << "\n";
  std::cout << "constraint_11_battery " << verdict(rep.battery) << "\n";
  std::cout << "violations " << rep.violation_count << "\n";
  std::cout << "vehicles " << rep.vehicles << "\n";
  std::cout << "tc " << fmt2(rep.total_cost) << "\n";
  std::cout << (rep.feasible ? "feasible" : "infeasible") << "\n";
  return rep.feasible ? 0 : 1;
}

// ----------------------------------------------------------------- bench ---

struct BenchRow {
  std::string instance;
  uint64_t seed = 0;
  bool failed = false;
  std::string error;
  evrp_run_stats stats{};
};

int cmd_bench(const std::string &manifest_path, int repetitions, int parallel,
              const ParamsCli &pc, const std::string &out_path, bool emit_pssi) {
  std::ifstream mf(manifest_path);
  if (!mf) fail(2, "cannot open manifest: " + manifest_path);
  std::vector<std::string> paths;
  std::string line;
  while (std::getline(mf, line)) {
    if (line.empty() || line[0] == '#') continue;
    paths.push_back(line);
  }
  if (paths.empty()) fail(2, "manifest lists no instances");

  struct Job {
    size_t instance_idx;
    int rep;
  };
  std::vector<Job> jobs;
  for (size_t i = 0; i < paths.size(); i++)
    for (int r = 0; r < repetitions; r++) jobs.push_back({i, r});

  std::vector<BenchRow> rows(jobs.size());
  std::atomic<size_t> next{0};
  const evrp_params base = pc.resolve();

  auto work = [&]() {
    for (;;) {
      const size_t j = next.fetch_add(1);
      if (j >= jobs.size()) return;
      const Job &job = jobs[j];
      BenchRow &row = rows[j];
      row.instance = instance_stem(paths[job.instance_idx]);
      row.seed = base.seed + static_cast<uint64_t>(job.rep);
      evrp_instance *inst = nullptr;
      if (evrp_instance_load(paths[job.instance_idx].c_str(), nullptr, &inst) != EVRP_OK) {
        row.failed = true;
        row.error = evrp_last_error();
        continue;
      }
      evrp_params p = base;
      p.seed = row.seed;
      evrp_run *run = nullptr;
      if (evrp_solve(inst, &p, &run) != EVRP_OK) {
        row.failed = true;
        row.error = evrp_last_error();
        evrp_instance_free(inst);
        continue;
      }
      evrp_run_get_stats(run, &row.stats);
      evrp_run_free(run);
      evrp_instance_free(inst);
    }
  };

  const int workers = std::min<int>(worker_cap(parallel), static_cast<int>(jobs.size()));
  std::vector<std::thread> pool;
  for (int w = 0; w < workers; w++) pool.emplace_back(work);
  for (auto &t : pool) t.join();

  std::ostream *os = &std::cout;
  std::ofstream file;
  if (!out_path.empty()) {
    file.open(out_path);
    if (!file) fail(2, "cannot write: " + out_path);
    os = &file;
  }
  *os << kBenchSchema << "\n";
  *os << "kind,instance,seed,tc,vehicles,time_to_best_s,wall_s,best_tc,avg_tc,std_tc,error";
  if (emit_pssi)
    *os << ",pssi_calls,psi_exclusive,ssi_exclusive,pssi_shared,psi_time_s,ssi_time_s";
  *os << "\n";

  int failures = 0;
  for (size_t i = 0; i < paths.size(); i++) {
    const std::string name = instance_stem(paths[i]);
    std::vector<const BenchRow *> mine;
    for (size_t j = 0; j < jobs.size(); j++)
      if (jobs[j].instance_idx == i) mine.push_back(&rows[j]);

    double best = 0, sum = 0, sum2 = 0;
    int best_k = 0, n_ok = 0;
    double ttb_sum = 0;
    bool have_best = false;
    for (const BenchRow *r : mine) {
      if (r->failed) {
        failures++;
        *os << "run," << name << "," << r->seed << ",,,,,,,,\"" << r->error << "\"";
        if (emit_pssi) *os << ",,,,,,";
        *os << "\n";
        continue;
      }
      n_ok++;
      sum += r->stats.best_tc;
      sum2 += r->stats.best_tc * r->stats.best_tc;
      ttb_sum += r->stats.time_to_best_s;
      if (!have_best || r->stats.best_tc < best) {
        best = r->stats.best_tc;
        best_k = r->stats.vehicles;
        have_best = true;
      }
      *os << "run," << name << "," << r->seed << "," << fmt(r->stats.best_tc) << ","
          << r->stats.vehicles << "," << fmt(r->stats.time_to_best_s) << ","
          << fmt(r->stats.wall_s) << ",,,,";
      if (emit_pssi)
        *os << "," << r->stats.pssi_calls << "," << r->stats.psi_exclusive << ","
            << r->stats.ssi_exclusive << "," << r->stats.pssi_shared << ","
            << fmt(r->stats.psi_time_s) << "," << fmt(r->stats.ssi_time_s);
      *os << "\n";
    }
    if (n_ok > 0) {
      const double avg = sum / n_ok;
      const double var = std::max(0.0, sum2 / n_ok - avg * avg);
      *os << "agg," << name << ",,,," << fmt(ttb_sum / n_ok) << ",," << fmt(best) << ","
          << fmt(avg) << "," << fmt(std::sqrt(var)) << ",";
      if (emit_pssi) *os << ",,,,,,";
      *os << "\n";
      (void)best_k;
    }
  }
  return failures == 0 ? 0 : 1;
}

// ---------------------------------------------------------------- report ---

std::vector<std::string> split_csv(const std::string &line) {
  std::vector<std::string> out;
  std::string cur;
  bool quoted = false;
  for (char c : line) {
    if (c == '"') {
      quoted = !quoted;
    } else if (c == ',' && !quoted) {
      out.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  out.push_back(cur);
  return out;
}

int cmd_report(const std::string &bench_csv, const std::string &reference_csv,
               const std::string &out_path) {
  // reference: instance,tc rows (header optional)
  std::ifstream ref(reference_csv);
  if (!ref) fail(2, "cannot open reference table: " + reference_csv);
  std::vector<std::pair<std::string, double>> reference;
  std::string line;
  while (std::getline(ref, line)) {
    if (line.empty() || line[0] == '#') continue;
    auto cols = split_csv(line);
    if (cols.size() < 2 || cols[0] == "instance") continue;
    try {
      reference.emplace_back(cols[0], std::stod(cols[1]));
    } catch (const std::exception &) {
      fail(2, "bad reference row: " + line);
    }
  }

  std::ifstream bench(bench_csv);
  if (!bench) fail(2, "cannot open bench csv: " + bench_csv);
  std::vector<std::pair<std::string, double>> bests;  // from agg rows
  while (std::getline(bench, line)) {
    if (line.empty() || line[0] == '#') continue;
    auto cols = split_csv(line);
    if (cols.size() < 8 || cols[0] != "agg") continue;
    try {
      bests.emplace_back(cols[1], std::stod(cols[7]));
    } catch (const std::exception &) {
      fail(2, "bad agg row: " + line);
    }
  }
  if (bests.empty()) fail(2, "bench csv holds no aggregate rows");

  std::ostream *os = &std::cout;
  std::ofstream file;
  if (!out_path.empty()) {
    file.open(out_path);
    if (!file) fail(2, "cannot write: " + out_path);
    os = &file;
  }
  *os << kGapSchema << "\n";
  *os << "instance,solver_tc,reference_tc,gap_pct\n";
  double gap_sum = 0;
  int covered = 0, missing = 0;
  for (auto &[name, tc] : bests) {
    const std::pair<std::string, double> *hit = nullptr;
    for (auto &r : reference)
      if (r.first == name) hit = &r;
    if (!hit) {
      *os << name << "," << fmt(tc) << ",,missing_reference\n";
      missing++;
      continue;
    }
    const double gap = (tc - hit->second) / hit->second * 100.0;
    gap_sum += gap;
    covered++;
    *os << name << "," << fmt(tc) << "," << fmt(hit->second) << "," << fmt2(gap) << "\n";
  }
  if (covered > 0) *os << "average,,," << fmt2(gap_sum / covered) << "\n";
  if (missing > 0)
    std::cerr << "warning: " << missing << " instance(s) missing from the reference table\n";
  return 0;
}

// ------------------------------------------------------------------- gen ---

int cmd_gen(int customers, int stations, uint64_t seed, double noise,
            const std::vector<double> &box, const std::string &name, const std::string &out) {
  evrp_gen_params gp{};
  gp.customers = customers;
  gp.stations = stations;
  gp.seed = seed;
  gp.road_noise = noise;
  if (box.size() == 4) {
    gp.lng0 = box[0];
    gp.lat0 = box[1];
    gp.lng1 = box[2];
    gp.lat1 = box[3];
  }
  check(evrp_generate_jd(&gp, name.empty() ? nullptr : name.c_str(), out.c_str()));
  std::cout << "wrote " << out << "\n";
  return 0;
}

}  // namespace

int main(int argc, char **argv) {
  CLI::App app{"EVRP-TW-SPD hybrid memetic solver"};
  app.require_subcommand(1);

  // solve
  auto *solve = app.add_subcommand("solve", "solve one instance");
  std::string solve_path, solve_format, solve_out, solve_log;
  ParamsCli solve_params;
  solve->add_option("instance", solve_path, "instance file")->required();
  solve->add_option("--format", solve_format, "akb, jd, or auto");
  solve->add_option("--out", solve_out, "solution file to write");
  solve->add_option("--log", solve_log, "improvement log CSV to write");
  solve_params.attach(solve);

  // validate
  auto *validate = app.add_subcommand("validate", "check a solution file against its instance");
  std::string val_inst, val_sol, val_format;
  validate->add_option("instance", val_inst, "instance file")->required();
  validate->add_option("solution", val_sol, "solution file")->required();
  validate->add_option("--format", val_format, "akb, jd, or auto");

  // bench
  auto *bench = app.add_subcommand("bench", "batch-run a manifest of instances");
  std::string bench_manifest, bench_out;
  int bench_reps = 10, bench_parallel = 1;
  bool bench_pssi = false;
  ParamsCli bench_params;
  bench->add_option("manifest", bench_manifest, "text file with one instance path per line")
      ->required();
  bench->add_option("--reps", bench_reps, "independent runs per instance");
  bench->add_option("--parallel", bench_parallel,
                    "concurrent runs (EVRP_WORKERS overrides)");
  bench->add_option("--out", bench_out, "CSV output path (stdout when omitted)");
  bench->add_flag("--pssi-stats", bench_pssi, "append station-insertion counter columns");
  bench_params.attach(bench);

  // report
  auto *report = app.add_subcommand("report", "gap report against a reference table");
  std::string rep_bench, rep_ref, rep_out;
  report->add_option("bench_csv", rep_bench, "bench output CSV")->required();
  report->add_option("reference_csv", rep_ref, "reference table: instance,tc")->required();
  report->add_option("--out", rep_out, "CSV output path (stdout when omitted)");

  // gen
  auto *gen = app.add_subcommand("gen", "generate a geographic benchmark instance");
  int gen_customers = 200, gen_stations = 100;
  uint64_t gen_seed = 1;
  double gen_noise = 0.3;
  std::vector<double> gen_box;
  std::string gen_name, gen_out;
  gen->add_option("--customers", gen_customers, "customer count");
  gen->add_option("--stations", gen_stations, "station count");
  gen->add_option("--seed", gen_seed, "generator seed");
  gen->add_option("--noise", gen_noise, "road factor noise in [0, 1)");
  gen->add_option("--box", gen_box, "sampling box: lng0 lat0 lng1 lat1")->expected(4);
  gen->add_option("--name", gen_name, "instance name");
  gen->add_option("--out", gen_out, "output file")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*solve) return cmd_solve(solve_path, solve_format, solve_params, solve_out, solve_log);
    if (*validate) return cmd_validate(val_inst, val_sol, val_format);
    if (*bench)
      return cmd_bench(bench_manifest, bench_reps, bench_parallel, bench_params, bench_out,
                       bench_pssi);
    if (*report) return cmd_report(rep_bench, rep_ref, rep_out);
    if (*gen)
      return cmd_gen(gen_customers, gen_stations, gen_seed, gen_noise, gen_box, gen_name,
                     gen_out);
  } catch (const CliError &e) {
    std::cerr << "error: " << e.message << "\n";
    return e.exit_code;
  }
  return 0;
}
