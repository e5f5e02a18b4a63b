#include "evrp/pssi.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>

namespace evrp {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

int first_negative_battery(const RouteEval &ev) {
  for (const auto &v : ev.violated)
    if (v.tag == Constraint::battery) return v.position;
  return -1;
}

// Progress measure for the sequential insertion loop: how many customers are
// cleared before the first negative-battery position, and how deep that
// first deficit is. Insertions must advance the former or strictly shrink
// the latter, which also bounds the loop.
struct SsiProgress {
  int cleared = std::numeric_limits<int>::max();
  double deficit = 0.0;
};

SsiProgress ssi_progress(const Instance &inst, const Route &r, const RouteEval &ev) {
  const int pos = first_negative_battery(ev);
  SsiProgress p;
  if (pos < 0) return p;
  p.cleared = 0;
  for (int i = 1; i < pos; i++)
    if (inst.is_customer(r.visits[static_cast<size_t>(i)])) p.cleared++;
  p.deficit = -ev.batt_arrive[static_cast<size_t>(pos)];
  return p;
}

bool ssi_advances(const SsiProgress &cur, const SsiProgress &cand) {
  if (cand.cleared != cur.cleared) return cand.cleared > cur.cleared;
  return cand.deficit < cur.deficit - 1e-9;
}

bool has_hard_violation(const RouteEval &ev) {
  for (const auto &v : ev.violated)
    if (v.tag != Constraint::battery) return true;
  return false;
}

}  // namespace

RouteResult decode(const Instance &inst, const StationRanking &ranking,
                   const std::vector<uint8_t> &bits, const Route &stripped) {
  const auto &base = stripped.visits;
  const size_t gaps = base.size() - 1;
  if (bits.size() != gaps) throw StructureError("chromosome length must equal the gap count");

  std::vector<int> built;
  built.reserve(base.size() + gaps);
  built.push_back(base[0]);

  Route cand;
  for (size_t gi = 0; gi < gaps; gi++) {
    if (bits[gi]) {
      const int a = built.back();
      const int b = base[gi + 1];
      const int32_t *list = ranking.at(a, b);
      // a residual battery violation is acceptable only if the next planned
      // insertion still lies before it
      size_t next_active = gaps;
      for (size_t gj = gi + 1; gj < gaps; gj++)
        if (bits[gj]) {
          next_active = gj;
          break;
        }
      bool placed = false;
      for (int r = 0; r < ranking.truncation(); r++) {
        const int k = list[r];
        if (k < 0 || k == a) continue;
        cand.visits.clear();
        cand.visits.insert(cand.visits.end(), built.begin(), built.end());
        const size_t k_pos = cand.visits.size();
        cand.visits.push_back(k);
        cand.visits.insert(cand.visits.end(), base.begin() + static_cast<long>(gi) + 1,
                           base.end());
        schedule_route(inst, cand);
        if (has_hard_violation(cand.eval)) continue;
        const int neg = first_negative_battery(cand.eval);
        if (neg >= 0) {
          if (next_active >= gaps) continue;  // nothing downstream can fix it
          const size_t next_insert_pos = k_pos + 1 + (next_active - gi);
          if (static_cast<size_t>(neg) < next_insert_pos) continue;
        }
        built.push_back(k);
        placed = true;
        break;
      }
      if (!placed) return std::nullopt;
    }
    built.push_back(base[gi + 1]);
  }

  Route out;
  out.visits = std::move(built);
  if (schedule_route(inst, out) != ScheduleStatus::ok) return std::nullopt;
  return out;
}

RouteResult psi(const Instance &inst, const StationRanking &ranking, const Route &route,
                const PssiParams &params, Rng &rng) {
  Route stripped = strip_stations(inst, route);
  const size_t gaps = stripped.visits.size() - 1;
  if (stripped.visits.size() <= 2) {
    Route out = stripped;
    if (schedule_route(inst, out) != ScheduleStatus::ok) return std::nullopt;
    return out;
  }

  const int pop_size = std::max(1, static_cast<int>(std::llround(params.alpha * gaps)));
  const int regen_cap = params.regen_cap > 0 ? params.regen_cap : 50 * pop_size;

  std::vector<GapChromosome> pop(static_cast<size_t>(pop_size));
  for (int i = 0; i < pop_size; i++) {
    GapChromosome &ch = pop[static_cast<size_t>(i)];
    for (int attempt = 0; attempt <= regen_cap; attempt++) {
      ch.bits.assign(gaps, 0);
      if (i > 0 || attempt > 0) {
        for (auto &b : ch.bits) b = rng.chance(0.5) ? 1 : 0;
      }
      // the first slot first tries the empty pattern, which keeps routes that
      // need no stations unchanged
      if (auto r = decode(inst, ranking, ch.bits, stripped)) {
        ch.realized = std::move(*r);
        ch.ok = true;
        break;
      }
    }
    if (!ch.ok) return std::nullopt;
  }

  std::vector<uint8_t> child(gaps);
  for (int gen = 0; gen < params.b_generations; gen++) {
    for (int i = 0; i < pop_size; i++) {
      const GapChromosome &p1 = pop[static_cast<size_t>(rng.below(pop_size))];
      const GapChromosome &p2 = pop[static_cast<size_t>(rng.below(pop_size))];
      for (size_t b = 0; b < gaps; b++) child[b] = p1.bits[b] ^ p2.bits[b];
      for (size_t b = 0; b < gaps; b++)
        if (rng.chance(params.flip_prob)) child[b] ^= 1;
      for (size_t b = 0; b < gaps; b++)
        if (child[b] && rng.chance(params.one_to_zero_prob)) child[b] = 0;
      if (auto r = decode(inst, ranking, child, stripped)) {
        GapChromosome &slot = pop[static_cast<size_t>(i)];
        if (r->eval.td < slot.realized.eval.td - kEps) {
          slot.bits = child;
          slot.realized = std::move(*r);
        }
      }
    }
  }

  int best = 0;
  for (int i = 1; i < pop_size; i++)
    if (pop[static_cast<size_t>(i)].realized.eval.td < pop[static_cast<size_t>(best)].realized.eval.td - kEps)
      best = i;
  return pop[static_cast<size_t>(best)].realized;
}

namespace {

// One best-possible station insertion pass; shared by SSI and ssi_fix.
RouteResult ssi_loop(const Instance &inst, const StationRanking &ranking, Route r) {
  if (schedule_route(inst, r) == ScheduleStatus::ok) return r;

  const int insertion_cap =
      static_cast<int>(r.visits.size()) + 4 * inst.num_stations() + 8;
  for (int inserted = 0; inserted < insertion_cap; inserted++) {
    if (has_hard_violation(r.eval)) return std::nullopt;
    const int n_right = first_negative_battery(r.eval);
    if (n_right < 0) return std::nullopt;  // infeasible without a battery cause
    int n_left = n_right - 1;
    while (n_left > 0 && !inst.is_station(r.visits[static_cast<size_t>(n_left)])) n_left--;

    const SsiProgress cur = ssi_progress(inst, r, r.eval);
    double best_detour = kInf;
    int best_station = -1, best_pos = -1;
    bool best_full = false;
    Route best_route;

    Route cand;
    for (int pos = n_left + 1; pos <= n_right; pos++) {
      const int a = r.visits[static_cast<size_t>(pos - 1)];
      const int b = r.visits[static_cast<size_t>(pos)];
      const int32_t *list = ranking.at(a, b);
      for (int ri = 0; ri < ranking.truncation(); ri++) {
        const int k = list[ri];
        if (k < 0 || k == a || k == b) continue;
        const double detour = inst.dist(a, k) + inst.dist(k, b) - inst.dist(a, b);
        cand.visits = r.visits;
        cand.visits.insert(cand.visits.begin() + pos, k);
        const ScheduleStatus st = schedule_route(inst, cand);
        bool full = st == ScheduleStatus::ok;
        if (!full) {
          if (has_hard_violation(cand.eval)) continue;
          if (!ssi_advances(cur, ssi_progress(inst, cand, cand.eval))) continue;
        }
        const bool better =
            (full && !best_full) ||
            (full == best_full &&
             (detour < best_detour - kEps ||
              (detour < best_detour + kEps &&
               (k < best_station || (k == best_station && pos < best_pos)))));
        if (better) {
          best_detour = detour;
          best_station = k;
          best_pos = pos;
          best_full = full;
          best_route = cand;
        }
      }
    }
    if (best_station < 0) return std::nullopt;
    r = std::move(best_route);
    if (r.eval.feasible) return r;
  }
  return std::nullopt;
}

// Replaces stations adjacent to other stations with better-ranked ones.
void refine_consecutive(const Instance &inst, const StationRanking &ranking, Route &r) {
  bool changed = true;
  Route cand;
  while (changed) {
    changed = false;
    for (size_t p = 1; p + 1 < r.visits.size(); p++) {
      const int cur = r.visits[p];
      if (!inst.is_station(cur)) continue;
      const bool in_run = inst.is_station(r.visits[p - 1]) || inst.is_station(r.visits[p + 1]);
      if (!in_run) continue;
      const int a = r.visits[p - 1];
      const int b = r.visits[p + 1];
      const int32_t *list = ranking.at(a, b);
      for (int ri = 0; ri < ranking.truncation(); ri++) {
        const int k = list[ri];
        if (k == cur) break;  // only better-ranked replacements
        if (k < 0 || k == a || k == b) continue;
        cand.visits = r.visits;
        cand.visits[p] = k;
        if (schedule_route(inst, cand) != ScheduleStatus::ok) continue;
        if (cand.eval.td < r.eval.td - kEps) {
          r = cand;
          changed = true;
          break;
        }
      }
      if (changed) break;  // restart the scan
    }
  }
}

}  // namespace

RouteResult ssi(const Instance &inst, const StationRanking &ranking, const Route &route) {
  auto r = ssi_loop(inst, ranking, route);
  if (!r) return std::nullopt;
  if (r->visits.size() >= 4) refine_consecutive(inst, ranking, *r);
  return r;
}

RouteResult ssi_fix(const Instance &inst, const StationRanking &ranking, const Route &route) {
  return ssi_loop(inst, ranking, route);
}

RouteResult pssi(const Instance &inst, const StationRanking &ranking, const Route &route,
                 const PssiParams &params, Rng &rng, PssiStats *stats) {
  if (stats) stats->calls++;

  // A feasible input cannot be improved by adding stations when the triangle
  // inequality holds, and SSI wins ties, so return it directly.
  if (inst.triangle_ok()) {
    Route direct = route;
    if (schedule_route(inst, direct) == ScheduleStatus::ok) {
      bool any_station = false;
      for (int id : direct.visits)
        if (inst.is_station(id)) any_station = true;
      if (!any_station) {
        if (stats) stats->shared++;
        return direct;
      }
    }
  }

  using clock = std::chrono::steady_clock;
  const auto t0 = clock::now();
  RouteResult r_psi = psi(inst, ranking, route, params, rng);
  const auto t1 = clock::now();
  RouteResult r_ssi = ssi(inst, ranking, route);
  const auto t2 = clock::now();
  if (stats) {
    stats->psi_time_s += std::chrono::duration<double>(t1 - t0).count();
    stats->ssi_time_s += std::chrono::duration<double>(t2 - t1).count();
  }

  if (!r_psi && !r_ssi) return std::nullopt;
  if (r_psi && !r_ssi) {
    if (stats) stats->psi_exclusive++;
    return r_psi;
  }
  if (!r_psi && r_ssi) {
    if (stats) stats->ssi_exclusive++;
    return r_ssi;
  }
  if (r_psi->eval.td < r_ssi->eval.td - kEps) {
    if (stats) stats->psi_exclusive++;
    return r_psi;
  }
  if (stats) {
    if (r_ssi->eval.td < r_psi->eval.td - kEps)
      stats->ssi_exclusive++;
    else
      stats->shared++;
  }
  return r_ssi;
}

}  // namespace evrp
