#include "evrp/cdns.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>

namespace evrp {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Subsequence attributes supporting O(1) concatenation. Time-window state is
// the exact two-parameter family: starting service at the first node at time
// h in [earliest, latest], the sequence completes at max(h + span, finish).
struct SeqAttr {
  double dist = 0.0;
  double span = 0.0;      // travel plus service, no waiting realized
  double finish = 0.0;    // completion when starting as early as possible
  double earliest = 0.0;  // feasible service-start window at the first node
  double latest = 0.0;
  double sum_u = 0.0, sum_v = 0.0, max_load = 0.0;
  int ncust = 0;
  int16_t first = -1, last = -1;
  bool ok = true;
};

SeqAttr attr_node(const Instance &inst, int id) {
  const Node &nd = inst.node(id);
  SeqAttr a;
  a.span = nd.service;
  a.finish = nd.tw_open + nd.service;
  a.earliest = nd.tw_open;
  a.latest = nd.tw_close;
  a.sum_u = nd.delivery;
  a.sum_v = nd.pickup;
  a.max_load = std::max(nd.delivery, nd.pickup);
  a.ncust = inst.is_customer(id) ? 1 : 0;
  a.first = a.last = static_cast<int16_t>(id);
  return a;
}

SeqAttr attr_cat(const Instance &inst, const SeqAttr &a, const SeqAttr &b) {
  SeqAttr r;
  const double t = inst.time(a.last, b.first);
  r.ok = a.ok && b.ok && a.finish + t <= b.latest + kEps;
  r.earliest = a.earliest;
  r.latest = std::min(a.latest, std::max(b.latest - t - a.span, a.finish - a.span));
  if (r.earliest > r.latest + kEps) r.ok = false;
  r.span = a.span + t + b.span;
  r.finish = std::max(std::max(a.finish + t + b.span, b.earliest + b.span), b.finish);
  r.dist = a.dist + inst.dist(a.last, b.first) + b.dist;
  r.sum_u = a.sum_u + b.sum_u;
  r.sum_v = a.sum_v + b.sum_v;
  r.max_load = std::max(a.max_load + b.sum_u, b.max_load + a.sum_v);
  r.ncust = a.ncust + b.ncust;
  r.first = a.first;
  r.last = b.last;
  return r;
}

struct RouteCtx {
  std::vector<int> v;
  int L = 0;
  std::vector<SeqAttr> mat;  // [i*L+j] = attr of v[i..j], i <= j
  double cost = 0.0;

  const SeqAttr &at(int i, int j) const { return mat[static_cast<size_t>(i) * L + j]; }

  void build(const Instance &inst) {
    L = static_cast<int>(v.size());
    mat.assign(static_cast<size_t>(L) * L, SeqAttr{});
    for (int i = 0; i < L; i++) {
      mat[static_cast<size_t>(i) * L + i] = attr_node(inst, v[i]);
      for (int j = i + 1; j < L; j++)
        mat[static_cast<size_t>(i) * L + j] =
            attr_cat(inst, mat[static_cast<size_t>(i) * L + j - 1], attr_node(inst, v[j]));
    }
    const SeqAttr &whole = at(0, L - 1);
    cost = whole.ncust == 0 ? 0.0 : inst.dispatch_cost() + inst.distance_cost() * whole.dist;
  }
};

bool attr_route_ok(const Instance &inst, const SeqAttr &a) {
  return a.ok && a.max_load <= inst.load_capacity() + kEps;
}

double attr_route_cost(const Instance &inst, const SeqAttr &a) {
  return a.ncust == 0 ? 0.0 : inst.dispatch_cost() + inst.distance_cost() * a.dist;
}

// Deterministic total order; ties fall back to index tuples.
bool move_less(const Move &a, const Move &b) {
  if (a.delta < b.delta - 1e-12) return true;
  if (a.delta > b.delta + 1e-12) return false;
  const auto ta = std::tuple(static_cast<int>(a.kind), a.r1, a.r2, a.i, a.j, a.len1, a.len2);
  const auto tb = std::tuple(static_cast<int>(b.kind), b.r1, b.r2, b.i, b.j, b.len1, b.len2);
  return ta < tb;
}

// Materializes the sequences a move produces. out2 applies only to two-route
// moves.
void build_sequences(const std::vector<std::vector<int>> &routes, const Move &m,
                     std::vector<int> &out1, std::vector<int> &out2, bool &two_routes) {
  const auto &v1 = routes[static_cast<size_t>(m.r1)];
  out1.clear();
  out2.clear();
  two_routes = m.r1 != m.r2;
  switch (m.kind) {
    case MoveKind::two_opt: {
      out1 = v1;
      std::swap(out1[static_cast<size_t>(m.i)], out1[static_cast<size_t>(m.i + 1)]);
      two_routes = false;
      break;
    }
    case MoveKind::two_opt_star: {
      const auto &v2 = routes[static_cast<size_t>(m.r2)];
      out1.assign(v1.begin(), v1.begin() + m.i);
      out1.insert(out1.end(), v2.begin() + m.j, v2.end());
      out2.assign(v2.begin(), v2.begin() + m.j);
      out2.insert(out2.end(), v1.begin() + m.i, v1.end());
      two_routes = true;
      break;
    }
    case MoveKind::or_opt:
    case MoveKind::relocate: {
      const int s = m.i, e = m.i + m.len1 - 1;
      if (m.r1 == m.r2) {
        std::vector<int> rest(v1.begin(), v1.begin() + s);
        rest.insert(rest.end(), v1.begin() + e + 1, v1.end());
        int jj = m.j < s ? m.j : m.j - m.len1;
        out1.assign(rest.begin(), rest.begin() + jj);
        out1.insert(out1.end(), v1.begin() + s, v1.begin() + e + 1);
        out1.insert(out1.end(), rest.begin() + jj, rest.end());
        two_routes = false;
      } else {
        const auto &v2 = routes[static_cast<size_t>(m.r2)];
        out1.assign(v1.begin(), v1.begin() + s);
        out1.insert(out1.end(), v1.begin() + e + 1, v1.end());
        out2.assign(v2.begin(), v2.begin() + m.j);
        out2.insert(out2.end(), v1.begin() + s, v1.begin() + e + 1);
        out2.insert(out2.end(), v2.begin() + m.j, v2.end());
      }
      break;
    }
    case MoveKind::swap: {
      const int s1 = m.i, e1 = m.i + m.len1 - 1;
      const int s2 = m.j, e2 = m.j + m.len2 - 1;
      if (m.r1 == m.r2) {
        out1.assign(v1.begin(), v1.begin() + s1);
        out1.insert(out1.end(), v1.begin() + s2, v1.begin() + e2 + 1);
        out1.insert(out1.end(), v1.begin() + e1 + 1, v1.begin() + s2);
        out1.insert(out1.end(), v1.begin() + s1, v1.begin() + e1 + 1);
        out1.insert(out1.end(), v1.begin() + e2 + 1, v1.end());
        two_routes = false;
      } else {
        const auto &v2 = routes[static_cast<size_t>(m.r2)];
        out1.assign(v1.begin(), v1.begin() + s1);
        out1.insert(out1.end(), v2.begin() + s2, v2.begin() + e2 + 1);
        out1.insert(out1.end(), v1.begin() + e1 + 1, v1.end());
        out2.assign(v2.begin(), v2.begin() + s2);
        out2.insert(out2.end(), v1.begin() + s1, v1.begin() + e1 + 1);
        out2.insert(out2.end(), v2.begin() + e2 + 1, v2.end());
      }
      break;
    }
  }
}

// Enumerates candidate moves and hands feasible ones (delta filled) to the
// sink. Evaluation is domain-specific.
class Scanner {
 public:
  Scanner(const Instance &inst) : inst_(inst) {}
  virtual ~Scanner() = default;

  virtual bool eval(Move &m) = 0;  // fills m.delta, false if infeasible
  virtual const std::vector<int> &seq(int r) const = 0;
  int nroutes() const { return nroutes_; }

  using Sink = std::function<void(const Move &)>;

  bool customers_only(const std::vector<int> &v, int s, int e) const {
    for (int p = s; p <= e; p++)
      if (!inst_.is_customer(v[static_cast<size_t>(p)])) return false;
    return true;
  }

  void scan_pair(MoveKind op, int r1, int r2, const Sink &sink) {
    const auto &v1 = seq(r1);
    const int L1 = static_cast<int>(v1.size());
    Move m;
    m.kind = op;
    m.r1 = r1;
    m.r2 = r2;
    switch (op) {
      case MoveKind::two_opt: {
        for (int i = 1; i <= L1 - 3; i++) {
          if (!customers_only(v1, i, i + 1)) continue;
          m.i = i;
          m.j = i + 1;
          m.len1 = 2;
          m.len2 = 0;
          if (eval(m)) sink(m);
        }
        break;
      }
      case MoveKind::two_opt_star: {
        const auto &v2 = seq(r2);
        const int L2 = static_cast<int>(v2.size());
        for (int i = 1; i <= L1 - 1; i++) {
          for (int j = 1; j <= L2 - 1; j++) {
            if (i == 1 && j == 1) continue;
            if (i == L1 - 1 && j == L2 - 1) continue;
            m.i = i;
            m.j = j;
            m.len1 = m.len2 = 0;
            if (eval(m)) sink(m);
          }
        }
        break;
      }
      case MoveKind::or_opt:
      case MoveKind::relocate: {
        const auto &v2 = seq(r2);
        const int L2 = static_cast<int>(v2.size());
        const int max_len = op == MoveKind::relocate ? 1 : 2;
        for (int s = 1; s <= L1 - 2; s++) {
          for (int len = 1; len <= max_len; len++) {
            const int e = s + len - 1;
            if (e > L1 - 2) continue;
            if (!customers_only(v1, s, e)) continue;
            if (r1 == r2) {
              for (int j = 1; j <= L1 - 1; j++) {
                if (j >= s && j <= e + 1) continue;  // identity or overlap
                m.i = s;
                m.j = j;
                m.len1 = len;
                m.len2 = 0;
                if (eval(m)) sink(m);
              }
            } else {
              for (int j = 1; j <= L2 - 1; j++) {
                m.i = s;
                m.j = j;
                m.len1 = len;
                m.len2 = 0;
                if (eval(m)) sink(m);
              }
            }
          }
        }
        break;
      }
      case MoveKind::swap: {
        const auto &v2 = seq(r2);
        const int L2 = static_cast<int>(v2.size());
        for (int s1 = 1; s1 <= L1 - 2; s1++) {
          for (int len1 = 1; len1 <= 2; len1++) {
            const int e1 = s1 + len1 - 1;
            if (e1 > L1 - 2) continue;
            if (!customers_only(v1, s1, e1)) continue;
            const int s2_lo = r1 == r2 ? e1 + 1 : 1;
            for (int s2 = s2_lo; s2 <= L2 - 2; s2++) {
              for (int len2 = 1; len2 <= 2; len2++) {
                const int e2 = s2 + len2 - 1;
                if (e2 > L2 - 2) continue;
                if (!customers_only(v2, s2, e2)) continue;
                m.i = s1;
                m.j = s2;
                m.len1 = len1;
                m.len2 = len2;
                if (eval(m)) sink(m);
              }
            }
          }
        }
        break;
      }
    }
  }

  void scan_all(const Sink &sink) {
    const int R = nroutes();
    for (int r = 0; r < R; r++) scan_pair(MoveKind::two_opt, r, r, sink);
    for (int r1 = 0; r1 < R; r1++)
      for (int r2 = 0; r2 < R; r2++) {
        scan_pair(MoveKind::or_opt, r1, r2, sink);
        scan_pair(MoveKind::relocate, r1, r2, sink);
      }
    for (int r1 = 0; r1 < R; r1++)
      for (int r2 = r1; r2 < R; r2++) scan_pair(MoveKind::swap, r1, r2, sink);
    for (int r1 = 0; r1 < R; r1++)
      for (int r2 = r1 + 1; r2 < R; r2++) scan_pair(MoveKind::two_opt_star, r1, r2, sink);
  }

 protected:
  const Instance &inst_;
  int nroutes_ = 0;
};

// Constant-time evaluation over per-route attribute matrices.
class AttrScanner : public Scanner {
 public:
  AttrScanner(const Instance &inst, const std::vector<std::vector<int>> &routes) : Scanner(inst) {
    nroutes_ = static_cast<int>(routes.size());
    ctx_.resize(routes.size());
    for (size_t r = 0; r < routes.size(); r++) {
      ctx_[r].v = routes[r];
      ctx_[r].build(inst);
    }
  }

  const std::vector<int> &seq(int r) const override { return ctx_[static_cast<size_t>(r)].v; }
  const RouteCtx &ctx(int r) const { return ctx_[static_cast<size_t>(r)]; }

  void replace(int r, std::vector<int> v) {
    ctx_[static_cast<size_t>(r)].v = std::move(v);
    ctx_[static_cast<size_t>(r)].build(inst_);
  }

  bool eval(Move &m) override {
    const RouteCtx &c1 = ctx_[static_cast<size_t>(m.r1)];
    const int L1 = c1.L;
    switch (m.kind) {
      case MoveKind::two_opt: {
        const SeqAttr mid =
            attr_cat(inst_, attr_node(inst_, c1.v[static_cast<size_t>(m.i + 1)]),
                     attr_node(inst_, c1.v[static_cast<size_t>(m.i)]));
        SeqAttr a = attr_cat(inst_, c1.at(0, m.i - 1), mid);
        a = attr_cat(inst_, a, c1.at(m.i + 2, L1 - 1));
        if (!attr_route_ok(inst_, a)) return false;
        m.delta = attr_route_cost(inst_, a) - c1.cost;
        return true;
      }
      case MoveKind::two_opt_star: {
        const RouteCtx &c2 = ctx_[static_cast<size_t>(m.r2)];
        const SeqAttr a = attr_cat(inst_, c1.at(0, m.i - 1), c2.at(m.j, c2.L - 1));
        if (!attr_route_ok(inst_, a)) return false;
        const SeqAttr b = attr_cat(inst_, c2.at(0, m.j - 1), c1.at(m.i, L1 - 1));
        if (!attr_route_ok(inst_, b)) return false;
        m.delta = attr_route_cost(inst_, a) + attr_route_cost(inst_, b) - c1.cost - c2.cost;
        return true;
      }
      case MoveKind::or_opt:
      case MoveKind::relocate: {
        const int s = m.i, e = m.i + m.len1 - 1;
        if (m.r1 == m.r2) {
          SeqAttr a;
          if (m.j < s) {
            a = attr_cat(inst_, c1.at(0, m.j - 1), c1.at(s, e));
            a = attr_cat(inst_, a, c1.at(m.j, s - 1));
            if (e + 1 <= L1 - 1) a = attr_cat(inst_, a, c1.at(e + 1, L1 - 1));
          } else {  // m.j > e + 1
            a = attr_cat(inst_, c1.at(0, s - 1), c1.at(e + 1, m.j - 1));
            a = attr_cat(inst_, a, c1.at(s, e));
            if (m.j <= L1 - 1) a = attr_cat(inst_, a, c1.at(m.j, L1 - 1));
          }
          if (!attr_route_ok(inst_, a)) return false;
          m.delta = attr_route_cost(inst_, a) - c1.cost;
          return true;
        }
        const RouteCtx &c2 = ctx_[static_cast<size_t>(m.r2)];
        const SeqAttr a = attr_cat(inst_, c1.at(0, s - 1), c1.at(e + 1, L1 - 1));
        if (!attr_route_ok(inst_, a)) return false;
        SeqAttr b = attr_cat(inst_, c2.at(0, m.j - 1), c1.at(s, e));
        b = attr_cat(inst_, b, c2.at(m.j, c2.L - 1));
        if (!attr_route_ok(inst_, b)) return false;
        m.delta = attr_route_cost(inst_, a) + attr_route_cost(inst_, b) - c1.cost - c2.cost;
        return true;
      }
      case MoveKind::swap: {
        const int s1 = m.i, e1 = m.i + m.len1 - 1;
        const int s2 = m.j, e2 = m.j + m.len2 - 1;
        if (m.r1 == m.r2) {
          SeqAttr a = attr_cat(inst_, c1.at(0, s1 - 1), c1.at(s2, e2));
          if (e1 + 1 <= s2 - 1) a = attr_cat(inst_, a, c1.at(e1 + 1, s2 - 1));
          a = attr_cat(inst_, a, c1.at(s1, e1));
          a = attr_cat(inst_, a, c1.at(e2 + 1, L1 - 1));
          if (!attr_route_ok(inst_, a)) return false;
          m.delta = attr_route_cost(inst_, a) - c1.cost;
          return true;
        }
        const RouteCtx &c2 = ctx_[static_cast<size_t>(m.r2)];
        SeqAttr a = attr_cat(inst_, c1.at(0, s1 - 1), c2.at(s2, e2));
        a = attr_cat(inst_, a, c1.at(e1 + 1, L1 - 1));
        if (!attr_route_ok(inst_, a)) return false;
        SeqAttr b = attr_cat(inst_, c2.at(0, s2 - 1), c1.at(s1, e1));
        b = attr_cat(inst_, b, c2.at(e2 + 1, c2.L - 1));
        if (!attr_route_ok(inst_, b)) return false;
        m.delta = attr_route_cost(inst_, a) + attr_route_cost(inst_, b) - c1.cost - c2.cost;
        return true;
      }
    }
    return false;
  }

 private:
  std::vector<RouteCtx> ctx_;
};

// Full rescheduling per candidate; feasibility includes the battery
// constraint.
class ElectricScanner : public Scanner {
 public:
  ElectricScanner(const Instance &inst, const std::vector<std::vector<int>> &routes)
      : Scanner(inst), seqs_(routes) {
    nroutes_ = static_cast<int>(routes.size());
    cost_.resize(routes.size());
    for (size_t r = 0; r < routes.size(); r++) cost_[r] = seq_cost(routes[r]);
  }

  const std::vector<int> &seq(int r) const override { return seqs_[static_cast<size_t>(r)]; }

  void replace(int r, std::vector<int> v) {
    seqs_[static_cast<size_t>(r)] = std::move(v);
    cost_[static_cast<size_t>(r)] = seq_cost(seqs_[static_cast<size_t>(r)]);
  }

  bool eval(Move &m) override {
    bool two = false;
    build_sequences(seqs_, m, tmp1_, tmp2_, two);
    scratch_.visits = tmp1_;
    if (schedule_route(inst_, scratch_) != ScheduleStatus::ok) return false;
    double nc = route_cost(inst_, scratch_);
    if (two) {
      scratch_.visits = tmp2_;
      if (schedule_route(inst_, scratch_) != ScheduleStatus::ok) return false;
      nc += route_cost(inst_, scratch_);
    }
    m.delta = nc - cost_[static_cast<size_t>(m.r1)] -
              (two ? cost_[static_cast<size_t>(m.r2)] : 0.0);
    return true;
  }

 private:
  double seq_cost(const std::vector<int> &v) {
    if (v.size() <= 2) return 0.0;
    scratch_.visits = v;
    schedule_route(inst_, scratch_);
    return route_cost(inst_, scratch_);
  }

  std::vector<std::vector<int>> seqs_;
  std::vector<double> cost_;
  std::vector<int> tmp1_, tmp2_;
  Route scratch_;
};

// Steepest-descent driver with per-(op, pair) best-move memoization, shared
// by ALS and CLS. on_apply returns false to terminate the search (used by
// ALS when PSSI fails).
class Descent {
 public:
  Descent(Scanner &sc) : sc_(sc) {
    const int R = sc.nroutes();
    memo_.assign(5, std::vector<Move>(static_cast<size_t>(R) * R));
    for (auto &t : memo_)
      for (auto &mv : t) mv.delta = kInf;
    for (int op = 0; op < 5; op++) {
      for (int r1 = 0; r1 < R; r1++)
        for (int r2 = 0; r2 < R; r2++)
          if (pair_active(static_cast<MoveKind>(op), r1, r2)) rescan(static_cast<MoveKind>(op), r1, r2);
    }
  }

  static bool pair_active(MoveKind op, int r1, int r2) {
    switch (op) {
      case MoveKind::two_opt: return r1 == r2;
      case MoveKind::two_opt_star: return r1 < r2;
      case MoveKind::or_opt:
      case MoveKind::relocate: return true;
      case MoveKind::swap: return r1 <= r2;
    }
    return false;
  }

  void rescan(MoveKind op, int r1, int r2) {
    Move best;
    best.delta = kInf;
    sc_.scan_pair(op, r1, r2, [&](const Move &m) {
      if (move_less(m, best)) best = m;
    });
    memo_[static_cast<size_t>(op)][static_cast<size_t>(r1) * sc_.nroutes() + r2] = best;
  }

  bool best_move(Move &out) const {
    out.delta = kInf;
    bool found = false;
    for (const auto &t : memo_)
      for (const auto &m : t)
        if (m.delta < kInf && (!found || move_less(m, out))) {
          out = m;
          found = true;
        }
    return found && out.delta < -kEps;
  }

  void invalidate(const std::vector<int> &touched) {
    const int R = sc_.nroutes();
    for (int op = 0; op < 5; op++) {
      for (int t : touched) {
        for (int r = 0; r < R; r++) {
          if (pair_active(static_cast<MoveKind>(op), t, r)) rescan(static_cast<MoveKind>(op), t, r);
          if (r != t && pair_active(static_cast<MoveKind>(op), r, t))
            rescan(static_cast<MoveKind>(op), r, t);
        }
      }
    }
  }

 private:
  Scanner &sc_;
  std::vector<std::vector<Move>> memo_;
};

}  // namespace

std::vector<Move> enumerate_moves(const Instance &inst, const Solution &sol, Domain domain) {
  std::vector<std::vector<int>> routes;
  routes.reserve(sol.routes.size());
  for (const Route &r : sol.routes) routes.push_back(r.visits);
  std::vector<Move> out;
  auto sink = [&](const Move &m) { out.push_back(m); };
  if (domain == Domain::non_electric) {
    std::vector<std::vector<int>> stripped;
    stripped.reserve(routes.size());
    for (const auto &v : routes) {
      std::vector<int> s;
      for (int id : v)
        if (!inst.is_station(id)) s.push_back(id);
      stripped.push_back(std::move(s));
    }
    AttrScanner sc(inst, stripped);
    sc.scan_all(sink);
  } else {
    ElectricScanner sc(inst, routes);
    sc.scan_all(sink);
  }
  return out;
}

Solution als(const Instance &inst, const StationRanking &ranking, const Solution &input,
             const PssiParams &params, Rng &rng, PssiStats *stats, const Deadline &deadline) {
  Solution incumbent = input;
  for (Route &r : incumbent.routes)
    if (!r.eval.valid) schedule_route(inst, r);
  refresh_cost(inst, incumbent);

  // Station-free shadow plus the per-route electric reconstruction.
  std::vector<std::vector<int>> stripped;
  std::vector<Route> electric;
  for (const Route &r : incumbent.routes) {
    Route s = strip_stations(inst, r);
    stripped.push_back(s.visits);
    electric.push_back(r);
  }
  if (stripped.empty()) return incumbent;

  AttrScanner sc(inst, stripped);
  Descent descent(sc);

  while (!deadline.expired()) {
    Move m;
    if (!descent.best_move(m)) break;  // station-free local optimum

    bool two = false;
    std::vector<int> s1, s2;
    build_sequences(stripped, m, s1, s2, two);
    stripped[static_cast<size_t>(m.r1)] = s1;
    sc.replace(m.r1, std::move(s1));
    std::vector<int> touched{m.r1};
    if (two) {
      stripped[static_cast<size_t>(m.r2)] = s2;
      sc.replace(m.r2, std::move(s2));
      touched.push_back(m.r2);
    }

    bool pssi_failed = false;
    for (int t : touched) {
      const auto &v = stripped[static_cast<size_t>(t)];
      if (v.size() <= 2) {
        electric[static_cast<size_t>(t)] = Route(std::vector<int>{inst.depot(), inst.depot()});
        continue;
      }
      Route bare(v);
      auto fixed = pssi(inst, ranking, bare, params, rng, stats);
      if (!fixed) {
        pssi_failed = true;
        break;
      }
      electric[static_cast<size_t>(t)] = std::move(*fixed);
    }
    if (pssi_failed) break;  // no electric counterpart: terminate

    double tc = 0.0;
    for (const Route &r : electric) tc += route_cost(inst, r);
    if (tc < incumbent.tc - kEps) {
      incumbent.routes = electric;
      refresh_cost(inst, incumbent);  // drops emptied routes
    }

    descent.invalidate(touched);
  }
  return incumbent;
}

Solution cls(const Instance &inst, const Solution &input, const Deadline &deadline) {
  Solution sol = input;
  for (Route &r : sol.routes)
    if (!r.eval.valid) schedule_route(inst, r);
  refresh_cost(inst, sol);
  if (sol.routes.empty()) return sol;

  std::vector<std::vector<int>> seqs;
  for (const Route &r : sol.routes) seqs.push_back(r.visits);
  ElectricScanner sc(inst, seqs);
  Descent descent(sc);

  while (!deadline.expired()) {
    Move m;
    if (!descent.best_move(m)) break;

    bool two = false;
    std::vector<int> s1, s2;
    build_sequences(seqs, m, s1, s2, two);
    seqs[static_cast<size_t>(m.r1)] = s1;
    sc.replace(m.r1, std::move(s1));
    std::vector<int> touched{m.r1};
    if (two) {
      seqs[static_cast<size_t>(m.r2)] = s2;
      sc.replace(m.r2, std::move(s2));
      touched.push_back(m.r2);
    }
    for (int t : touched) {
      Route nr;
      nr.visits = seqs[static_cast<size_t>(t)];
      schedule_route(inst, nr);
      sol.routes[static_cast<size_t>(t)] = std::move(nr);
    }
    descent.invalidate(touched);
  }
  refresh_cost(inst, sol);
  return sol;
}

Solution cdns(const Instance &inst, const StationRanking &ranking, const Solution &input,
              SearchMode mode, const PssiParams &params, Rng &rng, PssiStats *stats,
              const Deadline &deadline) {
  Solution s = als(inst, ranking, input, params, rng, stats, deadline);
  if (mode == SearchMode::full) s = cls(inst, s, deadline);
  return s;
}

}  // namespace evrp
