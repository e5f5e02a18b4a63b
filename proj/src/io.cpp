#include "evrp/io.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "evrp/preprocess.hpp"
#include "evrp/rng.hpp"

namespace evrp {

namespace {

std::vector<std::string> split_ws(const std::string &line) {
  std::vector<std::string> out;
  std::istringstream is(line);
  std::string tok;
  while (is >> tok) out.push_back(tok);
  return out;
}

double parse_num(const std::string &tok, int line) {
  try {
    size_t used = 0;
    const double v = std::stod(tok, &used);
    if (used != tok.size()) throw std::invalid_argument(tok);
    return v;
  } catch (const std::exception &) {
    throw ParseError("expected a number, got '" + tok + "'", line);
  }
}

long parse_int(const std::string &tok, int line) {
  try {
    size_t used = 0;
    const long v = std::stol(tok, &used);
    if (used != tok.size()) throw std::invalid_argument(tok);
    return v;
  } catch (const std::exception &) {
    throw ParseError("expected an integer, got '" + tok + "'", line);
  }
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

Instance parse_akb(const std::string &text, const std::string &name) {
  std::istringstream is(text);
  std::string line;
  int lineno = 0;

  struct Raw {
    Node node;
    char type;
    int line;
  };
  std::vector<Raw> raws;
  bool header_seen = false;
  double q = -1, c = -1, h = -1, g = -1, vel = -1;

  while (std::getline(is, line)) {
    lineno++;
    const auto toks = split_ws(line);
    if (toks.empty()) continue;
    if (!header_seen && toks.size() >= 2 &&
        (toks[1] == "Type" || toks[1] == "type" || toks[0] == "StringID")) {
      header_seen = true;
      continue;
    }
    if (toks.size() >= 9 && toks[1].size() == 1 &&
        (toks[1] == "d" || toks[1] == "c" || toks[1] == "f")) {
      Raw r;
      r.type = toks[1][0];
      r.line = lineno;
      r.node.px = parse_num(toks[2], lineno);
      r.node.py = parse_num(toks[3], lineno);
      r.node.delivery = parse_num(toks[4], lineno);
      r.node.pickup = parse_num(toks[5], lineno);
      r.node.tw_open = parse_num(toks[6], lineno);
      r.node.tw_close = parse_num(toks[7], lineno);
      r.node.service = parse_num(toks[8], lineno);
      raws.push_back(r);
      continue;
    }
    // Scalar lines: tag, prose, value wrapped in slashes.
    const std::string &tag = toks[0];
    if (tag == "Q" || tag == "C" || tag == "r" || tag == "h" || tag == "g" || tag == "v") {
      const auto lo = line.find('/');
      const auto hi = line.rfind('/');
      std::string val;
      if (lo != std::string::npos && hi > lo)
        val = line.substr(lo + 1, hi - lo - 1);
      else
        val = toks.back();
      const double x = parse_num(val, lineno);
      if (tag == "Q") q = x;
      else if (tag == "C") c = x;
      else if (tag == "r" || tag == "h") h = x;
      else if (tag == "g") g = x;
      else vel = x;
      continue;
    }
    throw ParseError("unrecognized line '" + line + "'", lineno);
  }

  if (q <= 0) throw ParseError("missing or invalid battery capacity Q", lineno);
  if (c <= 0) throw ParseError("missing or invalid load capacity C", lineno);
  if (h <= 0) throw ParseError("missing or invalid consumption rate", lineno);
  if (g <= 0) throw ParseError("missing or invalid recharging rate g", lineno);
  if (vel < 0) vel = 1.0;  // Solomon convention: travel time equals distance

  std::vector<Node> nodes;
  int depots = 0;
  for (const Raw &r : raws)
    if (r.type == 'd') depots++;
  if (depots != 1) throw ParseError("expected exactly one depot row", lineno);

  auto push_kind = [&](char t, NodeKind k) {
    for (const Raw &r : raws) {
      if (r.type != t) continue;
      Node nd = r.node;
      nd.kind = k;
      nd.id = static_cast<int>(nodes.size());
      if (k != NodeKind::customer && (nd.delivery != 0 || nd.pickup != 0 || nd.service != 0))
        throw ParseError("depot/station rows must have zero demand and service", r.line);
      nodes.push_back(nd);
    }
  };
  push_kind('d', NodeKind::depot);
  push_kind('c', NodeKind::customer);
  const int m = static_cast<int>(nodes.size()) - 1;
  push_kind('f', NodeKind::station);
  const int p = static_cast<int>(nodes.size()) - 1 - m;

  // Station windows mirror the depot's.
  for (Node &nd : nodes)
    if (nd.kind == NodeKind::station) {
      nd.tw_open = nodes[0].tw_open;
      nd.tw_close = nodes[0].tw_close;
    }

  const size_t n = nodes.size();
  std::vector<double> dist(n * n), time(n * n);
  for (size_t i = 0; i < n; i++)
    for (size_t j = 0; j < n; j++) {
      const double dx = nodes[i].px - nodes[j].px;
      const double dy = nodes[i].py - nodes[j].py;
      const double d = std::sqrt(dx * dx + dy * dy);
      dist[i * n + j] = i == j ? 0.0 : d;
      time[i * n + j] = i == j ? 0.0 : d / vel;
    }

  return Instance(name, std::move(nodes), m, p, std::move(dist), std::move(time), c, q, g, h,
                  1000.0, 1.0, CoordMode::cartesian, true);
}

namespace {

struct JdReader {
  std::istringstream is;
  int lineno = 0;
  explicit JdReader(const std::string &text) : is(text) {}

  std::vector<std::string> next() {
    std::string line;
    while (std::getline(is, line)) {
      lineno++;
      if (!line.empty() && line[0] == '#') continue;
      auto toks = split_ws(line);
      if (!toks.empty()) return toks;
    }
    throw ParseError("unexpected end of file", lineno);
  }

  double scalar(const std::string &key) {
    auto toks = next();
    if (toks.size() != 2 || toks[0] != key)
      throw ParseError("expected '" + key + " <value>'", lineno);
    return parse_num(toks[1], lineno);
  }
};

}  // namespace

Instance parse_jd(const std::string &text) {
  JdReader r(text);
  auto magic = r.next();
  if (magic.size() != 2 || magic[0] != "EVRP-JD" || magic[1] != "1")
    throw ParseError("expected magic 'EVRP-JD 1'", r.lineno);

  auto name_toks = r.next();
  if (name_toks.size() != 2 || name_toks[0] != "name")
    throw ParseError("expected 'name <string>'", r.lineno);
  const std::string name = name_toks[1];

  const int m = static_cast<int>(r.scalar("customers"));
  const int p = static_cast<int>(r.scalar("stations"));
  if (m < 0 || p < 0) throw ParseError("negative node counts", r.lineno);
  const double c = r.scalar("load_capacity");
  const double q = r.scalar("battery_capacity");
  const double g = r.scalar("charge_rate");
  const double h = r.scalar("consume_rate");
  const double mu1 = r.scalar("dispatch_cost");
  const double mu2 = r.scalar("distance_cost");

  auto nodes_tag = r.next();
  if (nodes_tag.size() != 1 || nodes_tag[0] != "nodes")
    throw ParseError("expected 'nodes'", r.lineno);

  const int n = m + p + 1;
  std::vector<Node> nodes(static_cast<size_t>(n));
  for (int i = 0; i < n; i++) {
    auto toks = r.next();
    if (toks.size() != 9) throw ParseError("node row must have 9 fields", r.lineno);
    Node nd;
    nd.id = static_cast<int>(parse_int(toks[0], r.lineno));
    if (nd.id != i) throw ParseError("node ids must be contiguous from 0", r.lineno);
    if (toks[1] == "d") nd.kind = NodeKind::depot;
    else if (toks[1] == "c") nd.kind = NodeKind::customer;
    else if (toks[1] == "f") nd.kind = NodeKind::station;
    else throw ParseError("unknown node kind '" + toks[1] + "'", r.lineno);
    nd.px = parse_num(toks[2], r.lineno);
    nd.py = parse_num(toks[3], r.lineno);
    nd.delivery = parse_num(toks[4], r.lineno);
    nd.pickup = parse_num(toks[5], r.lineno);
    nd.tw_open = parse_num(toks[6], r.lineno);
    nd.tw_close = parse_num(toks[7], r.lineno);
    nd.service = parse_num(toks[8], r.lineno);
    nodes[static_cast<size_t>(i)] = nd;
  }

  auto read_matrix = [&](const char *tag) {
    auto t = r.next();
    if (t.size() != 1 || t[0] != tag)
      throw ParseError(std::string("expected '") + tag + "'", r.lineno);
    std::vector<double> mat(static_cast<size_t>(n) * n);
    for (int i = 0; i < n; i++) {
      auto row = r.next();
      if (static_cast<int>(row.size()) != n)
        throw ParseError("matrix row has wrong dimension", r.lineno);
      for (int j = 0; j < n; j++) {
        const double v = parse_num(row[static_cast<size_t>(j)], r.lineno);
        if (v < 0) throw ParseError("negative matrix entry", r.lineno);
        mat[static_cast<size_t>(i) * n + j] = v;
      }
    }
    return mat;
  };
  std::vector<double> dist = read_matrix("dist");
  std::vector<double> time = read_matrix("time");
  auto end_tag = r.next();
  if (end_tag.size() != 1 || end_tag[0] != "end") throw ParseError("expected 'end'", r.lineno);

  return Instance(name, std::move(nodes), m, p, std::move(dist), std::move(time), c, q, g, h, mu1,
                  mu2, CoordMode::geographic, false);
}

std::string write_jd(const Instance &inst) {
  std::ostringstream os;
  os << "EVRP-JD 1\n";
  os << "name " << inst.name() << "\n";
  os << "customers " << inst.num_customers() << "\n";
  os << "stations " << inst.num_stations() << "\n";
  os << "load_capacity " << fmt(inst.load_capacity()) << "\n";
  os << "battery_capacity " << fmt(inst.battery_capacity()) << "\n";
  os << "charge_rate " << fmt(inst.charge_rate()) << "\n";
  os << "consume_rate " << fmt(inst.consume_rate()) << "\n";
  os << "dispatch_cost " << fmt(inst.dispatch_cost()) << "\n";
  os << "distance_cost " << fmt(inst.distance_cost()) << "\n";
  os << "nodes\n";
  for (const Node &nd : inst.nodes()) {
    const char k = nd.kind == NodeKind::depot ? 'd' : nd.kind == NodeKind::customer ? 'c' : 'f';
    os << nd.id << " " << k << " " << fmt(nd.px) << " " << fmt(nd.py) << " " << fmt(nd.delivery)
       << " " << fmt(nd.pickup) << " " << fmt(nd.tw_open) << " " << fmt(nd.tw_close) << " "
       << fmt(nd.service) << "\n";
  }
  const int n = inst.n();
  auto dump = [&](const char *tag, const std::vector<double> &mat) {
    os << tag << "\n";
    for (int i = 0; i < n; i++) {
      for (int j = 0; j < n; j++) {
        if (j) os << " ";
        os << fmt(mat[static_cast<size_t>(i) * n + j]);
      }
      os << "\n";
    }
  };
  dump("dist", inst.dist_matrix());
  dump("time", inst.time_matrix());
  os << "end\n";
  return os.str();
}

std::string generate_jd_like(const JdGenParams &gp) {
  if (gp.customers < 1 || gp.stations < 1)
    throw std::invalid_argument("generator needs at least one customer and one station");
  Rng rng(gp.seed);
  const int n = gp.customers + gp.stations + 1;

  std::vector<Node> nodes(static_cast<size_t>(n));
  auto place = [&](Node &nd) {
    nd.px = rng.real(gp.lng0, gp.lng1);
    nd.py = rng.real(gp.lat0, gp.lat1);
  };
  nodes[0].id = 0;
  nodes[0].kind = NodeKind::depot;
  nodes[0].tw_open = 0.0;
  nodes[0].tw_close = gp.horizon;
  place(nodes[0]);
  for (int i = 1; i <= gp.customers; i++) {
    Node &nd = nodes[static_cast<size_t>(i)];
    nd.id = i;
    nd.kind = NodeKind::customer;
    place(nd);
    nd.delivery = std::floor(rng.real(0.0, gp.delivery_max) + 0.5);
    nd.pickup = std::floor(rng.real(0.0, gp.pickup_max) + 0.5);
    nd.tw_open = std::floor(rng.real(0.0, gp.window_start_max));
    nd.tw_close =
        std::min(gp.horizon, nd.tw_open + std::floor(rng.real(gp.window_len_min, gp.window_len_max)));
    nd.service = gp.service_time;
  }
  for (int i = gp.customers + 1; i < n; i++) {
    Node &nd = nodes[static_cast<size_t>(i)];
    nd.id = i;
    nd.kind = NodeKind::station;
    place(nd);
    nd.tw_open = 0.0;
    nd.tw_close = gp.horizon;
  }

  std::vector<double> xy(static_cast<size_t>(n) * 2);
  for (int i = 0; i < n; i++) {
    auto [x, y] = mercator_project(nodes[static_cast<size_t>(i)].px, nodes[static_cast<size_t>(i)].py);
    xy[static_cast<size_t>(i) * 2] = x;
    xy[static_cast<size_t>(i) * 2 + 1] = y;
  }
  std::vector<double> dist(static_cast<size_t>(n) * n, 0.0), time(static_cast<size_t>(n) * n, 0.0);
  for (int i = 0; i < n; i++)
    for (int j = 0; j < n; j++) {
      if (i == j) continue;
      const double dx = xy[static_cast<size_t>(i) * 2] - xy[static_cast<size_t>(j) * 2];
      const double dy = xy[static_cast<size_t>(i) * 2 + 1] - xy[static_cast<size_t>(j) * 2 + 1];
      const double factor = 1.0 + rng.real(0.0, gp.road_noise);
      const double d = std::sqrt(dx * dx + dy * dy) * factor;
      dist[static_cast<size_t>(i) * n + j] = d;
      time[static_cast<size_t>(i) * n + j] = d / gp.speed;
    }

  const std::string name =
      gp.name.empty() ? "jd" + std::to_string(gp.customers) + "_s" + std::to_string(gp.seed)
                      : gp.name;
  Instance inst(name, std::move(nodes), gp.customers, gp.stations, std::move(dist),
                std::move(time), gp.load_capacity, gp.battery_capacity, gp.charge_rate,
                gp.consume_rate, gp.dispatch_cost, gp.distance_cost, CoordMode::geographic, false);
  return write_jd(inst);
}

std::string write_solution(const Instance &inst, const Solution &sol) {
  std::ostringstream os;
  char cs[20];
  std::snprintf(cs, sizeof cs, "%016llx", static_cast<unsigned long long>(inst.checksum()));
  os << "EVRP-SOL 1\n";
  os << "instance " << inst.name() << "\n";
  os << "checksum " << cs << "\n";
  os << "vehicles " << sol.routes.size() << "\n";
  os << "cost " << fmt(sol.tc) << "\n";
  for (const Route &r : sol.routes) {
    os << "route " << r.visits.size();
    for (int id : r.visits) os << " " << id;
    os << "\n";
    int nq = 0;
    for (double q : r.charge)
      if (q != 0.0) nq++;
    os << "charge " << nq;
    for (size_t i = 0; i < r.charge.size(); i++)
      if (r.charge[i] != 0.0) os << " " << i << " " << fmt(r.charge[i]);
    os << "\n";
  }
  os << "end\n";
  return os.str();
}

Solution read_solution(const Instance &inst, const std::string &text) {
  JdReader r(text);
  auto magic = r.next();
  if (magic.size() != 2 || magic[0] != "EVRP-SOL" || magic[1] != "1")
    throw ParseError("expected magic 'EVRP-SOL 1'", r.lineno);
  auto name_toks = r.next();
  if (name_toks.size() != 2 || name_toks[0] != "instance")
    throw ParseError("expected 'instance <name>'", r.lineno);
  auto cs_toks = r.next();
  if (cs_toks.size() != 2 || cs_toks[0] != "checksum")
    throw ParseError("expected 'checksum <hex>'", r.lineno);
  char expect[20];
  std::snprintf(expect, sizeof expect, "%016llx",
                static_cast<unsigned long long>(inst.checksum()));
  if (cs_toks[1] != expect)
    throw ChecksumError("solution checksum " + cs_toks[1] + " does not match instance " + expect);

  const int k = static_cast<int>(r.scalar("vehicles"));
  const double tc = r.scalar("cost");
  Solution sol;
  for (int i = 0; i < k; i++) {
    auto route_toks = r.next();
    if (route_toks.size() < 2 || route_toks[0] != "route")
      throw ParseError("expected 'route <len> <ids...>'", r.lineno);
    const long len = parse_int(route_toks[1], r.lineno);
    if (static_cast<long>(route_toks.size()) != len + 2)
      throw ParseError("route length mismatch", r.lineno);
    Route route;
    for (long j = 0; j < len; j++) {
      const long id = parse_int(route_toks[static_cast<size_t>(j + 2)], r.lineno);
      if (id < 0 || id >= inst.n()) throw ParseError("unknown node id", r.lineno);
      route.visits.push_back(static_cast<int>(id));
    }
    route.charge.assign(route.visits.size(), 0.0);
    auto charge_toks = r.next();
    if (charge_toks.size() < 2 || charge_toks[0] != "charge")
      throw ParseError("expected 'charge <count> ...'", r.lineno);
    const long nq = parse_int(charge_toks[1], r.lineno);
    if (static_cast<long>(charge_toks.size()) != 2 + 2 * nq)
      throw ParseError("charge list length mismatch", r.lineno);
    for (long j = 0; j < nq; j++) {
      const long pos = parse_int(charge_toks[static_cast<size_t>(2 + 2 * j)], r.lineno);
      const double q = parse_num(charge_toks[static_cast<size_t>(3 + 2 * j)], r.lineno);
      if (pos < 0 || pos >= static_cast<long>(route.visits.size()))
        throw ParseError("charge position out of range", r.lineno);
      route.charge[static_cast<size_t>(pos)] = q;
    }
    route.eval = evaluate_route(inst, route);
    sol.routes.push_back(std::move(route));
  }
  auto end_tag = r.next();
  if (end_tag.size() != 1 || end_tag[0] != "end") throw ParseError("expected 'end'", r.lineno);
  sol.tc = tc;
  return sol;
}

std::string read_file(const std::string &path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open file: " + path);
  std::ostringstream os;
  os << f.rdbuf();
  return os.str();
}

void write_file(const std::string &path, const std::string &content) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write file: " + path);
  f << content;
}

Instance load_instance(const std::string &path, const std::string &format) {
  const std::string text = read_file(path);
  std::string fmt_name = format;
  if (fmt_name == "auto")
    fmt_name = text.rfind("EVRP-JD", 0) == 0 ? "jd" : "akb";
  if (fmt_name == "jd") return parse_jd(text);
  if (fmt_name == "akb") {
    // instance name from the file stem
    std::string name = path;
    const auto slash = name.find_last_of("/\\");
    if (slash != std::string::npos) name = name.substr(slash + 1);
    const auto dot = name.find_last_of('.');
    if (dot != std::string::npos) name = name.substr(0, dot);
    return parse_akb(text, name);
  }
  throw std::invalid_argument("unknown instance format: " + format);
}

}  // namespace evrp
