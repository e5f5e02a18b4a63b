#include "evrp/params.hpp"

#include <cstdio>
#include <sstream>

namespace evrp {

HmaParams profile_params(const std::string &name) {
  HmaParams p;
  if (name == "akb_small") {
    p.g1 = 20; p.g2 = 20; p.population = 9; p.alpha = 3.0; p.b_generations = 5;
    p.sr = 1.0; p.omega1 = 0.2; p.omega2 = 0.4;
  } else if (name == "akb_medium") {
    p.g1 = 20; p.g2 = 20; p.population = 4; p.alpha = 3.0; p.b_generations = 5;
    p.sr = 0.5; p.omega1 = 0.1; p.omega2 = 0.2;
  } else if (name == "jd") {
    p.g1 = 20; p.g2 = 20; p.population = 4; p.alpha = 3.0; p.b_generations = 5;
    p.sr = 0.1; p.omega1 = 0.05; p.omega2 = 0.05;
  } else if (name != "default") {
    throw std::invalid_argument("unknown parameter profile: " + name);
  }
  return p;
}

HmaParams parse_params(const std::string &text, HmaParams base) {
  std::istringstream is(text);
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    lineno++;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    std::istringstream ls(line);
    std::string key, val, eq;
    if (!(ls >> key)) continue;
    if (!(ls >> val)) throw ParseError("missing value for key '" + key + "'", lineno);
    if (val == "=" && !(ls >> val)) throw ParseError("missing value for key '" + key + "'", lineno);
    std::string extra;
    if (ls >> extra) throw ParseError("trailing tokens after value", lineno);

    try {
      if (key == "g1") base.g1 = std::stoi(val);
      else if (key == "g2") base.g2 = std::stoi(val);
      else if (key == "population") base.population = std::stoi(val);
      else if (key == "alpha") base.alpha = std::stod(val);
      else if (key == "b_generations") base.b_generations = std::stoi(val);
      else if (key == "sr") base.sr = std::stod(val);
      else if (key == "omega1") base.omega1 = std::stod(val);
      else if (key == "omega2") base.omega2 = std::stod(val);
      else if (key == "lambda") base.lambda = std::stod(val);
      else if (key == "gamma") base.gamma = std::stod(val);
      else if (key == "time_limit") base.time_limit_s = std::stod(val);
      else if (key == "large_scale_threshold") base.large_scale_threshold = std::stoi(val);
      else if (key == "subproblems") base.subproblems = std::stoi(val);
      else if (key == "seed") base.seed = std::stoull(val);
      else throw ParseError("unknown parameter key '" + key + "'", lineno);
    } catch (const ParseError &) {
      throw;
    } catch (const std::exception &) {
      throw ParseError("invalid value '" + val + "' for key '" + key + "'", lineno);
    }
  }
  return base;
}

std::string write_params(const HmaParams &p) {
  std::ostringstream os;
  os << "g1 " << p.g1 << "\n";
  os << "g2 " << p.g2 << "\n";
  os << "population " << p.population << "\n";
  os << "alpha " << p.alpha << "\n";
  os << "b_generations " << p.b_generations << "\n";
  os << "sr " << p.sr << "\n";
  os << "omega1 " << p.omega1 << "\n";
  os << "omega2 " << p.omega2 << "\n";
  os << "lambda " << p.lambda << "\n";
  os << "gamma " << p.gamma << "\n";
  os << "large_scale_threshold " << p.large_scale_threshold << "\n";
  return os.str();
}

}  // namespace evrp
