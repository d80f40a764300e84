#pragma once

// Run configuration: plain-text "dotted.key = value" lines, '#' comments.
//
//   group.m = 2
//   group.n = 2
//   orbit.case = sunn
//   orbit.kappa = 2
//   init.q = 1.0, 0.4

#include <cstdint>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "rlab/dynamics.hpp"
#include "rlab/reduction.hpp"

namespace rlab {

struct RunConfig {
  int m = 0;
  int n = 0;
  OrbitCase orbit_case = OrbitCase::SuNN;
  double kappa = 1.0;
  double x = 0.0;
  double y = 0.0;
  bool x_given = false;
  RealVector q0;
  RealVector p0;
  double dt = 1e-3;
  double t_max = 5.0;
  double regularity = 1e-4;
  double compare_dq = 1e-6;
  double compare_dp = 1e-5;
  double perturb_g_sq = 0.0;  // relative change of g^2 on the direct route only
  std::uint64_t seed = 0;
  std::string output_dir = "out";

  IntegratorConfig integrator() const { return {dt, t_max, regularity}; }

  /// Echo of the normalized configuration, in file syntax.
  std::map<std::string, std::string> entries() const;
};

namespace detail {

inline std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

inline double parse_double(const std::string& key, const std::string& v) {
  std::size_t used = 0;
  double out;
  try {
    out = std::stod(v, &used);
  } catch (const std::exception&) {
    throw ConfigError(key + ": expected a number, got '" + v + "'");
  }
  if (used != v.size()) throw ConfigError(key + ": trailing characters in '" + v + "'");
  return out;
}

inline long long parse_int(const std::string& key, const std::string& v) {
  std::size_t used = 0;
  long long out;
  try {
    out = std::stoll(v, &used);
  } catch (const std::exception&) {
    throw ConfigError(key + ": expected an integer, got '" + v + "'");
  }
  if (used != v.size()) throw ConfigError(key + ": expected an integer, got '" + v + "'");
  return out;
}

inline RealVector parse_vector(const std::string& key, const std::string& v) {
  std::vector<double> vals;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) vals.push_back(parse_double(key, trim(item)));
  if (vals.empty()) throw ConfigError(key + ": empty vector");
  return Eigen::Map<RealVector>(vals.data(), static_cast<Eigen::Index>(vals.size()));
}

inline std::string fmt17(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

inline std::string fmt_vector(const RealVector& v) {
  std::string out;
  for (Eigen::Index i = 0; i < v.size(); ++i) out += (i ? ", " : "") + fmt17(v(i));
  return out;
}

}  // namespace detail

inline std::map<std::string, std::string> RunConfig::entries() const {
  using detail::fmt17;
  return {{"group.m", std::to_string(m)},
          {"group.n", std::to_string(n)},
          {"orbit.case", to_string(orbit_case)},
          {"orbit.kappa", fmt17(kappa)},
          {"orbit.x", fmt17(x)},
          {"orbit.y", fmt17(y)},
          {"init.q", detail::fmt_vector(q0)},
          {"init.p", detail::fmt_vector(p0)},
          {"integrator.dt", fmt17(dt)},
          {"integrator.t_max", fmt17(t_max)},
          {"tolerances.regularity", fmt17(regularity)},
          {"tolerances.compare_dq", fmt17(compare_dq)},
          {"tolerances.compare_dp", fmt17(compare_dp)},
          {"control.perturb_g_sq", fmt17(perturb_g_sq)},
          {"seed", std::to_string(seed)},
          {"output.dir", output_dir}};
}

/// Parses and validates a configuration. Every problem raises ConfigError
/// with a message naming the offending key or inequality. Entries of
/// `overrides` replace (or add) keys of the text.
inline RunConfig parse_config(const std::string& text,
                              const std::map<std::string, std::string>& overrides = {}) {
  std::map<std::string, std::string> kv;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = detail::trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("line " + std::to_string(lineno) + ": expected 'key = value'");
    const std::string key = detail::trim(line.substr(0, eq));
    const std::string val = detail::trim(line.substr(eq + 1));
    if (key.empty() || val.empty())
      throw ConfigError("line " + std::to_string(lineno) + ": empty key or value");
    if (!kv.emplace(key, val).second) throw ConfigError(key + ": given more than once");
  }
  for (const auto& [key, val] : overrides) kv[key] = val;

  RunConfig c;
  auto take = [&](const std::string& key) -> std::optional<std::string> {
    auto it = kv.find(key);
    if (it == kv.end()) return std::nullopt;
    std::string v = it->second;
    kv.erase(it);
    return v;
  };
  auto require = [&](const std::string& key) {
    auto v = take(key);
    if (!v) throw ConfigError(key + ": required key is missing");
    return *v;
  };

  c.m = static_cast<int>(detail::parse_int("group.m", require("group.m")));
  c.n = static_cast<int>(detail::parse_int("group.n", require("group.n")));
  const std::string kind = require("orbit.case");
  if (kind == "sunn") c.orbit_case = OrbitCase::SuNN;
  else if (kind == "sun1n") c.orbit_case = OrbitCase::SuN1N;
  else if (kind == "sumn") c.orbit_case = OrbitCase::SuMN;
  else throw ConfigError("orbit.case: expected sunn, sun1n or sumn, got '" + kind + "'");
  c.kappa = detail::parse_double("orbit.kappa", require("orbit.kappa"));
  if (auto v = take("orbit.x")) {
    c.x = detail::parse_double("orbit.x", *v);
    c.x_given = true;
  }
  if (auto v = take("orbit.y")) c.y = detail::parse_double("orbit.y", *v);
  c.q0 = detail::parse_vector("init.q", require("init.q"));
  c.p0 = detail::parse_vector("init.p", require("init.p"));
  if (auto v = take("integrator.dt")) c.dt = detail::parse_double("integrator.dt", *v);
  if (auto v = take("integrator.t_max")) c.t_max = detail::parse_double("integrator.t_max", *v);
  if (auto v = take("tolerances.regularity"))
    c.regularity = detail::parse_double("tolerances.regularity", *v);
  if (auto v = take("tolerances.compare_dq"))
    c.compare_dq = detail::parse_double("tolerances.compare_dq", *v);
  if (auto v = take("tolerances.compare_dp"))
    c.compare_dp = detail::parse_double("tolerances.compare_dp", *v);
  if (auto v = take("control.perturb_g_sq"))
    c.perturb_g_sq = detail::parse_double("control.perturb_g_sq", *v);
  if (auto v = take("seed")) {
    const long long s = detail::parse_int("seed", *v);
    if (s < 0) throw ConfigError("seed: must be nonnegative");
    c.seed = static_cast<std::uint64_t>(s);
  }
  if (auto v = take("output.dir")) c.output_dir = *v;
  if (!kv.empty()) throw ConfigError(kv.begin()->first + ": unknown key");

  if (c.n < 1 || c.m < c.n) throw ConfigError("group: requires m >= n >= 1");
  if (!(c.kappa > 0)) throw ConfigError("orbit.kappa: must be positive");
  switch (c.orbit_case) {
    case OrbitCase::SuNN:
      if (c.m != c.n) throw ConfigError("orbit.case = sunn requires group.m = group.n");
      break;
    case OrbitCase::SuN1N:
      if (c.m != c.n + 1) throw ConfigError("orbit.case = sun1n requires group.m = group.n + 1");
      if (c.kappa + c.x + c.y < 0)
        throw ConfigError("orbit: sun1n requires kappa + x + y >= 0");
      if (c.kappa - c.n * (c.x + c.y) < 0)
        throw ConfigError("orbit: sun1n requires kappa - n(x + y) >= 0");
      break;
    case OrbitCase::SuMN:
      if (c.m < c.n + 1) throw ConfigError("orbit.case = sumn requires group.m >= group.n + 1");
      if (c.x_given && c.x != -c.y)
        throw ConfigError("orbit.x: sumn forces x = -y for a one-point reduced orbit");
      c.x = -c.y;
      break;
  }
  if (c.q0.size() != c.n) throw ConfigError("init.q: expected n entries");
  if (c.p0.size() != c.n) throw ConfigError("init.p: expected n entries");
  if (!(c.dt > 0)) throw ConfigError("integrator.dt: must be positive");
  if (!(c.t_max > 0)) throw ConfigError("integrator.t_max: must be positive");
  if (!(c.regularity > 0)) throw ConfigError("tolerances.regularity: must be positive");
  if (!(c.compare_dq > 0) || !(c.compare_dp > 0)) throw ConfigError("tolerances: must be positive");
  const auto margin = bcn_chamber_margin(c.q0);
  if (margin.margin < c.regularity)
    throw ConfigError("init.q: must satisfy q1 > ... > qn > 0 with margin >= tolerances.regularity (wall " +
                      margin.wall + ")");
  return c;
}

inline std::string read_config_text(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("cannot open config file '" + path + "'");
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

inline RunConfig load_config(const std::string& path,
                             const std::map<std::string, std::string>& overrides = {}) {
  return parse_config(read_config_text(path), overrides);
}

/// The one-point setup described by the configuration.
inline CaseSetup make_setup(const RunConfig& c) {
  switch (c.orbit_case) {
    case OrbitCase::SuNN: return sunn_setup(c.n, c.kappa, c.x, c.y);
    case OrbitCase::SuN1N: return sun1n_setup(c.n, c.kappa, c.x, c.y);
    case OrbitCase::SuMN: return sumn_setup(c.m, c.n, c.kappa, c.y);
  }
  throw ConfigError("unknown orbit case");
}

}  // namespace rlab
