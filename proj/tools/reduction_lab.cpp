// reduction_lab: command-line front end for the reduction library.
//
// Exit codes: 0 pass, 1 check failure, 2 usage/config error, 3 regularity breach.

#include <openssl/evp.h>

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <future>
#include <iomanip>
#include <iostream>
#include <sstream>

#include "rlab/rlab.hpp"

#ifndef RLAB_VERSION
#define RLAB_VERSION "0.0.0"
#endif

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;
using namespace rlab;

namespace {

enum Exit { kPass = 0, kCheckFailed = 1, kUsage = 2, kRegularity = 3 };

std::string sha256_hex(const std::string& data) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_Digest(data.data(), data.size(), md, &len, EVP_sha256(), nullptr);
  std::ostringstream os;
  for (unsigned int i = 0; i < len; ++i) os << std::hex << std::setw(2) << std::setfill('0') << int(md[i]);
  return os.str();
}

std::string read_file(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

fs::path output_dir(const RunConfig& cfg) {
  const char* env = std::getenv("REDUCTION_LAB_OUTPUT");
  fs::path dir = env && *env ? fs::path(env) : fs::path(cfg.output_dir);
  fs::create_directories(dir);
  return dir;
}

void write_file(const fs::path& p, const std::string& content) {
  std::ofstream f(p, std::ios::binary);
  f << content;
  if (!f) throw Error("cannot write " + p.string());
}

// UTC timestamp; SOURCE_DATE_EPOCH pins it for reproducible manifests.
std::string timestamp() {
  std::time_t t = std::time(nullptr);
  if (const char* e = std::getenv("SOURCE_DATE_EPOCH")) t = static_cast<std::time_t>(std::atoll(e));
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

json config_echo(const RunConfig& cfg) {
  json j = json::object();
  for (const auto& [k, v] : cfg.entries()) j[k] = v;
  return j;
}

// Lists every file of the output directory (except the manifest itself).
void write_manifest(const fs::path& dir, const std::string& command, const RunConfig& cfg,
                    const json& checks, const std::string& started, json extra = json::object()) {
  json files = json::array();
  std::vector<fs::path> paths;
  for (const auto& e : fs::directory_iterator(dir))
    if (e.is_regular_file() && e.path().filename() != "manifest.json") paths.push_back(e.path());
  std::sort(paths.begin(), paths.end());
  for (const auto& p : paths) {
    const std::string data = read_file(p);
    files.push_back({{"path", p.filename().string()}, {"bytes", data.size()}, {"sha256", sha256_hex(data)}});
  }
  json m = {{"artifact", "reduction_lab"},
            {"version", RLAB_VERSION},
            {"command", command},
            {"started", started},
            {"finished", timestamp()},
            {"config", config_echo(cfg)},
            {"files", files},
            {"checks", checks}};
  for (auto& [k, v] : extra.items()) m[k] = v;
  write_file(dir / "manifest.json", m.dump(2) + "\n");
}

// ---------------------------------------------------------------- roots

int cmd_roots(int m, int n) {
  if (n < 1 || m < n) {
    std::cerr << "roots: requires m >= n >= 1\n";
    return kUsage;
  }
  const RootSystemData rsd = build_root_system(Signature(m, n));
  std::cout << "restricted roots of su(" << m << "," << n << ")\n";
  std::cout << std::left << std::setw(10) << "kind" << std::setw(10) << "root" << std::setw(14)
            << "alpha(q)" << "multiplicity\n";
  json roots = json::array();
  for (const auto& r : rsd.roots) {
    const char* kind = r.kind == RootKind::Difference ? "diff"
                       : r.kind == RootKind::Sum      ? "sum"
                       : r.kind == RootKind::Double   ? "double"
                                                      : "single";
    std::cout << std::left << std::setw(10) << kind << std::setw(10) << r.name() << std::setw(14)
              << r.formula() << r.multiplicity << "\n";
    roots.push_back({{"kind", kind}, {"root", r.name()}, {"formula", r.formula()},
                     {"multiplicity", r.multiplicity}});
  }
  std::cout << "sum of multiplicities: " << rsd.multiplicity_sum() << " (2mn - n = " << 2 * m * n - n
            << ")\n\n";
  json out = {{"m", m}, {"n", n}, {"roots", roots}, {"multiplicity_sum", rsd.multiplicity_sum()}};
  std::cout << out.dump(2) << "\n";
  return kPass;
}

// ---------------------------------------------------------------- verify

struct Check {
  std::string name;
  double residual;
  double tolerance;
  bool pass() const { return residual <= tolerance; }
};

std::vector<Check> verify_suite(const RunConfig& cfg) {
  std::vector<Check> out;
  Rng rng(cfg.seed);
  const CaseSetup setup = make_setup(cfg);
  const Signature s = setup.sig;
  const RootSystemData rsd = build_root_system(s);

  out.push_back({"root_multiplicity_sum", std::abs(double(rsd.multiplicity_sum() - (2 * s.m * s.n - s.n))), 0.0});

  double ortho = 0.0, theta = 0.0, adq = 0.0;
  const CartanVector probe(s, sample_chamber(s.n, rng));
  const ComplexMatrix qm = embed_cartan(probe).mat();
  for (std::size_t i = 0; i < rsd.vectors.size(); ++i) {
    const auto& vi = rsd.vectors[i];
    for (std::size_t j = 0; j < rsd.vectors.size(); ++j) {
      const auto& vj = rsd.vectors[j];
      const double d = i == j ? 1.0 : 0.0;
      ortho = std::max({ortho, std::abs(trace_product(vi.plus, vj.plus) + d),
                        std::abs(trace_product(vi.minus, vj.minus) - d),
                        std::abs(trace_product(vi.plus, vj.minus))});
    }
    theta = std::max({theta, max_abs(ComplexMatrix(-vi.plus.adjoint() - vi.plus)),
                      max_abs(ComplexMatrix(-vi.minus.adjoint() + vi.minus))});
    const double a = rsd.roots[vi.root].value(probe.q);
    adq = std::max({adq, max_abs(ComplexMatrix(qm * vi.plus - vi.plus * qm - a * vi.minus)),
                    max_abs(ComplexMatrix(qm * vi.minus - vi.minus * qm - a * vi.plus))});
  }
  out.push_back({"root_basis_orthonormality", ortho, 1e-12});
  out.push_back({"theta_relations", theta, 1e-12});
  out.push_back({"ad_q_relations", adq, 1e-11});

  out.push_back({"representatives_on_orbits",
                 std::max(orbit_membership_residual(setup.xi_l, setup.left),
                          orbit_membership_residual(setup.xi_r, setup.right)),
                 1e-9});
  out.push_back({"constraint_residual", constraint_residual(setup.xi_l, setup.xi_r, rsd), 1e-12});

  double mom = 0.0, ham = 0.0, coup = 0.0, gauge = 0.0;
  auto point_check = [&](const RealVector& q, const RealVector& p) {
    const ReducedPoint pt = make_point(setup, q, p);
    const GeodesicState st = initial_state(pt, rsd);
    mom = std::max(mom, st.momentum_residual());
    const double hr = reduced_hamiltonian(pt, rsd);
    const double half_ll = 0.5 * trace_form(st.jl, st.jl);
    ham = std::max(ham, std::abs(hr - half_ll) / (1.0 + std::abs(hr)));
    const double target = bcn_hamiltonian(q, p, setup.cc) + setup.cc.energy_shift;
    coup = std::max(coup, std::abs(0.5 * hr - target) / (1.0 + std::abs(target)));
    const GroupElement mg = random_centralizer(s, rng);
    const ReducedPoint moved(pt.q, p, OrbitPoint(conjugate(mg, pt.xi_l.xi)),
                             OrbitPoint(conjugate(mg, pt.xi_r.xi)));
    gauge = std::max(gauge, std::abs(0.5 * reduced_hamiltonian(moved, rsd) - target) / (1.0 + std::abs(target)));
  };
  point_check(cfg.q0, cfg.p0);
  for (int i = 0; i < 100; ++i) point_check(sample_chamber(s.n, rng), sample_momenta(s.n, rng));
  out.push_back({"momentum_map_zero", mom, 1e-10});
  out.push_back({"hamiltonian_identity", ham, 1e-10});
  out.push_back({"coupling_formula", coup, 1e-10});
  out.push_back({"centralizer_gauge_invariance", gauge, 1e-10});

  double kak = 0.0;
  for (int i = 0; i < 100; ++i) {
    const CartanVector q(s, sample_chamber(s.n, rng));
    const GroupElement g(s, random_compact(s, rng).mat * exp_element(embed_cartan(q)).mat *
                                random_compact(s, rng).mat);
    const KAKFactors f = kak_decompose(g, rsd);
    kak = std::max({kak, max_abs(ComplexMatrix(kak_compose(f).mat - g.mat)) / max_abs(g.mat),
                    max_abs(RealVector(f.q.q - q.q)), f.g_plus.compact_residual(),
                    f.h_plus.compact_residual()});
  }
  out.push_back({"kak_round_trip", kak, 1e-10});

  const ReducedPoint pt0 = make_point(setup, cfg.q0, cfg.p0);
  const GeodesicState st0 = initial_state(pt0, rsd);
  const PhasePoint back = project_to_reduced(st0.g, st0, rsd);
  out.push_back({"projection_round_trip",
                 std::max(max_abs(RealVector(back.q - cfg.q0)), max_abs(RealVector(back.p - cfg.p0))),
                 1e-10});

  double tr = 0.0;
  for (Side side : {Side::Left, Side::Right})
    tr = std::max(tr, std::abs(lax_matrix(pt0, 0.7, side, rsd).mat.mat().trace()));
  out.push_back({"lax_trace_zero", tr, 1e-12});

  double explog = 0.0;
  for (int i = 0; i < 20; ++i) {
    const ComplexMatrix x = Complex(0, 1) * sample_compact_algebra(s, rng).mat();  // Hermitian
    const ComplexMatrix e = mat_exp<double>(x);
    explog = std::max(explog, max_abs(ComplexMatrix(mat_log_hpd<double>(e, 1e-12) - x)));
  }
  out.push_back({"exp_log_round_trip", explog, 1e-10});
  return out;
}

int cmd_verify(const std::string& path) {
  const std::string started = timestamp();
  const RunConfig cfg = load_config(path);
  const fs::path dir = output_dir(cfg);
  const auto checks = verify_suite(cfg);
  json arr = json::array(), summary = json::object();
  bool all = true;
  for (const auto& c : checks) {
    arr.push_back({{"name", c.name}, {"residual", c.residual}, {"tolerance", c.tolerance}, {"pass", c.pass()}});
    summary[c.name] = c.pass();
    std::cout << (c.pass() ? "PASS " : "FAIL ") << std::left << std::setw(32) << c.name
              << " residual " << c.residual << " (tol " << c.tolerance << ")\n";
    if (!c.pass()) {
      all = false;
      std::cerr << "verify: check failed: " << c.name << "\n";
    }
  }
  write_file(dir / "verify.json", json({{"checks", arr}, {"pass", all}}).dump(2) + "\n");
  write_manifest(dir, "verify", cfg, summary, started);
  return all ? kPass : kCheckFailed;
}

// ---------------------------------------------------------------- simulate / compare

Trajectory run_method(const RunConfig& cfg, Method method) {
  const CaseSetup setup = make_setup(cfg);
  const RootSystemData rsd = build_root_system(setup.sig);
  if (method == Method::Projection)
    return projected_trajectory(make_point(setup, cfg.q0, cfg.p0), cfg.integrator(), rsd, setup.cc);
  CouplingConstants cc = setup.cc;
  cc.g_sq *= 1.0 + cfg.perturb_g_sq;  // sensitivity control, zero by default
  return sutherland_integrate(cfg.q0, cfg.p0, cc, cfg.integrator());
}

int cmd_simulate(const std::string& path, const std::string& method_name) {
  const std::string started = timestamp();
  const RunConfig cfg = load_config(path);
  Method method;
  if (method_name == "projection") method = Method::Projection;
  else if (method_name == "direct") method = Method::Direct;
  else {
    std::cerr << "simulate: --method must be projection or direct\n";
    return kUsage;
  }
  const fs::path dir = output_dir(cfg);
  const Trajectory tr = run_method(cfg, method);
  write_file(dir / ("trajectory_" + method_name + ".csv"), trajectory_csv(tr));
  json extra = {{"method", method_name},
                {"samples", tr.size()},
                {"energy_drift", tr.energy_drift()},
                {"stop_time", tr.stop_time ? json(*tr.stop_time) : json(nullptr)},
                {"stop_reason", tr.stop_reason}};
  write_manifest(dir, "simulate", cfg, {{"regular_window", tr.complete()}}, started, extra);
  std::cout << "simulate " << method_name << ": " << tr.size() << " samples, energy drift "
            << tr.energy_drift() << "\n";
  if (!tr.complete()) {
    std::cerr << "simulate: regularity breach at t = " << *tr.stop_time << " (" << tr.stop_reason << ")\n";
    return kRegularity;
  }
  return kPass;
}

json comparison_json(const ComparisonReport& r) {
  return {{"max_dq", r.max_dq},
          {"max_dp", r.max_dp},
          {"energy_drift_a", r.energy_drift_a},
          {"energy_drift_b", r.energy_drift_b},
          {"stop_time", r.stop_time},
          {"samples", r.samples},
          {"truncated", r.truncated}};
}

ComparisonReport compare_runs(const RunConfig& cfg) {
  return compare_trajectories(run_method(cfg, Method::Projection), run_method(cfg, Method::Direct));
}

int cmd_compare(const std::string& path) {
  const std::string started = timestamp();
  const RunConfig cfg = load_config(path);
  const fs::path dir = output_dir(cfg);
  const ComparisonReport r = compare_runs(cfg);
  const bool pass = r.max_dq <= cfg.compare_dq;
  json j = comparison_json(r);
  j["tolerance_dq"] = cfg.compare_dq;
  j["pass"] = pass;
  write_file(dir / "compare.json", j.dump(2) + "\n");
  write_manifest(dir, "compare", cfg, {{"max_dq", pass}}, started);
  std::cout << "compare: max_dq " << r.max_dq << " max_dp " << r.max_dp << " over t <= " << r.stop_time
            << (r.truncated ? " (truncated at a chamber wall)" : "") << "\n";
  if (!pass) std::cerr << "compare: max_dq exceeds " << cfg.compare_dq << "\n";
  return pass ? kPass : kCheckFailed;
}

// ---------------------------------------------------------------- lax

int cmd_lax(const std::string& path, double v, const std::string& side_name) {
  const std::string started = timestamp();
  const RunConfig cfg = load_config(path);
  Side side;
  if (side_name == "l") side = Side::Left;
  else if (side_name == "r") side = Side::Right;
  else {
    std::cerr << "lax: --side must be l or r\n";
    return kUsage;
  }
  const fs::path dir = output_dir(cfg);
  const CaseSetup setup = make_setup(cfg);
  const RootSystemData rsd = build_root_system(setup.sig);
  const DriftReport rep =
      invariant_drift(make_point(setup, cfg.q0, cfg.p0), cfg.integrator(), v, side, rsd);
  const bool pass = rep.max_drift <= 1e-6 && rep.fit_residual <= 1e-6;
  json ym = json::array();
  for (const auto& c : rep.y_m) ym.push_back(std::vector<double>(c.data(), c.data() + c.size()));
  json j = {{"v", v},
            {"side", to_string(side)},
            {"max_drift", rep.max_drift},
            {"fit_residual", rep.fit_residual},
            {"max_trace_drift", rep.max_trace_drift},
            {"fit_condition", rep.fit_condition},
            {"fit_times", rep.fit_times},
            {"y_m", ym},
            {"samples", rep.samples},
            {"stop_time", rep.stop_time ? json(*rep.stop_time) : json(nullptr)},
            {"pass", pass}};
  write_file(dir / "lax.json", j.dump(2) + "\n");
  write_manifest(dir, "lax", cfg, {{"isospectral", rep.max_drift <= 1e-6}, {"lax_fit", rep.fit_residual <= 1e-6}},
                 started);
  std::cout << "lax v=" << v << " side=" << to_string(side) << ": max_drift " << rep.max_drift
            << " fit_residual " << rep.fit_residual << "\n";
  return pass ? kPass : kCheckFailed;
}

// ---------------------------------------------------------------- sweep

int cmd_sweep(const std::string& path, const std::string& param, std::vector<std::string> values) {
  const std::string started = timestamp();
  values.erase(std::remove(values.begin(), values.end(), std::string()), values.end());
  if (values.empty()) {
    std::cerr << "sweep: --values must list at least one value\n";
    return kUsage;
  }
  if (param.empty()) {
    std::cerr << "sweep: --param is required\n";
    return kUsage;
  }
  const RunConfig base = load_config(path);
  for (const auto& v : values) load_config(path, {{param, v}});  // reject bad values up front

  struct Row {
    double value;
    std::optional<ComparisonReport> report;
    bool pass;
    std::string error;
  };
  std::vector<std::future<Row>> jobs;
  for (const auto& v : values) {
    jobs.push_back(std::async(std::launch::async, [&path, &param, v]() -> Row {
      const RunConfig cfg = load_config(path, {{param, v}});
      const double value = detail::parse_double(param, v);
      try {
        const ComparisonReport r = compare_runs(cfg);
        return {value, r, r.max_dq <= cfg.compare_dq, {}};
      } catch (const std::exception& e) {
        return {value, std::nullopt, false, e.what()};
      }
    }));
  }
  std::vector<Row> rows;
  for (auto& j : jobs) rows.push_back(j.get());
  std::sort(rows.begin(), rows.end(), [](const Row& a, const Row& b) { return a.value < b.value; });

  const fs::path dir = output_dir(base);
  std::string csv = "value,max_dq,max_dp,energy_drift\n";
  json checks = json::object();
  bool all = true;
  for (const auto& r : rows) {
    csv += format_double(r.value);
    if (r.report) {
      csv += "," + format_double(r.report->max_dq) + "," + format_double(r.report->max_dp) + "," +
             format_double(r.report->energy_drift_b) + "\n";
    } else {
      csv += ",nan,nan,nan\n";
      std::cerr << "sweep: " << param << " = " << r.value << " failed: " << r.error << "\n";
    }
    checks[param + "=" + format_double(r.value)] = r.pass;
    all = all && r.pass;
    std::cout << param << " = " << format_double(r.value) << ": "
              << (r.report ? "max_dq " + format_double(r.report->max_dq) : r.error)
              << (r.pass ? " pass" : " FAIL") << "\n";
  }
  write_file(dir / "sweep.csv", csv);
  write_manifest(dir, "sweep", base, checks, started, {{"param", param}});
  return all ? kPass : kCheckFailed;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Hamiltonian reduction of SU(m,n) geodesics to BC_n Sutherland models"};
  app.require_subcommand(1);

  int m = 0, n = 0;
  auto* roots = app.add_subcommand("roots", "print the restricted root table of su(m,n)");
  roots->add_option("m", m, "m")->required();
  roots->add_option("n", n, "n")->required();

  std::string config, method = "projection", side = "l", param;
  double v = 0.7;
  std::vector<std::string> values;
  auto add_config = [&](CLI::App* sub) { sub->add_option("--config", config, "run configuration")->required(); };

  auto* verify = app.add_subcommand("verify", "run the invariant suite");
  add_config(verify);
  auto* simulate = app.add_subcommand("simulate", "write a trajectory CSV");
  add_config(simulate);
  simulate->add_option("--method", method, "projection or direct");
  auto* compare = app.add_subcommand("compare", "compare the two routes");
  add_config(compare);
  auto* lax = app.add_subcommand("lax", "isospectral drift of L(v)");
  add_config(lax);
  lax->add_option("--v", v, "spectral parameter");
  lax->add_option("--side", side, "l or r");
  auto* sweep = app.add_subcommand("sweep", "compare over a list of parameter values");
  add_config(sweep);
  sweep->add_option("--param", param, "config key to vary");
  sweep->add_option("--values", values, "comma-separated values")->delimiter(',');

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kPass : kUsage;
  }

  try {
    if (*roots) return cmd_roots(m, n);
    if (*verify) return cmd_verify(config);
    if (*simulate) return cmd_simulate(config, method);
    if (*compare) return cmd_compare(config);
    if (*lax) return cmd_lax(config, v, side);
    if (*sweep) return cmd_sweep(config, param, values);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kUsage;
  } catch (const ConsistencyError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kUsage;
  } catch (const RegularityError& e) {
    std::cerr << "regularity breach: " << e.what() << "\n";
    return kRegularity;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kCheckFailed;
  }
  return kUsage;
}
