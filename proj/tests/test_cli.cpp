#include <gtest/gtest.h>
#include <openssl/evp.h>

#include <json.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <string>
#include <set>
#include <sys/wait.h>
#include <unistd.h>

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

const std::string kBin = REDUCTION_LAB_BIN;
const std::string kConfigs = CONFIG_DIR;

struct Outcome {
  int code;
  std::string out;
  std::string err;
};

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

std::string sha256_hex(const std::string& data) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_Digest(data.data(), data.size(), md, &len, EVP_sha256(), nullptr);
  std::ostringstream os;
  for (unsigned int i = 0; i < len; ++i) os << std::hex << std::setw(2) << std::setfill('0') << int(md[i]);
  return os.str();
}

class Cli : public ::testing::Test {
protected:
  void SetUp() override {
    const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
    root_ = fs::temp_directory_path() / ("reduction_lab_cli_" + std::string(info->name()) + "_" +
                                         std::to_string(::getpid()));
    fs::remove_all(root_);
    fs::create_directories(root_);
  }
  void TearDown() override { fs::remove_all(root_); }

  // Runs the binary with REDUCTION_LAB_OUTPUT pointing at `out` (relative to root_).
  Outcome run(const std::string& args, const std::string& out = "out") {
    const fs::path o = root_ / out, so = root_ / "stdout.txt", se = root_ / "stderr.txt";
    const std::string cmd = "REDUCTION_LAB_OUTPUT='" + o.string() + "' SOURCE_DATE_EPOCH=0 '" + kBin + "' " + args +
                            " >'" + so.string() + "' 2>'" + se.string() + "'";
    const int status = std::system(cmd.c_str());
    return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, slurp(so), slurp(se)};
  }

  std::string config(const std::string& name) const { return "--config '" + kConfigs + "/" + name + "'"; }

  fs::path write_config(const std::string& name, const std::string& text) {
    const fs::path p = root_ / name;
    std::ofstream(p) << text;
    return p;
  }

  json read_json(const fs::path& p) { return json::parse(slurp(p)); }

  fs::path root_;
};

}  // namespace

TEST_F(Cli, RootsTable) {
  const Outcome a = run("roots 3 2");
  EXPECT_EQ(a.code, 0);
  EXPECT_NE(a.out.find("e1"), std::string::npos);
  const json j = json::parse(a.out.substr(a.out.find('{')));
  int singles = 0;
  for (const auto& r : j["roots"])
    if (r["kind"] == "single") {
      EXPECT_EQ(r["multiplicity"], 2);
      ++singles;
    }
  EXPECT_EQ(singles, 2);
  EXPECT_EQ(j["multiplicity_sum"], 10);

  const Outcome b = run("roots 2 2");
  EXPECT_EQ(b.code, 0);
  EXPECT_EQ(b.out.find("single"), std::string::npos);

  EXPECT_EQ(run("roots 1 2").code, 2);
  EXPECT_EQ(run("roots").code, 2);
  EXPECT_EQ(run("frobnicate").code, 2);
}

TEST_F(Cli, VerifyDefaultConfigPasses) {
  const Outcome r = run("verify " + config("sunn.cfg"));
  EXPECT_EQ(r.code, 0) << r.out << r.err;
  const json v = read_json(root_ / "out" / "verify.json");
  EXPECT_TRUE(v["pass"].get<bool>());
  EXPECT_GE(v["checks"].size(), 10u);
}

TEST_F(Cli, VerifyOtherSetupsPass) {
  EXPECT_EQ(run("verify " + config("sun1n.cfg"), "a").code, 0);
  EXPECT_EQ(run("verify " + config("sumn.cfg"), "b").code, 0);
}

TEST_F(Cli, ConfigErrorsExitTwo) {
  std::string text = slurp(kConfigs + "/sunn.cfg");
  const auto bad_kappa = write_config("bad.cfg", text.replace(text.find("orbit.kappa = 2"), 15, "orbit.kappa = -1"));
  const Outcome a = run("verify --config '" + bad_kappa.string() + "'");
  EXPECT_EQ(a.code, 2);
  EXPECT_NE(a.err.find("orbit.kappa"), std::string::npos);

  std::string s1 = slurp(kConfigs + "/sun1n.cfg");
  s1.replace(s1.find("orbit.kappa = 3"), 15, "orbit.kappa = 0.5");
  const auto bad_sun1n = write_config("bad1.cfg", s1);
  const Outcome b = run("verify --config '" + bad_sun1n.string() + "'");
  EXPECT_EQ(b.code, 2);
  EXPECT_NE(b.err.find("kappa - n(x + y) >= 0"), std::string::npos);

  EXPECT_EQ(run("verify --config /nonexistent.cfg").code, 2);
  EXPECT_EQ(run("simulate " + config("quick.cfg") + " --method euler").code, 2);
  EXPECT_EQ(run("lax " + config("quick.cfg") + " --side x").code, 2);
}

TEST_F(Cli, SimulateWritesMonotoneCsvAndManifest) {
  const Outcome r = run("simulate " + config("quick.cfg") + " --method projection");
  ASSERT_EQ(r.code, 0) << r.err;
  std::istringstream csv(slurp(root_ / "out" / "trajectory_projection.csv"));
  std::string line;
  std::getline(csv, line);
  EXPECT_EQ(line, "t,q1,q2,p1,p2,energy");
  double last = -1.0;
  int rows = 0;
  while (std::getline(csv, line)) {
    const double t = std::stod(line.substr(0, line.find(',')));
    EXPECT_GT(t, last);
    last = t;
    ++rows;
  }
  EXPECT_EQ(rows, 501);
  const json m = read_json(root_ / "out" / "manifest.json");
  EXPECT_EQ(m["command"], "simulate");
  EXPECT_TRUE(m["stop_time"].is_null());
  EXPECT_EQ(m["config"]["orbit.case"], "sunn");
}

TEST_F(Cli, SimulateIsDeterministic) {
  ASSERT_EQ(run("simulate " + config("quick.cfg") + " --method direct", "a").code, 0);
  ASSERT_EQ(run("simulate " + config("quick.cfg") + " --method direct", "b").code, 0);
  EXPECT_EQ(slurp(root_ / "a" / "trajectory_direct.csv"), slurp(root_ / "b" / "trajectory_direct.csv"));
  EXPECT_EQ(slurp(root_ / "a" / "manifest.json"), slurp(root_ / "b" / "manifest.json"));
}

TEST_F(Cli, SimulateRegularityBreachExitsThree) {
  const Outcome r = run("simulate " + config("sumn.cfg") + " --method direct");
  EXPECT_EQ(r.code, 3);
  const json m = read_json(root_ / "out" / "manifest.json");
  ASSERT_TRUE(m["stop_time"].is_number());
  EXPECT_GT(m["stop_time"].get<double>(), 0.3);
  EXPECT_LT(m["stop_time"].get<double>(), 0.5);
  EXPECT_FALSE(m["checks"]["regular_window"].get<bool>());
}

TEST_F(Cli, CompareQuickWindowPasses) {
  const Outcome r = run("compare " + config("quick.cfg"));
  EXPECT_EQ(r.code, 0) << r.out << r.err;
  const json c = read_json(root_ / "out" / "compare.json");
  for (const char* k : {"max_dq", "max_dp", "energy_drift_a", "energy_drift_b", "stop_time"}) EXPECT_TRUE(c.contains(k)) << k;
  EXPECT_LE(c["max_dq"].get<double>(), 1e-6);
}

TEST_F(Cli, CompareStandardPointPasses) {
  const Outcome r = run("compare " + config("sunn.cfg"));
  EXPECT_EQ(r.code, 0) << r.out;
}

TEST_F(Cli, ComparePerturbedCouplingFails) {
  const auto cfg = write_config("perturbed.cfg", slurp(kConfigs + "/sunn.cfg") + "control.perturb_g_sq = 0.01\n");
  const Outcome r = run("compare --config '" + cfg.string() + "'");
  EXPECT_EQ(r.code, 1);
  EXPECT_GT(read_json(root_ / "out" / "compare.json")["max_dq"].get<double>(), 1e-3);
}

TEST_F(Cli, LaxReport) {
  const Outcome r = run("lax " + config("quick.cfg") + " --v 0.7 --side r");
  const json j = read_json(root_ / "out" / "lax.json");
  for (const char* k : {"v", "side", "max_drift", "fit_residual"}) EXPECT_TRUE(j.contains(k)) << k;
  EXPECT_EQ(j["side"], "r");
  EXPECT_DOUBLE_EQ(j["v"].get<double>(), 0.7);
  EXPECT_LE(j["max_drift"].get<double>(), 1e-6);
  const bool pass = j["max_drift"].get<double>() <= 1e-6 && j["fit_residual"].get<double>() <= 1e-6;
  EXPECT_EQ(r.code, pass ? 0 : 1) << r.err;
}

TEST_F(Cli, SweepQuickWindow) {
  const Outcome r = run("sweep " + config("quick.cfg") + " --param orbit.y --values 0.3,0,0.1");
  std::istringstream csv(slurp(root_ / "out" / "sweep.csv"));
  std::string line;
  std::getline(csv, line);
  EXPECT_EQ(line, "value,max_dq,max_dp,energy_drift");
  std::vector<double> values;
  bool all_pass = true;
  while (std::getline(csv, line)) {
    std::istringstream row(line);
    std::string v, dq, dp;
    std::getline(row, v, ',');
    std::getline(row, dq, ',');
    std::getline(row, dp, ',');
    values.push_back(std::stod(v));
    all_pass = all_pass && std::stod(dq) <= 1e-6 && std::stod(dp) <= 1e-5;
  }
  EXPECT_EQ(values, (std::vector<double>{0.0, 0.1, 0.3}));
  EXPECT_EQ(r.code, all_pass ? 0 : 1) << r.out << r.err;
}

TEST_F(Cli, SweepSun1nCharacters) {
  const Outcome r = run("sweep " + config("sun1n.cfg") + " --param orbit.y --values 0,0.05,0.1");
  EXPECT_EQ(r.code, 0) << r.out << r.err;
}

TEST_F(Cli, SweepRejectsEmptyList) {
  EXPECT_EQ(run("sweep " + config("quick.cfg") + " --param orbit.y --values ,").code, 2);
  EXPECT_EQ(run("sweep " + config("quick.cfg") + " --param orbit.y").code, 2);
  EXPECT_EQ(run("sweep " + config("quick.cfg") + " --param orbit.kappa --values -1").code, 2);
}

TEST_F(Cli, ManifestHashesMatchFiles) {
  ASSERT_EQ(run("compare " + config("quick.cfg")).code, 0);
  ASSERT_EQ(run("simulate " + config("quick.cfg") + " --method direct").code, 0);
  const fs::path dir = root_ / "out";
  const json m = read_json(dir / "manifest.json");
  std::set<std::string> listed;
  for (const auto& f : m["files"]) {
    const std::string name = f["path"];
    listed.insert(name);
    const std::string data = slurp(dir / name);
    EXPECT_EQ(f["sha256"], sha256_hex(data)) << name;
    EXPECT_EQ(f["bytes"].get<std::size_t>(), data.size());
  }
  for (const auto& e : fs::directory_iterator(dir))
    if (e.path().filename() != "manifest.json") EXPECT_TRUE(listed.count(e.path().filename().string())) << e.path();
  EXPECT_EQ(m["version"], "0.1.0");
  EXPECT_EQ(m["started"], "1970-01-01T00:00:00Z");
}
