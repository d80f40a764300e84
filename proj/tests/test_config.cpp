#include <gtest/gtest.h>

#include "rlab/config.hpp"

using namespace rlab;

namespace {

const std::string kBase =
    "# standard point\n"
    "group.m = 2\n"
    "group.n = 2\n"
    "orbit.case = sunn\n"
    "orbit.kappa = 2\n"
    "orbit.x = 0.7\n"
    "orbit.y = 0.3\n"
    "init.q = 1.0, 0.4   # trailing comment\n"
    "init.p = 0.3, -0.2\n";

std::string error_of(const std::string& text, const std::map<std::string, std::string>& ov = {}) {
  try {
    parse_config(text, ov);
  } catch (const ConfigError& e) {
    return e.what();
  }
  return {};
}

}  // namespace

TEST(Config, ParsesWithDefaults) {
  const RunConfig c = parse_config(kBase);
  EXPECT_EQ(c.m, 2);
  EXPECT_EQ(c.n, 2);
  EXPECT_EQ(c.orbit_case, OrbitCase::SuNN);
  EXPECT_DOUBLE_EQ(c.kappa, 2.0);
  EXPECT_DOUBLE_EQ(c.x, 0.7);
  EXPECT_EQ(c.q0.size(), 2);
  EXPECT_DOUBLE_EQ(c.p0(1), -0.2);
  EXPECT_DOUBLE_EQ(c.dt, 1e-3);
  EXPECT_DOUBLE_EQ(c.t_max, 5.0);
  EXPECT_DOUBLE_EQ(c.regularity, 1e-4);
  EXPECT_EQ(c.output_dir, "out");
  const CaseSetup s = make_setup(c);
  EXPECT_NEAR(s.cc.g1_sq, 0.42, 1e-15);
}

TEST(Config, OverridesReplaceKeys) {
  const RunConfig c = parse_config(kBase, {{"integrator.dt", "5e-4"}, {"orbit.kappa", "3"}});
  EXPECT_DOUBLE_EQ(c.dt, 5e-4);
  EXPECT_DOUBLE_EQ(c.kappa, 3.0);
}

TEST(Config, EchoRoundTrips) {
  const RunConfig c = parse_config(kBase + "seed = 9\noutput.dir = somewhere\n");
  std::string text;
  for (const auto& [k, v] : c.entries()) text += k + " = " + v + "\n";
  const RunConfig d = parse_config(text);
  EXPECT_EQ(d.entries(), c.entries());
  EXPECT_EQ(d.seed, 9u);
}

TEST(Config, StructuralErrors) {
  EXPECT_NE(error_of(kBase + "junk line\n").find("expected 'key = value'"), std::string::npos);
  EXPECT_NE(error_of(kBase + "group.m = 3\n").find("given more than once"), std::string::npos);
  EXPECT_NE(error_of(kBase + "integrator.order = 4\n").find("integrator.order: unknown key"), std::string::npos);
  EXPECT_NE(error_of("group.m = 2\n").find("group.n: required key is missing"), std::string::npos);
  EXPECT_NE(error_of(kBase, {{"group.m", "two"}}).find("group.m: expected an integer"), std::string::npos);
  EXPECT_NE(error_of(kBase, {{"orbit.kappa", "2x"}}).find("orbit.kappa: trailing characters"), std::string::npos);
  EXPECT_NE(error_of(kBase, {{"init.q", "1.0"}}).find("init.q: expected n entries"), std::string::npos);
}

TEST(Config, DomainErrors) {
  EXPECT_NE(error_of(kBase, {{"orbit.kappa", "-1"}}).find("orbit.kappa: must be positive"), std::string::npos);
  EXPECT_NE(error_of(kBase, {{"group.m", "1"}}).find("m >= n"), std::string::npos);
  EXPECT_NE(error_of(kBase, {{"group.m", "3"}}).find("requires group.m = group.n"), std::string::npos);
  EXPECT_NE(error_of(kBase, {{"orbit.case", "sunm"}}).find("orbit.case"), std::string::npos);
  EXPECT_NE(error_of(kBase, {{"init.q", "0.4, 1.0"}}).find("init.q"), std::string::npos);
  EXPECT_NE(error_of(kBase, {{"integrator.dt", "0"}}).find("integrator.dt"), std::string::npos);
  EXPECT_NE(error_of(kBase, {{"seed", "-3"}}).find("seed"), std::string::npos);
}

TEST(Config, Sun1nConsistencyMessages) {
  const std::map<std::string, std::string> base{{"group.m", "3"}, {"orbit.case", "sun1n"}};
  auto with = [&](std::map<std::string, std::string> extra) {
    extra.insert(base.begin(), base.end());
    return error_of(kBase, extra);
  };
  EXPECT_EQ(with({{"orbit.kappa", "3"}, {"orbit.x", "0.2"}, {"orbit.y", "0.1"}}), "");
  EXPECT_NE(with({{"orbit.kappa", "1"}, {"orbit.x", "-1"}, {"orbit.y", "-1"}}).find("kappa + x + y >= 0"),
            std::string::npos);
  EXPECT_NE(with({{"orbit.kappa", "1"}, {"orbit.x", "0.4"}, {"orbit.y", "0.2"}}).find("kappa - n(x + y) >= 0"),
            std::string::npos);
}

TEST(Config, SumnForcesOppositeCharacter) {
  const std::string text =
      "group.m = 4\ngroup.n = 2\norbit.case = sumn\norbit.kappa = 2\norbit.y = 0.1\n"
      "init.q = 1.0, 0.4\ninit.p = 0.3, -0.2\n";
  const RunConfig c = parse_config(text);
  EXPECT_DOUBLE_EQ(c.x, -0.1);
  EXPECT_NE(error_of(text + "orbit.x = 0.2\n").find("x = -y"), std::string::npos);
  EXPECT_EQ(error_of(text + "orbit.x = -0.1\n"), "");
  EXPECT_NEAR(make_setup(c).cc.energy_shift, -0.03, 1e-15);
}

TEST(Config, MissingFile) {
  EXPECT_THROW(load_config("/nonexistent/run.cfg"), ConfigError);
}
