#include "losguide/config.hpp"

#include <gtest/gtest.h>

#include <string>

using namespace losguide;

namespace {

std::string error_of(const std::string& text) {
  try {
    parse_run_config(text);
  } catch (const std::runtime_error& e) {
    return e.what();
  }
  return {};
}

}  // namespace

TEST(Config, EmptyDocumentIsAllDefaults) {
  const RunConfig c = parse_run_config("{}");
  EXPECT_EQ(dump_run_config(c), dump_run_config(RunConfig{}));
}

TEST(Config, DumpParseDumpIsAFixedPoint) {
  RunConfig c;
  c.experiment.method = GuidanceMethod::PnHeading;
  c.experiment.target_speed = 0.0;
  c.experiment.sim.path.start = Vec3(1, 2, 3);
  c.experiment.sim.guidance.N = 4.5;
  c.experiment.sim.edge_mode = EdgeMode::ExtremePixel;
  c.experiment.sim.closing_velocity = ClosingVelocityEstimate::UavProjection;
  c.matrix.paths = {PathKind::Knot};
  c.mission.task = 2;
  c.mission.balloons.push_back({Vec3(20, 3, 4.5), 0.3, 0.5});
  c.mission.faults.gimbal.yaw = 0.5;
  c.parallel = 3;
  const std::string once = dump_run_config(c);
  const RunConfig back = parse_run_config(once);
  EXPECT_EQ(dump_run_config(back), once);
  EXPECT_EQ(back.experiment.method, GuidanceMethod::PnHeading);
  EXPECT_EQ(back.experiment.sim.closing_velocity, ClosingVelocityEstimate::UavProjection);
  ASSERT_TRUE(back.experiment.sim.path.start);
  EXPECT_EQ(*back.experiment.sim.path.start, Vec3(1, 2, 3));
  EXPECT_EQ(back.mission.balloons.size(), 1u);
  EXPECT_EQ(back.parallel, 3);
}

TEST(Config, DoublesSurviveExactly) {
  RunConfig c;
  c.experiment.sim.guidance.k_heading = 0.1 + 0.2;  // not representable in short decimal
  const RunConfig back = parse_run_config(dump_run_config(c));
  EXPECT_EQ(back.experiment.sim.guidance.k_heading, 0.1 + 0.2);
}

TEST(Config, PartialOverrideKeepsTheRest) {
  const RunConfig c = parse_run_config(R"({"experiment": {"uav_speed": 4, "method": "hybrid"},
                                           "sim": {"guidance": {"N": 5}}})");
  EXPECT_EQ(c.experiment.uav_speed, 4.0);
  EXPECT_EQ(c.experiment.method, GuidanceMethod::Hybrid);
  EXPECT_EQ(c.experiment.sim.guidance.N, 5.0);
  EXPECT_EQ(c.experiment.sim.guidance.kp_yaw, GuidanceParams{}.kp_yaw);
  EXPECT_EQ(c.experiment.trials, 50);
}

TEST(Config, CommentsAllowed) {
  const RunConfig c = parse_run_config("{ // hand edited\n \"parallel\": 2 }");
  EXPECT_EQ(c.parallel, 2);
}

TEST(Config, UnknownKeyNamesItsPath) {
  const std::string e = error_of(R"({"sim": {"guidance": {"Nx": 3}}})");
  EXPECT_NE(e.find("sim.guidance"), std::string::npos) << e;
  EXPECT_NE(e.find("Nx"), std::string::npos) << e;
  EXPECT_FALSE(error_of(R"({"bogus": 1})").empty());
}

TEST(Config, BadValuesAreRejected) {
  EXPECT_FALSE(error_of(R"({"experiment": {"method": "pn"}})").empty());
  EXPECT_FALSE(error_of(R"({"sim": {"closing_velocity": "truth"}})").empty());
  EXPECT_FALSE(error_of(R"({"experiment": {"uav_speed": "fast"}})").empty());
  EXPECT_FALSE(error_of(R"({"sim": {"path": {"start": [1, 2]}}})").empty());
  EXPECT_FALSE(error_of("[1, 2]").empty());
  EXPECT_FALSE(error_of("{").empty());
}

TEST(Config, MissionScenarioStandalone) {
  MissionScenario sc;
  sc.task = 2;
  sc.target.kind = PathKind::Figure8;
  sc.target.speed = 8.0;
  sc.target.tilt_angle = 0.0;
  sc.faults.camera_latency = 0.1;
  const std::string text = dump_mission_scenario(sc);
  const MissionScenario back = parse_mission_scenario(text);
  EXPECT_EQ(back.task, 2);
  EXPECT_EQ(back.target.kind, PathKind::Figure8);
  EXPECT_EQ(back.faults.camera_latency, 0.1);
  EXPECT_EQ(dump_mission_scenario(back), text);
}
