#include "losguide/vehicle.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <vector>

using namespace losguide;

namespace {

constexpr double kDynDt = 0.005;
constexpr int kCtrlEvery = 4;  // 50 Hz controllers over 200 Hz dynamics

struct Loop {
  VehicleParams vp;
  ControllerGains gains;
  PoseController pose{gains};
  VelocityController vel{gains, vp};
  UavState s;
  AttitudeCommand cmd;
  long tick = 0;

  void hold_position(const Vec3& target) {
    if (tick % kCtrlEvery == 0) {
      Waypoint w;
      w.position = target;
      const Vec3 v_ref = pose.step(w, Vec3::Zero(), s, kDynDt * kCtrlEvery);
      cmd = vel.step(v_ref, Vec3::Zero(), 0.0, s, kDynDt * kCtrlEvery);
    }
    s = dynamics_step(s, cmd, vp, kDynDt);
    ++tick;
  }

  void track_velocity(const Vec3& v_ref) {
    if (tick % kCtrlEvery == 0) cmd = vel.step(v_ref, Vec3::Zero(), 0.0, s, kDynDt * kCtrlEvery);
    s = dynamics_step(s, cmd, vp, kDynDt);
    ++tick;
  }
};

AttitudeCommand hover(const VehicleParams& p) {
  AttitudeCommand c;
  c.thrust = p.hover_thrust();
  return c;
}

}  // namespace

TEST(Pid, PureProportional) {
  Pid pid({1.0, 0.0, 0.0, 0.0});
  EXPECT_DOUBLE_EQ(pid.step(1.0, 0.02), 1.0);
}

TEST(Pid, MatchesScalarRecurrence) {
  const PidGains g{0.8, 0.3, 0.05, 0.0};
  Pid pid(g);
  const double dt = 0.02;
  double integral = 0.0, prev = 0.0;
  for (int k = 0; k < 200; ++k) {
    const double e = k < 5 ? 0.0 : std::exp(-0.01 * k) + (k % 7 == 0 ? 0.3 : 0.0);
    integral += e * dt;
    const double expected = g.kp * e + g.ki * integral + (k == 0 ? 0.0 : g.kd * (e - prev) / dt);
    prev = e;
    EXPECT_NEAR(pid.step(e, dt), expected, 1e-12) << "k=" << k;
  }
}

TEST(Pid, IntegralContributionIsClamped) {
  Pid pid({0.0, 1.0, 0.0, 0.5});
  double out = 0.0;
  for (int k = 0; k < 100; ++k) out = pid.step(1.0, 0.1);
  EXPECT_DOUBLE_EQ(out, 0.5);
  // No windup: the output leaves the limit as soon as the error flips.
  EXPECT_LT(pid.step(-1.0, 0.1), 0.5);
}

TEST(PoseController, EquilibriumAndPureP) {
  ControllerGains g;
  for (auto& a : g.position) a = {1.0, 0.0, 0.0, 0.0};
  PoseController pc(g);
  UavState s;
  Waypoint w;
  EXPECT_EQ(pc.step(w, Vec3::Zero(), s, 0.02).norm(), 0.0);
  w.position = Vec3(1, 0, 0);
  EXPECT_TRUE(pc.step(w, Vec3::Zero(), s, 0.02).isApprox(Vec3(1, 0, 0)));
  EXPECT_TRUE(pc.step(w, Vec3(0, 2, 0), s, 0.02).isApprox(Vec3(1, 2, 0)));
}

TEST(PoseController, PdStepFollowsRecurrence) {
  ControllerGains g;
  g.position = {{{1.5, 0.0, 0.2, 0.0}, {0.7, 0.1, 0.0, 1.0}, {2.0, 0.0, 0.0, 0.0}}};
  PoseController pc(g);
  std::array<Pid, 3> oracle{Pid(g.position[0]), Pid(g.position[1]), Pid(g.position[2])};
  UavState s;
  Waypoint w;
  w.position = Vec3(1, -2, 0.5);
  for (int k = 0; k < 50; ++k) {
    s.pose.position += Vec3(0.01, -0.02, 0.005);
    const Vec3 out = pc.step(w, Vec3::Zero(), s, 0.02);
    const Vec3 e = w.position - s.pose.position;
    for (int i = 0; i < 3; ++i) EXPECT_NEAR(out[i], oracle[static_cast<std::size_t>(i)].step(e[i], 0.02), 1e-12);
  }
}

TEST(VelocityController, HoverIsLevelAtHoverThrust) {
  VehicleParams vp;
  VelocityController vc({}, vp);
  const auto c = vc.step(Vec3::Zero(), Vec3::Zero(), 0.3, UavState{}, 0.02);
  EXPECT_EQ(c.roll, 0.0);
  EXPECT_EQ(c.pitch, 0.0);
  EXPECT_NEAR(c.thrust, vp.hover_thrust(), 1e-12);
  EXPECT_EQ(c.yaw_rate, 0.3);
}

TEST(AccelToAttitude, ForwardDemandPitchesOnly) {
  const auto c = accel_to_attitude(Vec3(2, 0, 0), 0.0, 0.0, VehicleParams{});
  EXPECT_GT(c.pitch, 0.0);
  EXPECT_NEAR(c.roll, 0.0, 1e-15);
  // Under yaw the same body demand rotates with the frame.
  const auto r = accel_to_attitude(Vec3(0, 2, 0), kPi / 2, 0.0, VehicleParams{});
  EXPECT_NEAR(r.pitch, c.pitch, 1e-12);
  EXPECT_NEAR(r.roll, 0.0, 1e-12);
}

TEST(AccelToAttitude, RealisesDemandExactlyWhenUnclamped) {
  const VehicleParams vp;
  const Vec3 a(1.5, -2.0, 0.7);
  const auto c = accel_to_attitude(a, 0.4, 0.0, vp);
  const Attitude att{c.roll, c.pitch, 0.4};
  const Vec3 got = thrust_accel_world(att, c.thrust, vp) - Vec3(0, 0, kGravity);
  EXPECT_LT((got - a).norm(), 1e-9);
}

TEST(AccelToAttitude, TiltClampKeepsVerticalBalance) {
  const VehicleParams vp;
  for (double ax : {15.0, 30.0, 80.0}) {
    for (double az : {-2.0, 0.0, 3.0}) {
      const Vec3 a(ax, 0.3 * ax, az);
      const auto c = accel_to_attitude(a, 0.0, 0.0, vp);
      const double tilt = std::acos(std::cos(c.roll) * std::cos(c.pitch));
      EXPECT_LE(tilt, vp.tilt_limit + 1e-9);
      const Attitude att{c.roll, c.pitch, 0.0};
      const double got_z = thrust_accel_world(att, c.thrust, vp).z() - kGravity;
      // Analytic clamped-tilt model: vertical specific force is kept, only the
      // horizontal part shrinks.
      EXPECT_LT(std::abs(got_z - az), 0.05 * kGravity) << ax << " " << az;
    }
  }
}

TEST(Dynamics, HoverDriftBelowOneMillimetre) {
  const VehicleParams vp;
  UavState s;
  s.pose.position = Vec3(3, -1, 10);
  const auto c = hover(vp);
  for (int k = 0; k < 2000; ++k) s = dynamics_step(s, c, vp, kDynDt);
  EXPECT_LT((s.pose.position - Vec3(3, -1, 10)).norm(), 1e-3);
  EXPECT_NEAR(s.clock, 10.0, 1e-9);
}

TEST(Dynamics, RollStepIsFirstOrder) {
  const VehicleParams vp;
  const double target = deg2rad(10.0);
  AttitudeCommand c = hover(vp);
  c.roll = target;
  UavState s;
  const int per_tau = static_cast<int>(std::llround(vp.tau_att / kDynDt));
  for (int m = 1; m <= 3; ++m) {
    for (int k = 0; k < per_tau; ++k) s = dynamics_step(s, c, vp, kDynDt);
    const double expected = target * (1.0 - std::exp(-static_cast<double>(m)));
    EXPECT_NEAR(s.pose.attitude.roll / expected, 1.0, 0.02) << m << " tau";
  }
}

TEST(Dynamics, ZeroThrustFreeFall) {
  VehicleParams vp;
  vp.drag = 0.0;
  UavState s;
  const AttitudeCommand c{};
  for (int k = 0; k < 200; ++k) s = dynamics_step(s, c, vp, kDynDt);
  EXPECT_NEAR(s.pose.velocity.z(), -kGravity * 1.0, 1e-9);
  // Semi-implicit Euler overshoots the continuous -g t^2/2 by g t dt / 2.
  EXPECT_NEAR(s.pose.position.z(), -0.5 * kGravity - 0.5 * kGravity * kDynDt, 1e-9);
}

TEST(Dynamics, VerticalVelocityConservedAtHoverWithoutDrag) {
  VehicleParams vp;
  vp.drag = 0.0;
  UavState s;
  s.pose.velocity = Vec3(0, 0, 1.3);
  for (int k = 0; k < 400; ++k) {
    s = dynamics_step(s, hover(vp), vp, kDynDt);
    ASSERT_NEAR(s.pose.velocity.z(), 1.3, 1e-12);
  }
}

TEST(Dynamics, TiltAndYawRateLimits) {
  const VehicleParams vp;
  AttitudeCommand c = hover(vp);
  c.roll = 2.0;
  c.yaw_rate = 50.0;
  UavState s;
  for (int k = 0; k < 400; ++k) s = dynamics_step(s, c, vp, kDynDt);
  EXPECT_LE(s.pose.attitude.roll, vp.tilt_limit + 1e-12);
  EXPECT_NEAR(s.angular_rates.z(), vp.max_yaw_rate, 1e-12);
}

TEST(Dynamics, RejectsLargeStep) {
  EXPECT_THROW(dynamics_step(UavState{}, AttitudeCommand{}, VehicleParams{}, 0.05), std::invalid_argument);
  EXPECT_THROW(dynamics_step(UavState{}, AttitudeCommand{}, VehicleParams{}, 0.0), std::invalid_argument);
}

TEST(Dynamics, Deterministic) {
  const VehicleParams vp;
  UavState a, b;
  for (int k = 0; k < 500; ++k) {
    AttitudeCommand c = hover(vp);
    c.roll = 0.2 * std::sin(0.05 * k);
    c.pitch = 0.1 * std::cos(0.03 * k);
    c.yaw_rate = 0.5;
    a = dynamics_step(a, c, vp, kDynDt);
    b = dynamics_step(b, c, vp, kDynDt);
  }
  EXPECT_EQ(a.pose.position, b.pose.position);
  EXPECT_EQ(a.pose.velocity, b.pose.velocity);
}

TEST(PointMass, RealisesAccelerationExactly) {
  UavState s;
  for (int k = 0; k < 100; ++k) s = point_mass_step(s, Vec3(1, 0, 0), 0.1, 0.01);
  EXPECT_NEAR(s.pose.velocity.x(), 1.0, 1e-12);
  EXPECT_EQ(s.pose.attitude.roll, 0.0);
  EXPECT_NEAR(s.pose.attitude.yaw, 0.1, 1e-12);
}

TEST(ClosedLoop, HoverConvergesWithinThreeSeconds) {
  Loop loop;
  loop.s.pose.position = Vec3(0.5, -0.5, 9.5);
  const Vec3 target(0, 0, 10);
  for (int k = 0; k < 600; ++k) loop.hold_position(target);
  EXPECT_LT((loop.s.pose.position - target).norm(), 0.05);
}

TEST(ClosedLoop, VelocityStepResponse) {
  Loop loop;
  loop.s.pose.position = Vec3(0, 0, 10);
  double settled_at = -1.0, peak = 0.0;
  for (int k = 0; k < 1200; ++k) {
    loop.track_velocity(Vec3(2, 0, 0));
    const double vx = loop.s.pose.velocity.x();
    peak = std::max(peak, vx);
    if (settled_at < 0 && std::abs(vx - 2.0) <= 0.2) settled_at = loop.s.clock;
  }
  ASSERT_GT(settled_at, 0.0);
  EXPECT_LT(settled_at, 2.0);
  EXPECT_LT(peak, 2.0 * 1.2);
  EXPECT_NEAR(loop.s.pose.velocity.x(), 2.0, 0.05);
  EXPECT_NEAR(loop.s.pose.position.z(), 10.0, 0.1);
}

TEST(VehicleParams, Validation) {
  EXPECT_NO_THROW(VehicleParams{}.validate());
  EXPECT_NO_THROW(VehicleParams::ideal().validate());
  VehicleParams p;
  p.max_thrust_accel = kGravity;
  EXPECT_THROW(p.validate(), std::invalid_argument);
  ControllerGains g;
  EXPECT_NO_THROW(g.validate());
  g.velocity[1].kp = 0.0;
  EXPECT_THROW(g.validate(), std::invalid_argument);
}
