#pragma once

#include <vector>

#include "piglet/ballistics.hpp"
#include "piglet/fit.hpp"
#include "piglet/geometry.hpp"

namespace piglet::control {

struct ControllerParams {
  double k = 8.0;          // proportional gain, 1/s
  double v_max = 0.9;      // per-axis velocity limit, m/s
  double a_max = 3.0;      // per-axis acceleration limit, m/s^2
  double deadband = 0.002; // meters; inside it the velocity setpoint is zero
  double dt = 1e-3;        // controller tick, 1 kHz
  Vec3 home{0.0, 0.4, -0.4};
  Box workspace{{-0.8, 0.05, -0.6}, {0.8, 1.15, 0.1}};
};

struct RobotState {
  Vec3 position;
  Vec3 velocity;
};

struct TraceSample {
  double t = 0.0;
  Vec3 position;
  Vec3 velocity;
};

struct GoalUpdate {
  Vec3 goal;
  bool clamped = false;  // true when the requested point left the workspace
};

struct CatchOutcome {
  bool success = false;
  double miss_distance = 0.0;  // planar (x,y) distance at the crossing
  double t_cross = 0.0;
  Vec3 ee_at_cross;
};

// Proportional velocity command with saturation: per axis the setpoint is
// clamp(k * error, +-v_max), additionally capped by the braking envelope
// sqrt(2*a_max*distance) so the approach settles without overshoot, and
// zeroed inside the deadband. The returned command never moves more than
// a_max*dt away from the current velocity.
Vec3 control_step(const RobotState& state, const Vec3& goal,
                  const ControllerParams& params);

// Places the predicted interception on the catch plane and clamps it into
// the workspace. Successive updates overwrite each other; the newest wins.
GoalUpdate update_goal(const fit::InterceptionPoint& point,
                       const ControllerParams& params);

// Applies a command for one tick: position integrates the commanded
// velocity and is kept inside the workspace (velocity zeroes on a clamped
// axis, the hardware stop).
void apply_command(RobotState* state, const Vec3& command,
                   const ControllerParams& params);

// Planar miss distance between the end-effector (linearly interpolated to
// the crossing time) and the object's true crossing point. Success is
// inclusive at exactly basket_radius.
CatchOutcome evaluate_catch(const std::vector<TraceSample>& trace,
                            const ballistics::TrueTrajectory& trajectory,
                            double z_plane, double basket_radius);

}  // namespace piglet::control
