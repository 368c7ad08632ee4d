#include "piglet/controller.hpp"

#include <cmath>
#include <stdexcept>

namespace piglet::control {

namespace {

double clamp(double v, double lo, double hi) { return v < lo ? lo : (v > hi ? hi : v); }

double axis_command(double error, double v_now, const ControllerParams& p) {
  double desired = 0.0;
  if (std::abs(error) > p.deadband) {
    // Saturate at v_max and at the braking envelope sqrt(2*a*d); without the
    // latter the approach overshoots and oscillates around the goal.
    const double braking =
        std::sqrt(2.0 * p.a_max * std::max(std::abs(error) - p.deadband * 0.5, 0.0));
    const double limit = std::min(p.v_max, braking);
    desired = clamp(p.k * error, -limit, limit);
  }
  const double dv = clamp(desired - v_now, -p.a_max * p.dt, p.a_max * p.dt);
  return v_now + dv;
}

}  // namespace

Vec3 control_step(const RobotState& state, const Vec3& goal,
                  const ControllerParams& params) {
  return {axis_command(goal.x - state.position.x, state.velocity.x, params),
          axis_command(goal.y - state.position.y, state.velocity.y, params),
          axis_command(goal.z - state.position.z, state.velocity.z, params)};
}

GoalUpdate update_goal(const fit::InterceptionPoint& point,
                       const ControllerParams& params) {
  const Vec3 requested{point.x, point.y, point.z_plane};
  GoalUpdate update;
  update.goal = params.workspace.clamp(requested);
  update.clamped = !params.workspace.contains(requested);
  return update;
}

void apply_command(RobotState* state, const Vec3& command,
                   const ControllerParams& params) {
  state->velocity = command;
  Vec3 next = state->position + command * params.dt;
  const Vec3 clamped = params.workspace.clamp(next);
  if (clamped.x != next.x) state->velocity.x = 0.0;
  if (clamped.y != next.y) state->velocity.y = 0.0;
  if (clamped.z != next.z) state->velocity.z = 0.0;
  state->position = clamped;
}

CatchOutcome evaluate_catch(const std::vector<TraceSample>& trace,
                            const ballistics::TrueTrajectory& trajectory,
                            double z_plane, double basket_radius) {
  const auto crossing = ballistics::plane_crossing(trajectory, z_plane);
  if (trace.empty()) throw std::invalid_argument("evaluate_catch: empty robot trace");

  // End-effector state at the crossing time, linearly interpolated.
  Vec3 ee = trace.back().position;
  if (crossing.t <= trace.front().t) {
    ee = trace.front().position;
  } else if (crossing.t < trace.back().t) {
    std::size_t i = 0;
    while (i + 1 < trace.size() && trace[i + 1].t < crossing.t) ++i;
    const auto& a = trace[i];
    const auto& b = trace[i + 1];
    const double alpha = (crossing.t - a.t) / (b.t - a.t);
    ee = a.position + alpha * (b.position - a.position);
  }

  CatchOutcome outcome;
  outcome.t_cross = crossing.t;
  outcome.ee_at_cross = ee;
  outcome.miss_distance = ee.planar_distance(crossing.point);
  outcome.success = outcome.miss_distance <= basket_radius;
  return outcome;
}

}  // namespace piglet::control
