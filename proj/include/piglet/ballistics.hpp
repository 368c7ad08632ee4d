#pragma once

#include <utility>
#include <vector>

#include "piglet/geometry.hpp"

namespace piglet::ballistics {

// Ground-truth physics of one throw. Gravity acts along -y; drag is
// quadratic (-drag_coeff * |v| * v) and disabled at drag_coeff == 0.
struct ThrowParams {
  Vec3 p0;
  Vec3 v0;
  double gravity = 9.81;     // m/s^2
  double drag_coeff = 0.0;   // 1/m

  void validate() const;
};

struct StateSample {
  double t = 0.0;
  Vec3 position;
  Vec3 velocity;
};

// Fixed-step samples starting at t = 0. The last sample is interpolated to
// the exact stop condition and generally does not lie on the dt grid.
struct TrueTrajectory {
  std::vector<StateSample> samples;
  double dt = 0.0;

  const StateSample& front() const { return samples.front(); }
  const StateSample& back() const { return samples.back(); }

  // State at time t by linear interpolation between bracketing samples;
  // clamps to the endpoints outside the sampled range.
  StateSample state_at(double t) const;
};

struct PlaneCrossing {
  double t = 0.0;
  Vec3 point;
};

// Drag-free closed form. Rejects drag_coeff != 0.
std::pair<Vec3, Vec3> analytic_state(const ThrowParams& params, double t);

// Integrates the throw with fixed-step RK4 until the depth plane z_stop or
// the floor (y = 0) is reached; the exact stop state is appended by linear
// interpolation. Throws if the trajectory cannot reach z_stop within 10 s.
TrueTrajectory simulate_throw(const ThrowParams& params, double dt, double z_stop);

// First crossing of z_plane, linearly interpolated between the bracketing
// samples. Exact when the depth motion is piecewise linear.
PlaneCrossing plane_crossing(const TrueTrajectory& trajectory, double z_plane);

// Drag-free throw whose depth travel equals `distance` and whose catch-plane
// time of flight equals `target_tof`: v0.z = -distance/target_tof, v0.y from
// the requested apex elevation above the launch height. Callers that enable
// drag rescale v0.z by bisection until the simulated TOF matches again.
ThrowParams calibrate_throw(double distance, double target_tof,
                            double apex_height, double launch_height = 1.5,
                            double z_plane = -0.4, double gravity = 9.81);

// Rescales params.v0.z so that the simulated trajectory (drag included)
// crosses z_plane at target_tof within tol seconds.
ThrowParams retune_depth_speed(const ThrowParams& params, double target_tof,
                               double z_plane, double dt = 1e-3,
                               double tol = 1e-6);

}  // namespace piglet::ballistics
