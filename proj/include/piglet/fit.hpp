#pragma once

#include <stdexcept>

#include "piglet/sensors.hpp"

namespace piglet::fit {

enum class FitMode : int {
  PinnedGravity = 0,  // y quadratic term fixed to -g/2, linear terms regressed
  FreeQuadratic = 1,  // full degree-2 least squares on y, for comparison
};

enum class PredictorSource : int { Ballistic = 0, Network = 1 };

// Per-axis polynomial fit over a detection buffer, in time relative to the
// first detection: x(tau) = a_x + b_x*tau, z likewise, and
// y(tau) = a_y + b_y*tau - (g/2)*tau^2 (plus a free quadratic term c_y when
// FitMode::FreeQuadratic is selected).
struct TrajectoryEstimate {
  double a_x = 0, b_x = 0;
  double a_z = 0, b_z = 0;
  double a_y = 0, b_y = 0;
  double c_y = 0;       // free quadratic coefficient, FreeQuadratic mode only
  double t0 = 0;        // absolute time of the first detection
  double tau_last = 0;  // last observed tau, for plane-passed detection
  int n_points = 0;
  double gravity = 9.81;
  FitMode mode = FitMode::PinnedGravity;

  double x_at(double tau) const { return a_x + b_x * tau; }
  double z_at(double tau) const { return a_z + b_z * tau; }
  double y_at(double tau) const {
    const double quad = mode == FitMode::FreeQuadratic ? c_y : -0.5 * gravity;
    return a_y + b_y * tau + quad * tau * tau;
  }
};

// Interception estimate on the fixed catch plane.
struct InterceptionPoint {
  double x = 0;
  double y = 0;
  double z_plane = 0;
  double t_cross = 0;  // absolute simulated time
  PredictorSource source = PredictorSource::Ballistic;
};

struct NotApproaching : std::runtime_error {
  NotApproaching() : std::runtime_error("predict_interception: object not approaching (b_z >= 0)") {}
};

struct PlanePassed : std::runtime_error {
  PlanePassed() : std::runtime_error("predict_interception: plane already passed") {}
};

// Ordinary least squares per axis with the vertical quadratic pinned to
// -g/2 (gravity-compensated residual regression). Camera and radar samples
// can be weighted differently; both default to 1.
TrajectoryEstimate fit_trajectory(const sensors::DetectionBuffer& buffer,
                                  double gravity,
                                  FitMode mode = FitMode::PinnedGravity,
                                  double camera_weight = 1.0,
                                  double radar_weight = 1.0);

// Solves the depth polynomial for z_plane and evaluates x and y there.
// Throws NotApproaching when b_z >= 0 and PlanePassed when the crossing
// precedes the last observation.
InterceptionPoint predict_interception(const TrajectoryEstimate& estimate,
                                       double z_plane);

}  // namespace piglet::fit
