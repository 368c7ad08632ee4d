#pragma once

#include <vector>

#include "piglet/ballistics.hpp"
#include "piglet/rng.hpp"

namespace piglet::harness {

// One throw-distance class, calibrated against the measured TOF medians.
// The crossing band parametrizes where on the catch plane aimed throws
// arrive; the sampler converts it into an apex height per throw.
struct ThrowClass {
  double distance = 5.12;
  double target_tof = 0.974;
  double crossing_y_min = 0.35;
  double crossing_y_max = 0.80;
};

struct ThrowConfig {
  std::vector<ThrowClass> classes{{5.12, 0.974, 0.35, 0.80},
                                  {6.70, 1.206, 0.35, 0.80}};
  double launch_height = 1.5;   // assumption: the paper does not state it
  double speed_jitter = 0.10;   // +-10% flight-speed scale; throws stay aimed
  double aim_jitter = 0.30;     // lateral crossing offset, +- meters
  double drag_coeff = 0.03;
  double gravity = 9.81;
  double plane_z = -0.4;
  // Half the control tick: keeps the linear-interpolation error of the
  // trajectory's terminal sample well under 1e-6 m.
  double sim_dt = 5e-4;
  // When > 0, rejection-samples throws whose true crossing lies within this
  // planar distance of `home` (reachable-travel experiments).
  double max_required_travel = 0.0;
  Vec3 home{0.0, 0.4, -0.4};
};

struct SampledThrow {
  ballistics::ThrowParams params;
  ballistics::TrueTrajectory trajectory;
  ballistics::PlaneCrossing crossing;  // ground truth on the catch plane
  double tof = 0.0;
  int class_index = 0;
};

// Deterministic builder: class + flight-speed scale + aimed crossing point.
// Drag is compensated by rescaling the depth speed until the TOF matches.
SampledThrow make_throw(const ThrowConfig& config, int class_index,
                        double speed_scale, double x_target, double y_target);

// Draws class, speed scale and aim from `rng`; resamples throws that hit the
// floor early or (when configured) land beyond the travel budget.
SampledThrow sample_throw(const ThrowConfig& config, Rng& rng);

}  // namespace piglet::harness
