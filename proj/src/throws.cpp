#include "piglet/throws.hpp"

#include <cmath>
#include <stdexcept>

namespace piglet::harness {

SampledThrow make_throw(const ThrowConfig& config, int class_index,
                        double speed_scale, double x_target, double y_target) {
  using namespace piglet::ballistics;
  if (class_index < 0 || class_index >= static_cast<int>(config.classes.size()))
    throw std::invalid_argument("make_throw: bad class index");
  const ThrowClass& cls = config.classes[class_index];

  // A faster throw reaches the plane sooner; the thrower still aims at the
  // same crossing point, so the whole solution is rebuilt for the scaled TOF.
  const double tof_target = cls.target_tof / speed_scale;
  const double g = config.gravity;
  const double v0y = (y_target - config.launch_height + 0.5 * g * tof_target * tof_target) /
                     tof_target;
  if (v0y < 0.0)
    throw std::invalid_argument("make_throw: crossing target above the drag-free arc");
  const double apex_height = v0y * v0y / (2.0 * g);

  ThrowParams params = calibrate_throw(cls.distance, tof_target, apex_height,
                                       config.launch_height, config.plane_z, g);
  params.v0.x = x_target / tof_target;

  if (config.drag_coeff > 0.0) {
    params.drag_coeff = config.drag_coeff;
    params = retune_depth_speed(params, tof_target, config.plane_z, config.sim_dt);
  }

  SampledThrow out;
  out.params = params;
  out.trajectory = simulate_throw(params, config.sim_dt, config.plane_z);
  if (out.trajectory.back().position.z > config.plane_z + 1e-9)
    throw std::runtime_error("make_throw: throw hit the floor before the catch plane");
  out.crossing = plane_crossing(out.trajectory, config.plane_z);
  out.tof = out.crossing.t;
  out.class_index = class_index;
  return out;
}

SampledThrow sample_throw(const ThrowConfig& config, Rng& rng) {
  if (config.classes.empty()) throw std::invalid_argument("sample_throw: no throw classes");
  for (int attempt = 0; attempt < 256; ++attempt) {
    const int cls = static_cast<int>(rng.uniform_int(0, static_cast<int>(config.classes.size()) - 1));
    const double scale = 1.0 + rng.uniform(-config.speed_jitter, config.speed_jitter);
    const double x_target = rng.uniform(-config.aim_jitter, config.aim_jitter);
    const double y_target = rng.uniform(config.classes[cls].crossing_y_min,
                                        config.classes[cls].crossing_y_max);
    SampledThrow candidate;
    try {
      candidate = make_throw(config, cls, scale, x_target, y_target);
    } catch (const std::runtime_error&) {
      continue;  // floored; draw again
    }
    if (config.max_required_travel > 0.0) {
      const double travel = candidate.crossing.point.planar_distance(config.home);
      if (travel > config.max_required_travel) continue;
    }
    return candidate;
  }
  throw std::runtime_error("sample_throw: no feasible throw after 256 attempts");
}

}  // namespace piglet::harness
