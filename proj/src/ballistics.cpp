#include "piglet/ballistics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace piglet::ballistics {

namespace {

Vec3 acceleration(const Vec3& v, double gravity, double drag_coeff) {
  Vec3 a{0.0, -gravity, 0.0};
  if (drag_coeff > 0.0) {
    const double speed = v.norm();
    a += v * (-drag_coeff * speed);
  }
  return a;
}

StateSample interpolate(const StateSample& a, const StateSample& b, double alpha) {
  StateSample s;
  s.t = a.t + alpha * (b.t - a.t);
  s.position = a.position + alpha * (b.position - a.position);
  s.velocity = a.velocity + alpha * (b.velocity - a.velocity);
  return s;
}

}  // namespace

void ThrowParams::validate() const {
  require_finite(p0, "p0");
  require_finite(v0, "v0");
  if (!(gravity > 0.0)) throw std::invalid_argument("gravity must be > 0");
  if (!(drag_coeff >= 0.0)) throw std::invalid_argument("drag_coeff must be >= 0");
  if (!(v0.z < 0.0)) throw std::invalid_argument("v0.z must be < 0 (toward the robot)");
}

StateSample TrueTrajectory::state_at(double t) const {
  if (samples.empty()) throw std::logic_error("empty trajectory");
  if (t <= samples.front().t) return samples.front();
  if (t >= samples.back().t) return samples.back();
  // Uniform grid except for the final interpolated sample.
  std::size_t i = static_cast<std::size_t>(t / dt);
  if (i + 1 >= samples.size()) i = samples.size() - 2;
  while (samples[i + 1].t < t && i + 2 < samples.size()) ++i;
  const StateSample& a = samples[i];
  const StateSample& b = samples[i + 1];
  const double alpha = (t - a.t) / (b.t - a.t);
  return interpolate(a, b, alpha);
}

std::pair<Vec3, Vec3> analytic_state(const ThrowParams& params, double t) {
  params.validate();
  if (params.drag_coeff != 0.0)
    throw std::invalid_argument("analytic_state requires drag_coeff == 0");
  if (t < 0.0) throw std::invalid_argument("t must be >= 0");
  const double g = params.gravity;
  Vec3 position = params.p0 + params.v0 * t;
  position.y -= 0.5 * g * t * t;
  Vec3 velocity = params.v0;
  velocity.y -= g * t;
  return {position, velocity};
}

TrueTrajectory simulate_throw(const ThrowParams& params, double dt, double z_stop) {
  params.validate();
  if (!(dt > 0.0 && dt <= 0.01))
    throw std::invalid_argument("dt must be in (0, 0.01]");
  if (!(z_stop < params.p0.z))
    throw std::invalid_argument("z_stop must be below the launch depth");

  const double g = params.gravity;
  const double k = params.drag_coeff;

  TrueTrajectory traj;
  traj.dt = dt;
  StateSample cur{0.0, params.p0, params.v0};
  traj.samples.push_back(cur);

  constexpr double kMaxTime = 10.0;
  while (cur.t < kMaxTime) {
    // Classic RK4 on (position, velocity).
    const Vec3 p = cur.position, v = cur.velocity;
    const Vec3 k1v = acceleration(v, g, k);
    const Vec3 k1p = v;
    const Vec3 k2v = acceleration(v + k1v * (dt / 2), g, k);
    const Vec3 k2p = v + k1v * (dt / 2);
    const Vec3 k3v = acceleration(v + k2v * (dt / 2), g, k);
    const Vec3 k3p = v + k2v * (dt / 2);
    const Vec3 k4v = acceleration(v + k3v * dt, g, k);
    const Vec3 k4p = v + k3v * dt;

    StateSample next;
    next.t = cur.t + dt;
    next.position = p + (k1p + 2.0 * k2p + 2.0 * k3p + k4p) * (dt / 6.0);
    next.velocity = v + (k1v + 2.0 * k2v + 2.0 * k3v + k4v) * (dt / 6.0);

    const bool hit_plane = next.position.z <= z_stop;
    const bool hit_floor = next.position.y <= 0.0;
    if (hit_plane || hit_floor) {
      double alpha = 1.0;
      if (hit_plane && next.position.z != cur.position.z) {
        alpha = std::min(alpha, (z_stop - cur.position.z) /
                                    (next.position.z - cur.position.z));
      }
      if (hit_floor && next.position.y != cur.position.y) {
        alpha = std::min(alpha, (0.0 - cur.position.y) /
                                    (next.position.y - cur.position.y));
      }
      alpha = std::clamp(alpha, 0.0, 1.0);
      StateSample stop = interpolate(cur, next, alpha);
      if (stop.t > cur.t) traj.samples.push_back(stop);
      return traj;
    }

    traj.samples.push_back(next);
    cur = next;
  }
  throw std::runtime_error("simulate_throw: unreachable stop condition within 10 s");
}

PlaneCrossing plane_crossing(const TrueTrajectory& trajectory, double z_plane) {
  const auto& samples = trajectory.samples;
  for (std::size_t i = 0; i + 1 < samples.size(); ++i) {
    const auto& a = samples[i];
    const auto& b = samples[i + 1];
    if (a.position.z >= z_plane && b.position.z <= z_plane) {
      const double dz = b.position.z - a.position.z;
      const double alpha = dz == 0.0 ? 0.0 : (z_plane - a.position.z) / dz;
      const StateSample s = [&] {
        StateSample out;
        out.t = a.t + alpha * (b.t - a.t);
        out.position = a.position + alpha * (b.position - a.position);
        out.velocity = a.velocity + alpha * (b.velocity - a.velocity);
        return out;
      }();
      return {s.t, s.position};
    }
  }
  if (!samples.empty() && samples.back().position.z <= z_plane) {
    const auto& s = samples.back();
    return {s.t, s.position};
  }
  throw std::runtime_error("plane_crossing: trajectory never crosses z_plane");
}

ThrowParams calibrate_throw(double distance, double target_tof,
                            double apex_height, double launch_height,
                            double z_plane, double gravity) {
  if (!(distance > 0.0)) throw std::invalid_argument("distance must be > 0");
  if (!(target_tof > 0.0)) throw std::invalid_argument("target_tof must be > 0");
  if (apex_height < 0.0) throw std::invalid_argument("infeasible apex (negative)");

  ThrowParams params;
  params.gravity = gravity;
  params.drag_coeff = 0.0;
  params.p0 = {0.0, launch_height, z_plane + distance};
  params.v0.z = -distance / target_tof;
  params.v0.y = std::sqrt(2.0 * gravity * apex_height);
  params.v0.x = 0.0;

  // The object must stay above the floor until the plane crossing; on a
  // drag-free arc the minimum over [0, tof] is at the crossing itself.
  const double y_cross = launch_height + params.v0.y * target_tof -
                         0.5 * gravity * target_tof * target_tof;
  if (y_cross <= 0.0)
    throw std::invalid_argument(
        "infeasible apex: trajectory reaches the floor before the catch plane");
  return params;
}

ThrowParams retune_depth_speed(const ThrowParams& params, double target_tof,
                               double z_plane, double dt, double tol) {
  auto tof_of = [&](double vz) {
    ThrowParams p = params;
    p.v0.z = vz;
    const TrueTrajectory t = simulate_throw(p, dt, z_plane);
    if (t.back().position.z > z_plane + 1e-9)
      return std::numeric_limits<double>::infinity();  // floored short of the plane
    return plane_crossing(t, z_plane).t;
  };

  // |v0.z| up => TOF down. Bracket the target, then bisect.
  double lo = params.v0.z * 2.0;  // fast: TOF below target
  double hi = params.v0.z * 0.5;  // slow: TOF above target (or floored)
  for (int i = 0; i < 8 && tof_of(lo) > target_tof; ++i) lo *= 2.0;
  for (int i = 0; i < 64; ++i) {
    const double mid = 0.5 * (lo + hi);
    const double tof = tof_of(mid);
    if (std::abs(tof - target_tof) <= tol) {
      ThrowParams out = params;
      out.v0.z = mid;
      return out;
    }
    if (tof > target_tof)
      hi = mid;
    else
      lo = mid;
  }
  ThrowParams out = params;
  out.v0.z = 0.5 * (lo + hi);
  return out;
}

}  // namespace piglet::ballistics
