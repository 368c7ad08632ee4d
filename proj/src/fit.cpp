#include "piglet/fit.hpp"

#include <cmath>
#include <utility>

namespace piglet::fit {

namespace {

struct LinearFit {
  double a = 0, b = 0;
};

// Weighted OLS of y = a + b*tau via the closed-form 2x2 normal equations.
LinearFit solve_linear(const std::vector<double>& tau, const std::vector<double>& y,
                       const std::vector<double>& w) {
  double s0 = 0, s1 = 0, s2 = 0, t0 = 0, t1 = 0;
  for (std::size_t i = 0; i < tau.size(); ++i) {
    s0 += w[i];
    s1 += w[i] * tau[i];
    s2 += w[i] * tau[i] * tau[i];
    t0 += w[i] * y[i];
    t1 += w[i] * y[i] * tau[i];
  }
  const double det = s0 * s2 - s1 * s1;
  if (std::abs(det) < 1e-12 * (s0 * s2 + 1e-300))
    throw std::runtime_error("fit_trajectory: rank-deficient design (timestamps coincide)");
  LinearFit f;
  f.a = (s2 * t0 - s1 * t1) / det;
  f.b = (s0 * t1 - s1 * t0) / det;
  return f;
}

// Weighted OLS of y = a + b*tau + c*tau^2 by 3x3 Gaussian elimination.
void solve_quadratic(const std::vector<double>& tau, const std::vector<double>& y,
                     const std::vector<double>& w, double* a, double* b, double* c) {
  double m[3][4] = {};
  for (std::size_t i = 0; i < tau.size(); ++i) {
    const double basis[3] = {1.0, tau[i], tau[i] * tau[i]};
    for (int r = 0; r < 3; ++r) {
      for (int col = 0; col < 3; ++col) m[r][col] += w[i] * basis[r] * basis[col];
      m[r][3] += w[i] * basis[r] * y[i];
    }
  }
  for (int col = 0; col < 3; ++col) {
    int pivot = col;
    for (int r = col + 1; r < 3; ++r)
      if (std::abs(m[r][col]) > std::abs(m[pivot][col])) pivot = r;
    if (std::abs(m[pivot][col]) < 1e-12)
      throw std::runtime_error("fit_trajectory: rank-deficient design for quadratic fit");
    std::swap(m[col], m[pivot]);
    for (int r = 0; r < 3; ++r) {
      if (r == col) continue;
      const double f = m[r][col] / m[col][col];
      for (int k = col; k < 4; ++k) m[r][k] -= f * m[col][k];
    }
  }
  *a = m[0][3] / m[0][0];
  *b = m[1][3] / m[1][1];
  *c = m[2][3] / m[2][2];
}

}  // namespace

TrajectoryEstimate fit_trajectory(const sensors::DetectionBuffer& buffer,
                                  double gravity, FitMode mode,
                                  double camera_weight, double radar_weight) {
  const auto& det = buffer.items;
  if (det.size() < 3)
    throw std::invalid_argument("fit_trajectory: need at least 3 detections");

  TrajectoryEstimate est;
  est.gravity = gravity;
  est.mode = mode;
  est.t0 = det.front().t;
  est.n_points = static_cast<int>(det.size());

  std::vector<double> tau(det.size()), xs(det.size()), ys(det.size()), zs(det.size()),
      w(det.size());
  bool distinct = false;
  for (std::size_t i = 0; i < det.size(); ++i) {
    tau[i] = det[i].t - est.t0;
    xs[i] = det[i].position.x;
    ys[i] = det[i].position.y;
    zs[i] = det[i].position.z;
    w[i] = det[i].source == sensors::Source::Camera ? camera_weight : radar_weight;
    if (tau[i] != tau[0]) distinct = true;
  }
  est.tau_last = tau.back();
  if (!distinct)
    throw std::runtime_error("fit_trajectory: rank-deficient design (timestamps coincide)");

  const LinearFit fx = solve_linear(tau, xs, w);
  est.a_x = fx.a;
  est.b_x = fx.b;
  const LinearFit fz = solve_linear(tau, zs, w);
  est.a_z = fz.a;
  est.b_z = fz.b;

  if (mode == FitMode::PinnedGravity) {
    // Gravity-compensated residual: regress y + (g/2) tau^2 linearly, which
    // pins the quadratic coefficient of the fitted curve to -g/2.
    std::vector<double> y_comp(det.size());
    for (std::size_t i = 0; i < det.size(); ++i)
      y_comp[i] = ys[i] + 0.5 * gravity * tau[i] * tau[i];
    const LinearFit fy = solve_linear(tau, y_comp, w);
    est.a_y = fy.a;
    est.b_y = fy.b;
  } else {
    solve_quadratic(tau, ys, w, &est.a_y, &est.b_y, &est.c_y);
  }
  return est;
}

InterceptionPoint predict_interception(const TrajectoryEstimate& estimate,
                                       double z_plane) {
  if (estimate.b_z >= 0.0) throw NotApproaching();
  const double tau_cross = (z_plane - estimate.a_z) / estimate.b_z;
  if (tau_cross < estimate.tau_last) throw PlanePassed();

  InterceptionPoint point;
  point.x = estimate.x_at(tau_cross);
  point.y = estimate.y_at(tau_cross);
  point.z_plane = z_plane;
  point.t_cross = estimate.t0 + tau_cross;
  point.source = PredictorSource::Ballistic;
  return point;
}

}  // namespace piglet::fit
