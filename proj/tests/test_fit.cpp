#include <cmath>

#include "doctest.h"
#include "piglet/ballistics.hpp"
#include "piglet/fit.hpp"
#include "piglet/rng.hpp"

using namespace piglet;
using namespace piglet::fit;
using piglet::sensors::Detection;
using piglet::sensors::DetectionBuffer;
using piglet::sensors::Source;

namespace {

constexpr double kG = 9.81;

// Exact ballistic samples x=1+2t, z=5-5t, y=1.5+3t-(g/2)t^2.
DetectionBuffer exact_buffer(int n, double dt_step = 0.04, double t_start = 0.0) {
  DetectionBuffer buffer;
  for (int i = 0; i < n; ++i) {
    const double t = t_start + i * dt_step;
    Detection d;
    d.t = t;
    d.position = {1.0 + 2.0 * t, 1.5 + 3.0 * t - 0.5 * kG * t * t, 5.0 - 5.0 * t};
    d.source = i % 3 == 0 ? Source::Radar : Source::Camera;
    buffer.push(d);
  }
  return buffer;
}

double sse_of(const DetectionBuffer& buffer, double a, double b, double gravity) {
  // Sum of squared residuals of the gravity-compensated y regression.
  double sse = 0;
  const double t0 = buffer.front().t;
  for (const auto& d : buffer.items) {
    const double tau = d.t - t0;
    const double y_comp = d.position.y + 0.5 * gravity * tau * tau;
    const double r = y_comp - (a + b * tau);
    sse += r * r;
  }
  return sse;
}

}  // namespace

TEST_CASE("noise-free detections are recovered exactly") {
  const auto buffer = exact_buffer(12);
  const auto est = fit_trajectory(buffer, kG);
  CHECK(est.a_x == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(est.b_x == doctest::Approx(2.0).epsilon(1e-9));
  CHECK(est.a_z == doctest::Approx(5.0).epsilon(1e-9));
  CHECK(est.b_z == doctest::Approx(-5.0).epsilon(1e-9));
  CHECK(est.a_y == doctest::Approx(1.5).epsilon(1e-9));
  CHECK(est.b_y == doctest::Approx(3.0).epsilon(1e-9));
  CHECK(est.n_points == 12);
}

TEST_CASE("observation shift moves only the intercept") {
  auto buffer = exact_buffer(9);
  const auto base = fit_trajectory(buffer, kG);
  for (auto& d : buffer.items) d.position.x += 0.3;
  const auto shifted = fit_trajectory(buffer, kG);
  CHECK(shifted.a_x - base.a_x == doctest::Approx(0.3).epsilon(1e-12));
  CHECK(shifted.b_x == doctest::Approx(base.b_x).epsilon(1e-12));
  CHECK(shifted.a_y == doctest::Approx(base.a_y).epsilon(1e-12));
  CHECK(shifted.a_z == doctest::Approx(base.a_z).epsilon(1e-12));
}

TEST_CASE("degenerate designs are rejected") {
  DetectionBuffer two;
  two.push({{1, 1, 5}, 0.1, Source::Camera});
  two.push({{1, 1, 5}, 0.2, Source::Camera});
  CHECK_THROWS_AS(fit_trajectory(two, kG), std::invalid_argument);

  DetectionBuffer same_t;
  same_t.push({{1.0, 1, 5.0}, 0.1, Source::Camera});
  same_t.push({{1.1, 1, 4.9}, 0.1, Source::Radar});
  same_t.push({{1.2, 1, 4.8}, 0.1, Source::Camera});
  CHECK_THROWS_AS(fit_trajectory(same_t, kG), std::runtime_error);
}

TEST_CASE("linear depth solve hits the catch plane") {
  const auto buffer = exact_buffer(10);
  const auto est = fit_trajectory(buffer, kG);
  const auto point = predict_interception(est, -0.4);
  // tau* = (-0.4 - 5)/(-5) = 1.08; plus t0 = 0.
  CHECK(point.t_cross == doctest::Approx(1.08).epsilon(1e-9));
  CHECK(point.x == doctest::Approx(1.0 + 2.0 * 1.08).epsilon(1e-9));
  CHECK(point.source == PredictorSource::Ballistic);
  CHECK(point.z_plane == doctest::Approx(-0.4));
}

TEST_CASE("prediction matches the true crossing for any noise-free prefix") {
  using namespace piglet::ballistics;
  auto params = calibrate_throw(5.12, 0.974, 0.74);
  params.v0.x = 0.25;
  const auto traj = simulate_throw(params, 5e-4, -0.4);
  const auto truth = plane_crossing(traj, -0.4);

  DetectionBuffer buffer;
  int count = 0;
  for (double t = 0.0; t < 0.6; t += 0.033) {
    const auto s = traj.state_at(t);
    buffer.push({s.position, t, count % 4 == 0 ? Source::Radar : Source::Camera});
    ++count;
    if (buffer.size() < 3) continue;
    const auto est = fit_trajectory(buffer, params.gravity);
    const auto point = predict_interception(est, -0.4);
    CHECK(std::abs(point.x - truth.point.x) < 1e-6);
    CHECK(std::abs(point.y - truth.point.y) < 1e-6);
    CHECK(std::abs(point.t_cross - truth.t) < 1e-6);
  }
}

TEST_CASE("translation equivariance of the predicted interception") {
  Rng rng(31);
  for (int trial = 0; trial < 30; ++trial) {
    auto buffer = exact_buffer(8, rng.uniform(0.02, 0.08));
    // Perturb with noise so the fit is not exact.
    for (auto& d : buffer.items) {
      d.position.x += rng.normal(0, 0.02);
      d.position.y += rng.normal(0, 0.02);
    }
    const double dx = rng.uniform(-0.5, 0.5);
    const double dy = rng.uniform(-0.5, 0.5);
    const auto p0 = predict_interception(fit_trajectory(buffer, kG), -0.4);
    for (auto& d : buffer.items) {
      d.position.x += dx;
      d.position.y += dy;
    }
    const auto p1 = predict_interception(fit_trajectory(buffer, kG), -0.4);
    CHECK(p1.x - p0.x == doctest::Approx(dx).epsilon(1e-9));
    CHECK(p1.y - p0.y == doctest::Approx(dy).epsilon(1e-9));
    CHECK(p1.t_cross == doctest::Approx(p0.t_cross).epsilon(1e-12));
  }
}

TEST_CASE("fitted residuals are orthogonal to the design") {
  Rng rng(47);
  auto buffer = exact_buffer(14);
  for (auto& d : buffer.items) d.position.y += rng.normal(0, 0.05);
  const auto est = fit_trajectory(buffer, kG);

  double dot_one = 0, dot_tau = 0;
  for (const auto& d : buffer.items) {
    const double tau = d.t - est.t0;
    const double y_comp = d.position.y + 0.5 * kG * tau * tau;
    const double r = y_comp - (est.a_y + est.b_y * tau);
    dot_one += r;
    dot_tau += r * tau;
  }
  CHECK(std::abs(dot_one) < 1e-9);
  CHECK(std::abs(dot_tau) < 1e-9);

  // Brute-force oracle: the normal-equation solution must minimize the SSE
  // over a coefficient grid around it.
  const double best = sse_of(buffer, est.a_y, est.b_y, kG);
  for (int ia = -4; ia <= 4; ++ia) {
    for (int ib = -4; ib <= 4; ++ib) {
      if (ia == 0 && ib == 0) continue;
      const double sse = sse_of(buffer, est.a_y + ia * 0.003, est.b_y + ib * 0.003, kG);
      CHECK(sse >= best);
    }
  }
}

TEST_CASE("drag makes the early-flight fit cross too early") {
  using namespace piglet::ballistics;
  auto params = calibrate_throw(5.12, 0.974, 0.74);
  params.drag_coeff = 0.03;
  const auto tuned = retune_depth_speed(params, 0.974, -0.4);
  const auto traj = simulate_throw(tuned, 1e-3, -0.4);
  const auto truth = plane_crossing(traj, -0.4);

  DetectionBuffer buffer;
  for (double t = 0.0; t <= 0.4; t += 0.05)
    buffer.push({traj.state_at(t).position, t, Source::Camera});
  const auto point = predict_interception(fit_trajectory(buffer, tuned.gravity), -0.4);
  CHECK(point.t_cross < truth.t);
}

TEST_CASE("not-approaching and plane-passed are signalled") {
  DetectionBuffer receding;
  for (int i = 0; i < 4; ++i)
    receding.push({{0, 1, 5.0 + 0.3 * i}, 0.1 * i, Source::Camera});
  CHECK_THROWS_AS(predict_interception(fit_trajectory(receding, kG), -0.4),
                  NotApproaching);

  // Observations continue past the plane: crossing is behind the data.
  DetectionBuffer passed;
  for (int i = 0; i < 8; ++i)
    passed.push({{0, 1, 0.5 - 0.3 * i}, 0.1 * i, Source::Camera});
  CHECK_THROWS_AS(predict_interception(fit_trajectory(passed, kG), -0.4), PlanePassed);
}

TEST_CASE("free quadratic mode recovers a non-ballistic curvature") {
  DetectionBuffer buffer;
  for (int i = 0; i < 10; ++i) {
    const double t = 0.05 * i;
    buffer.push({{0.0, 2.0 + 1.0 * t - 3.0 * t * t, 5.0 - 5.0 * t}, t, Source::Camera});
  }
  const auto est = fit_trajectory(buffer, kG, FitMode::FreeQuadratic);
  CHECK(est.a_y == doctest::Approx(2.0).epsilon(1e-9));
  CHECK(est.b_y == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(est.c_y == doctest::Approx(-3.0).epsilon(1e-9));
}

TEST_CASE("sensor weights tilt the fit toward the heavier stream") {
  DetectionBuffer buffer;
  // Camera says y=1.0 flat (with gravity compensated), radar says y=2.0 flat.
  for (int i = 0; i < 6; ++i) {
    const double t = 0.1 * i;
    const double comp = -0.5 * kG * t * t;
    buffer.push({{0, 1.0 + comp, 5 - t}, t, Source::Camera});
    buffer.push({{0, 2.0 + comp, 5 - t}, t, Source::Radar});
  }
  const auto even = fit_trajectory(buffer, kG, FitMode::PinnedGravity, 1.0, 1.0);
  CHECK(even.a_y == doctest::Approx(1.5).epsilon(1e-9));
  const auto tilted = fit_trajectory(buffer, kG, FitMode::PinnedGravity, 3.0, 1.0);
  CHECK(tilted.a_y == doctest::Approx(1.25).epsilon(1e-9));
}
