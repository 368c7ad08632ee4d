#include "piglet/streams.hpp"

#include <cmath>

#include "piglet/rng.hpp"

namespace piglet::sensors {

namespace {
// Seed-substream tags for the two sensors.
constexpr std::uint64_t kCameraTag = 0x11;
constexpr std::uint64_t kRadarTag = 0x22;
}  // namespace

SensorSimulator::SensorSimulator(const ballistics::TrueTrajectory* trajectory,
                                 const SensorSetup& setup, std::uint64_t seed,
                                 LocalizerHook cnn_localizer)
    : trajectory_(trajectory), setup_(setup), seed_(seed), cnn_(std::move(cnn_localizer)) {}

std::int64_t SensorSimulator::camera_tick(int k) const {
  return static_cast<std::int64_t>(std::llround(k * 1000.0 / setup_.camera.rate_hz));
}

std::int64_t SensorSimulator::radar_tick(int k) const {
  return static_cast<std::int64_t>(std::llround(k * 1000.0 / setup_.radar.rate_hz));
}

bool SensorSimulator::camera_sees(const Vec3& position) const {
  double u, v, depth;
  if (!project(setup_.camera, position, &u, &v, &depth)) return false;
  if (depth < setup_.camera.min_depth) return false;
  return u >= 1.0 && u <= setup_.camera.width - 1.0 && v >= 1.0 &&
         v <= setup_.camera.height - 1.0;
}

std::optional<Detection> SensorSimulator::poll_camera(std::int64_t tick_ms) {
  while (camera_tick(next_camera_) < tick_ms) ++next_camera_;
  if (camera_tick(next_camera_) != tick_ms) return std::nullopt;
  const int k = next_camera_++;

  const double t = tick_ms * 1e-3;
  if (t > trajectory_->back().t) return std::nullopt;
  const auto state = trajectory_->state_at(t);
  if (!camera_sees(state.position)) return std::nullopt;

  if (setup_.ideal) return Detection{state.position, t, Source::Camera};

  const Frame frame = render_frame(state.position, setup_.object_radius, setup_.camera,
                                   substream_seed(seed_ ^ kCameraTag, k),
                                   setup_.brightness, t);
  if (cnn_) return Detection{cnn_(frame), t, Source::Camera};
  return color_filter_localize(frame, setup_.hsv, setup_.camera,
                               setup_.min_residue_pixels);
}

std::optional<Detection> SensorSimulator::poll_radar(std::int64_t tick_ms) {
  while (radar_tick(next_radar_) < tick_ms) ++next_radar_;
  if (radar_tick(next_radar_) != tick_ms) return std::nullopt;
  const int k = next_radar_++;

  const double t = tick_ms * 1e-3;
  if (t > trajectory_->back().t) return std::nullopt;
  const auto state = trajectory_->state_at(t);
  if ((state.position - setup_.radar.position).norm() < setup_.radar.min_range)
    return std::nullopt;

  if (setup_.ideal) return Detection{state.position, t, Source::Radar};

  const auto returns = radar_scan(state.position, state.velocity,
                                  substream_seed(seed_ ^ kRadarTag, k),
                                  setup_.radar.noise_sigma, setup_.radar);
  return radar_filter(returns, t, setup_.radar.v_static);
}

DetectionBuffer SensorSimulator::run_all() {
  std::vector<Detection> camera, radar;
  const std::int64_t last_tick =
      static_cast<std::int64_t>(std::floor(trajectory_->back().t * 1000.0));
  for (std::int64_t tick = 0; tick <= last_tick; ++tick) {
    if (auto d = poll_camera(tick)) camera.push_back(*d);
    if (auto d = poll_radar(tick)) radar.push_back(*d);
  }
  return merge_streams(camera, radar);
}

}  // namespace piglet::sensors
