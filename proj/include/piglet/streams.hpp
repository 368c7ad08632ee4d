#pragma once

#include <cstdint>
#include <functional>

#include "piglet/ballistics.hpp"
#include "piglet/sensors.hpp"

namespace piglet::sensors {

// Everything needed to observe one trajectory with both sensors.
struct SensorSetup {
  CameraModel camera;
  RadarModel radar;
  HsvRange hsv;
  int min_residue_pixels = 10;
  double object_radius = 0.15;
  double brightness = 1.0;
  // Ideal mode bypasses rendering and radar clutter entirely and reports the
  // exact object position at each sensor event (zero-noise experiments).
  bool ideal = false;
};

// Per-trajectory sensor event generator on the 1 kHz simulation grid. Sensor
// events snap to the nearest tick; every event index gets its own seed
// substream, so camera and radar noise are identical across pipeline
// variants observing the same throw.
class SensorSimulator {
 public:
  // When `cnn_localizer` is set it replaces the color filter for camera
  // detections (input: rendered frame; output: robot-frame position).
  using LocalizerHook = std::function<Vec3(const Frame&)>;

  SensorSimulator(const ballistics::TrueTrajectory* trajectory,
                  const SensorSetup& setup, std::uint64_t seed,
                  LocalizerHook cnn_localizer = nullptr);

  // A detection when the camera (radar) fires exactly at tick_ms and the
  // object is observable; call with strictly increasing ticks.
  std::optional<Detection> poll_camera(std::int64_t tick_ms);
  std::optional<Detection> poll_radar(std::int64_t tick_ms);

  // Full detection history of the trajectory, merged camera-before-radar on
  // ties. Dataset generation uses this; episode loops poll tick by tick.
  DetectionBuffer run_all();

 private:
  std::int64_t camera_tick(int k) const;
  std::int64_t radar_tick(int k) const;
  bool camera_sees(const Vec3& position) const;

  const ballistics::TrueTrajectory* trajectory_;
  SensorSetup setup_;
  std::uint64_t seed_;
  LocalizerHook cnn_;
  int next_camera_ = 0;
  int next_radar_ = 0;
};

}  // namespace piglet::sensors
