#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "piglet/geometry.hpp"

namespace piglet::sensors {

enum class Source : int { Camera = 0, Radar = 1 };

// Timestamped position estimate in the robot frame; the fused input to all
// interception predictors.
struct Detection {
  Vec3 position;
  double t = 0.0;
  Source source = Source::Camera;
};

// Time-ordered detections from both sensors.
struct DetectionBuffer {
  std::vector<Detection> items;

  void push(const Detection& d);
  bool empty() const { return items.empty(); }
  std::size_t size() const { return items.size(); }
  const Detection& front() const { return items.front(); }
  const Detection& back() const { return items.back(); }
};

// RGBD frame, plane-major storage: R, G, B in [0,1], then depth in meters.
struct Frame {
  int width = 0;
  int height = 0;
  double timestamp = 0.0;
  std::vector<float> data;

  Frame() = default;
  Frame(int w, int h, double ts) : width(w), height(h), timestamp(ts), data(4u * w * h) {}

  float& at(int c, int r, int col) { return data[(static_cast<std::size_t>(c) * height + r) * width + col]; }
  float at(int c, int r, int col) const { return data[(static_cast<std::size_t>(c) * height + r) * width + col]; }
};

// Pinhole camera, axes aligned with the robot frame, looking along +z.
struct CameraModel {
  int width = 80;
  int height = 60;
  double fx = 75.0;
  double fy = 75.0;
  double cx = 40.0;
  double cy = 30.0;
  double rate_hz = 30.0;
  Vec3 position{0.0, 1.0, 0.0};
  double depth_noise_sigma = 0.0;  // meters at 1 m, grows with depth^2
  int blur_len = 0;                // vertical motion-blur trail length, pixels
  double min_depth = 0.7;          // objects closer than this are not imaged
};

// Inclusive HSV window; hue wraps when h_min > h_max.
struct HsvRange {
  double h_min = 295.0;
  double h_max = 350.0;
  double s_min = 0.30;
  double s_max = 1.0;
  double v_min = 0.25;
  double v_max = 1.0;

  bool contains(double h, double s, double v) const;
};

struct RadarReturn {
  Vec3 position;              // robot frame, meters
  double radial_velocity = 0; // m/s, negative = approaching the sensor
};

struct RadarModel {
  double rate_hz = 10.0;
  Vec3 position{0.1, 0.9, -0.1};
  double noise_sigma = 0.03;  // per-axis position noise, meters
  double v_static = 0.2;      // moving-target threshold, m/s
  double min_range = 0.3;
};

// Projects a robot-frame point; returns false when at or behind the camera
// plane. u grows rightward, v grows downward.
bool project(const CameraModel& camera, const Vec3& p, double* u, double* v, double* depth);

// Inverse of project for a pixel-plane point at the given depth.
Vec3 back_project(const CameraModel& camera, double u, double v, double depth);

// Hexcone conversion; inputs clamped to [0,1]. Grey maps to h=0, s=0.
void rgb_to_hsv(double r, double g, double b, double* h, double* s, double* v);
void hsv_to_rgb(double h, double s, double v, double* r, double* g, double* b);

// Synthetic RGBD capture: the object as a filled pink ellipse with its true
// depth, seeded out-of-range clutter rectangles, optional brightness scaling
// and a vertical motion-blur trail. The frame timestamp marks the end of the
// exposure, so the trail extends upward in the image (the object falls).
Frame render_frame(const Vec3& object_pos, double object_radius,
                   const CameraModel& camera, std::uint64_t clutter_seed,
                   double brightness = 1.0, double timestamp = 0.0);

// Baseline localizer: HSV in-range residue collapsed to per-axis medians and
// back-projected. Returns nothing when fewer than min_pixels pixels survive.
std::optional<Detection> color_filter_localize(const Frame& frame,
                                               const HsvRange& range,
                                               const CameraModel& camera,
                                               int min_pixels = 10);

// One radar sweep: the object with Gaussian position noise and exact radial
// velocity, plus seeded static clutter and up to two receding distractors.
std::vector<RadarReturn> radar_scan(const Vec3& object_pos, const Vec3& object_vel,
                                    std::uint64_t clutter_seed, double noise_sigma,
                                    const RadarModel& model);

// Moving-target filter: drops returns slower than v_static and everything
// receding, then keeps the fastest approaching target.
std::optional<Detection> radar_filter(const std::vector<RadarReturn>& returns,
                                      double t, double v_static = 0.2);

// Stable merge by timestamp; equal stamps keep camera before radar.
DetectionBuffer merge_streams(const std::vector<Detection>& camera,
                              const std::vector<Detection>& radar);

}  // namespace piglet::sensors
