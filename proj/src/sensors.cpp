#include "piglet/sensors.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "piglet/rng.hpp"

namespace piglet::sensors {

namespace {

// "Piglet pink" used by the renderer; inside the default HsvRange.
constexpr double kObjectHue = 322.0;
constexpr double kObjectSat = 0.55;
constexpr double kObjectVal = 0.92;

// How strongly the blur trail fades toward the background at its far end.
// Kept below the saturation window so most of the trail stays detectable.
constexpr double kBlurFade = 0.45;

constexpr float kBackgroundDepth = 8.0f;

double clamp01(double x) { return x < 0.0 ? 0.0 : (x > 1.0 ? 1.0 : x); }

double median_of(std::vector<double>& v) {
  const std::size_t mid = (v.size() - 1) / 2;
  std::nth_element(v.begin(), v.begin() + mid, v.end());
  return v[mid];
}

}  // namespace

void DetectionBuffer::push(const Detection& d) {
  if (!items.empty() && d.t < items.back().t)
    throw std::invalid_argument("DetectionBuffer: timestep moved backwards");
  if (d.t < 0.0) throw std::invalid_argument("DetectionBuffer: negative timestamp");
  items.push_back(d);
}

bool HsvRange::contains(double h, double s, double v) const {
  if (s < s_min || s > s_max || v < v_min || v > v_max) return false;
  if (h_min <= h_max) return h >= h_min && h <= h_max;
  return h >= h_min || h <= h_max;  // hue wrap-around
}

bool project(const CameraModel& camera, const Vec3& p, double* u, double* v,
             double* depth) {
  const double d = p.z - camera.position.z;
  if (d <= 1e-6) return false;
  *depth = d;
  *u = camera.cx + camera.fx * (p.x - camera.position.x) / d;
  *v = camera.cy - camera.fy * (p.y - camera.position.y) / d;
  return true;
}

Vec3 back_project(const CameraModel& camera, double u, double v, double depth) {
  Vec3 p;
  p.x = camera.position.x + (u - camera.cx) * depth / camera.fx;
  p.y = camera.position.y - (v - camera.cy) * depth / camera.fy;
  p.z = camera.position.z + depth;
  return p;
}

void rgb_to_hsv(double r, double g, double b, double* h, double* s, double* v) {
  r = clamp01(r);
  g = clamp01(g);
  b = clamp01(b);
  const double maxc = std::max({r, g, b});
  const double minc = std::min({r, g, b});
  const double delta = maxc - minc;
  *v = maxc;
  *s = maxc <= 0.0 ? 0.0 : delta / maxc;
  if (delta <= 0.0) {
    *h = 0.0;
    return;
  }
  double hue;
  if (maxc == r)
    hue = (g - b) / delta;
  else if (maxc == g)
    hue = 2.0 + (b - r) / delta;
  else
    hue = 4.0 + (r - g) / delta;
  hue *= 60.0;
  if (hue < 0.0) hue += 360.0;
  if (hue >= 360.0) hue -= 360.0;
  *h = hue;
}

void hsv_to_rgb(double h, double s, double v, double* r, double* g, double* b) {
  h = std::fmod(h, 360.0);
  if (h < 0.0) h += 360.0;
  s = clamp01(s);
  v = clamp01(v);
  const double c = v * s;
  const double hp = h / 60.0;
  const double x = c * (1.0 - std::abs(std::fmod(hp, 2.0) - 1.0));
  double rr = 0, gg = 0, bb = 0;
  switch (static_cast<int>(hp)) {
    case 0: rr = c; gg = x; break;
    case 1: rr = x; gg = c; break;
    case 2: gg = c; bb = x; break;
    case 3: gg = x; bb = c; break;
    case 4: rr = x; bb = c; break;
    default: rr = c; bb = x; break;
  }
  const double m = v - c;
  *r = rr + m;
  *g = gg + m;
  *b = bb + m;
}

Frame render_frame(const Vec3& object_pos, double object_radius,
                   const CameraModel& camera, std::uint64_t clutter_seed,
                   double brightness, double timestamp) {
  double u, v, depth;
  if (!project(camera, object_pos, &u, &v, &depth))
    throw std::invalid_argument("render_frame: object behind camera");

  const int W = camera.width, H = camera.height;
  Frame frame(W, H, timestamp);

  // Flat grey background at far depth.
  const float bg_r = static_cast<float>(0.34 * brightness);
  const float bg_g = static_cast<float>(0.32 * brightness);
  const float bg_b = static_cast<float>(0.30 * brightness);
  for (int r = 0; r < H; ++r) {
    for (int c = 0; c < W; ++c) {
      frame.at(0, r, c) = bg_r;
      frame.at(1, r, c) = bg_g;
      frame.at(2, r, c) = bg_b;
      frame.at(3, r, c) = kBackgroundDepth;
    }
  }

  // Seeded clutter rectangles with hues well away from the object's.
  Rng rng(clutter_seed);
  const int n_rects = static_cast<int>(rng.uniform_int(3, 9));
  for (int i = 0; i < n_rects; ++i) {
    const int rw = static_cast<int>(rng.uniform_int(W / 16 + 1, W / 4));
    const int rh = static_cast<int>(rng.uniform_int(H / 16 + 1, H / 4));
    const int r0 = static_cast<int>(rng.uniform_int(0, H - 1));
    const int c0 = static_cast<int>(rng.uniform_int(0, W - 1));
    const double hue = rng.uniform(0.0, 250.0);
    const double sat = rng.uniform(0.25, 0.95);
    const double val = rng.uniform(0.25, 0.95);
    const float rd = static_cast<float>(rng.uniform(1.5, 7.5));
    double cr, cg, cb;
    hsv_to_rgb(hue, sat, val, &cr, &cg, &cb);
    for (int r = r0; r < std::min(H, r0 + rh); ++r) {
      for (int c = c0; c < std::min(W, c0 + rw); ++c) {
        frame.at(0, r, c) = static_cast<float>(cr * brightness);
        frame.at(1, r, c) = static_cast<float>(cg * brightness);
        frame.at(2, r, c) = static_cast<float>(cb * brightness);
        frame.at(3, r, c) = rd;
      }
    }
  }

  // Object blob as a filled ellipse. Depth-sensor error enters as one offset
  // per frame, growing with the square of the range.
  double blob_depth = depth;
  if (camera.depth_noise_sigma > 0.0)
    blob_depth += rng.normal(0.0, camera.depth_noise_sigma * depth * depth);

  double obj_r, obj_g, obj_b;
  hsv_to_rgb(kObjectHue, kObjectSat, kObjectVal, &obj_r, &obj_g, &obj_b);
  obj_r *= brightness;
  obj_g *= brightness;
  obj_b *= brightness;

  const double rx = camera.fx * object_radius / depth;
  const double ry = camera.fy * object_radius / depth;
  const int rlo = std::max(0, static_cast<int>(std::floor(v - ry - 1)));
  const int rhi = std::min(H - 1, static_cast<int>(std::ceil(v + ry + 1)));
  const int clo = std::max(0, static_cast<int>(std::floor(u - rx - 1)));
  const int chi = std::min(W - 1, static_cast<int>(std::ceil(u + rx + 1)));

  std::vector<int> top_row(W, -1);  // topmost blob row per column, for the trail
  for (int r = rlo; r <= rhi; ++r) {
    for (int c = clo; c <= chi; ++c) {
      const double du = (c + 0.5 - u) / rx;
      const double dv = (r + 0.5 - v) / ry;
      if (du * du + dv * dv > 1.0) continue;
      frame.at(0, r, c) = static_cast<float>(obj_r);
      frame.at(1, r, c) = static_cast<float>(obj_g);
      frame.at(2, r, c) = static_cast<float>(obj_b);
      frame.at(3, r, c) = static_cast<float>(blob_depth);
      if (top_row[c] < 0 || r < top_row[c]) top_row[c] = r;
    }
  }

  // Vertical motion-blur trail above the blob, fading toward whatever the
  // background held at each pixel. Trail pixels keep the object's depth.
  if (camera.blur_len > 0) {
    for (int c = 0; c < W; ++c) {
      if (top_row[c] < 0) continue;
      for (int i = 1; i <= camera.blur_len; ++i) {
        const int r = top_row[c] - i;
        if (r < 0) break;
        const double alpha = kBlurFade * i / (camera.blur_len + 1.0);
        frame.at(0, r, c) = static_cast<float>((1 - alpha) * obj_r + alpha * frame.at(0, r, c));
        frame.at(1, r, c) = static_cast<float>((1 - alpha) * obj_g + alpha * frame.at(1, r, c));
        frame.at(2, r, c) = static_cast<float>((1 - alpha) * obj_b + alpha * frame.at(2, r, c));
        frame.at(3, r, c) = static_cast<float>(blob_depth);
      }
    }
  }

  return frame;
}

std::optional<Detection> color_filter_localize(const Frame& frame,
                                               const HsvRange& range,
                                               const CameraModel& camera,
                                               int min_pixels) {
  std::vector<double> rows, cols, depths;
  for (int r = 0; r < frame.height; ++r) {
    for (int c = 0; c < frame.width; ++c) {
      double h, s, v;
      rgb_to_hsv(frame.at(0, r, c), frame.at(1, r, c), frame.at(2, r, c), &h, &s, &v);
      if (!range.contains(h, s, v)) continue;
      rows.push_back(r);
      cols.push_back(c);
      depths.push_back(frame.at(3, r, c));
    }
  }
  if (static_cast<int>(rows.size()) < min_pixels) return std::nullopt;

  const double r_med = median_of(rows);
  const double c_med = median_of(cols);
  const double d_med = median_of(depths);

  Detection det;
  det.position = back_project(camera, c_med + 0.5, r_med + 0.5, d_med);
  det.t = frame.timestamp;
  det.source = Source::Camera;
  return det;
}

std::vector<RadarReturn> radar_scan(const Vec3& object_pos, const Vec3& object_vel,
                                    std::uint64_t clutter_seed, double noise_sigma,
                                    const RadarModel& model) {
  Rng rng(clutter_seed);
  std::vector<RadarReturn> returns;

  const int n_static = static_cast<int>(rng.uniform_int(2, 5));
  for (int i = 0; i < n_static; ++i) {
    RadarReturn r;
    r.position = {rng.uniform(-3.0, 3.0), rng.uniform(0.0, 2.5), rng.uniform(1.0, 7.0)};
    r.radial_velocity = 0.0;
    returns.push_back(r);
  }

  RadarReturn obj;
  obj.position = object_pos;
  if (noise_sigma > 0.0) {
    obj.position.x += rng.normal(0.0, noise_sigma);
    obj.position.y += rng.normal(0.0, noise_sigma);
    obj.position.z += rng.normal(0.0, noise_sigma);
  }
  Vec3 los = object_pos - model.position;
  const double range = los.norm();
  obj.radial_velocity = range > 1e-9 ? object_vel.dot(los * (1.0 / range)) : 0.0;
  returns.push_back(obj);

  const int n_receding = static_cast<int>(rng.uniform_int(0, 2));
  for (int i = 0; i < n_receding; ++i) {
    RadarReturn r;
    r.position = {rng.uniform(-3.0, 3.0), rng.uniform(0.0, 2.5), rng.uniform(1.0, 7.0)};
    r.radial_velocity = rng.uniform(0.5, 4.0);
    returns.push_back(r);
  }
  return returns;
}

std::optional<Detection> radar_filter(const std::vector<RadarReturn>& returns,
                                      double t, double v_static) {
  const RadarReturn* best = nullptr;
  for (const auto& r : returns) {
    if (std::abs(r.radial_velocity) < v_static) continue;  // static background
    if (r.radial_velocity > 0.0) continue;                 // moving away
    if (!best || r.radial_velocity < best->radial_velocity) best = &r;
  }
  if (!best) return std::nullopt;
  Detection det;
  det.position = best->position;
  det.t = t;
  det.source = Source::Radar;
  return det;
}

DetectionBuffer merge_streams(const std::vector<Detection>& camera,
                              const std::vector<Detection>& radar) {
  auto check_ordered = [](const std::vector<Detection>& v, const char* name) {
    for (std::size_t i = 1; i < v.size(); ++i)
      if (v[i].t < v[i - 1].t)
        throw std::invalid_argument(std::string("merge_streams: unordered ") + name + " input");
  };
  check_ordered(camera, "camera");
  check_ordered(radar, "radar");

  DetectionBuffer out;
  out.items.reserve(camera.size() + radar.size());
  std::size_t i = 0, j = 0;
  while (i < camera.size() || j < radar.size()) {
    const bool take_camera =
        j >= radar.size() || (i < camera.size() && camera[i].t <= radar[j].t);
    out.items.push_back(take_camera ? camera[i++] : radar[j++]);
  }
  return out;
}

}  // namespace piglet::sensors
