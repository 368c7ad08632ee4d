#include <cmath>
#include <set>

#include "doctest.h"
#include "piglet/rng.hpp"
#include "piglet/sensors.hpp"

using namespace piglet;
using namespace piglet::sensors;

namespace {

CameraModel test_camera() {
  CameraModel cam;
  cam.position = {0.0, 1.0, 0.0};
  return cam;
}

HsvRange pink_range() { return HsvRange{}; }

// Bounding rows of the in-range mask.
std::pair<int, int> mask_row_extent(const Frame& f, const HsvRange& range) {
  int lo = f.height, hi = -1;
  for (int r = 0; r < f.height; ++r)
    for (int c = 0; c < f.width; ++c) {
      double h, s, v;
      rgb_to_hsv(f.at(0, r, c), f.at(1, r, c), f.at(2, r, c), &h, &s, &v);
      if (range.contains(h, s, v)) {
        lo = std::min(lo, r);
        hi = std::max(hi, r);
      }
    }
  return {lo, hi};
}

}  // namespace

TEST_CASE("rgb_to_hsv hexcone corners") {
  double h, s, v;
  rgb_to_hsv(1, 0, 0, &h, &s, &v);
  CHECK(h == doctest::Approx(0.0));
  CHECK(s == doctest::Approx(1.0));
  CHECK(v == doctest::Approx(1.0));

  rgb_to_hsv(0.5, 0.5, 0.5, &h, &s, &v);
  CHECK(h == doctest::Approx(0.0));
  CHECK(s == doctest::Approx(0.0));
  CHECK(v == doctest::Approx(0.5));

  rgb_to_hsv(1, 0, 1, &h, &s, &v);
  CHECK(h == doctest::Approx(300.0));
  CHECK(s == doctest::Approx(1.0));
  CHECK(v == doctest::Approx(1.0));
}

TEST_CASE("hsv round trip on random colors") {
  Rng rng(11);
  for (int i = 0; i < 200; ++i) {
    const double r = rng.uniform(), g = rng.uniform(), b = rng.uniform();
    double h, s, v, r2, g2, b2;
    rgb_to_hsv(r, g, b, &h, &s, &v);
    CHECK(h >= 0.0);
    CHECK(h < 360.0);
    hsv_to_rgb(h, s, v, &r2, &g2, &b2);
    CHECK(r2 == doctest::Approx(r).epsilon(1e-9));
    CHECK(g2 == doctest::Approx(g).epsilon(1e-9));
    CHECK(b2 == doctest::Approx(b).epsilon(1e-9));
  }
}

TEST_CASE("hue wrap-around range") {
  HsvRange range;
  range.h_min = 330;
  range.h_max = 20;
  CHECK(range.contains(350, 0.5, 0.5));
  CHECK(range.contains(10, 0.5, 0.5));
  CHECK_FALSE(range.contains(180, 0.5, 0.5));
}

TEST_CASE("render places an on-axis blob at the principal point") {
  const auto cam = test_camera();
  const Vec3 pos{cam.position.x, cam.position.y, 4.0};
  const auto frame = render_frame(pos, 0.15, cam, /*clutter_seed=*/0);

  const int r = static_cast<int>(cam.cy);
  const int c = static_cast<int>(cam.cx);
  double h, s, v;
  rgb_to_hsv(frame.at(0, r, c), frame.at(1, r, c), frame.at(2, r, c), &h, &s, &v);
  CHECK(pink_range().contains(h, s, v));
  CHECK(frame.at(3, r, c) == doctest::Approx(4.0));
}

TEST_CASE("clutter seeds change pixels only outside the blob mask") {
  const auto cam = test_camera();
  const Vec3 pos{0.3, 1.2, 3.5};
  const auto a = render_frame(pos, 0.15, cam, 101);
  const auto b = render_frame(pos, 0.15, cam, 202);
  const auto range = pink_range();

  bool any_diff = false;
  for (int r = 0; r < a.height; ++r) {
    for (int c = 0; c < a.width; ++c) {
      double h, s, v;
      rgb_to_hsv(a.at(0, r, c), a.at(1, r, c), a.at(2, r, c), &h, &s, &v);
      const bool in_blob = range.contains(h, s, v);
      for (int ch = 0; ch < 4; ++ch) {
        if (a.at(ch, r, c) != b.at(ch, r, c)) {
          any_diff = true;
          CHECK_FALSE(in_blob);
        }
      }
    }
  }
  CHECK(any_diff);
}

TEST_CASE("motion blur grows the vertical mask extent") {
  auto cam = test_camera();
  const Vec3 pos{0.0, 1.0, 3.0};
  cam.blur_len = 0;
  const auto sharp = render_frame(pos, 0.15, cam, 7);
  cam.blur_len = 20;
  const auto blurred = render_frame(pos, 0.15, cam, 7);

  const auto [lo0, hi0] = mask_row_extent(sharp, pink_range());
  const auto [lo1, hi1] = mask_row_extent(blurred, pink_range());
  CHECK((hi1 - lo1) - (hi0 - lo0) >= 15);
  CHECK(hi1 == hi0);  // trail extends upward only
}

TEST_CASE("render then localize recovers the position") {
  const auto cam = test_camera();
  Rng rng(5);
  for (int i = 0; i < 25; ++i) {
    const double depth = rng.uniform(1.5, 5.0);
    const Vec3 pos{cam.position.x + rng.uniform(-0.25, 0.25) * depth,
                   cam.position.y + rng.uniform(-0.2, 0.2) * depth, depth};
    const auto frame = render_frame(pos, 0.15, cam, 1000 + i);
    const auto det = color_filter_localize(frame, pink_range(), cam);
    REQUIRE(det.has_value());
    // One pixel back-projects to depth/fx meters; allow one pixel plus a
    // depth quantum of slack per axis.
    const double pixel = depth / cam.fx;
    CHECK(std::abs(det->position.x - pos.x) <= pixel + 1e-6);
    CHECK(std::abs(det->position.y - pos.y) <= pixel + 1e-6);
    CHECK(std::abs(det->position.z - pos.z) <= 1e-6);
  }
}

TEST_CASE("localize returns none when nothing is in range") {
  const auto cam = test_camera();
  Frame frame(cam.width, cam.height, 0.5);  // all zeros: black, out of range
  CHECK_FALSE(color_filter_localize(frame, pink_range(), cam).has_value());
}

TEST_CASE("median localization ignores out-of-range clutter") {
  const auto cam = test_camera();
  const Vec3 pos{0.2, 1.1, 3.0};
  auto clean = render_frame(pos, 0.15, cam, 1);
  auto cluttered = clean;
  // Paint ~40% of the frame with an out-of-range green, away from the blob.
  const int rows = static_cast<int>(cam.height * 0.4);
  for (int r = cam.height - rows; r < cam.height; ++r)
    for (int c = 0; c < cam.width; ++c) {
      cluttered.at(0, r, c) = 0.1f;
      cluttered.at(1, r, c) = 0.8f;
      cluttered.at(2, r, c) = 0.2f;
      cluttered.at(3, r, c) = 2.0f;
    }
  const auto a = color_filter_localize(clean, pink_range(), cam);
  const auto b = color_filter_localize(cluttered, pink_range(), cam);
  REQUIRE(a.has_value());
  REQUIRE(b.has_value());
  CHECK(a->position.x == b->position.x);
  CHECK(a->position.y == b->position.y);
  CHECK(a->position.z == b->position.z);
}

TEST_CASE("radar_scan emits the exact object return when noiseless") {
  RadarModel model;
  const Vec3 pos{0.5, 1.2, 4.0};
  const Vec3 vel{0.0, -1.0, -5.0};
  const auto returns = radar_scan(pos, vel, 42, 0.0, model);

  const RadarReturn* obj = nullptr;
  for (const auto& r : returns)
    if (r.radial_velocity < -0.5) obj = &r;
  REQUIRE(obj != nullptr);
  CHECK(obj->position.x == pos.x);
  CHECK(obj->position.y == pos.y);
  CHECK(obj->position.z == pos.z);
}

TEST_CASE("radar_scan is deterministic per seed") {
  RadarModel model;
  const Vec3 pos{0.5, 1.2, 4.0};
  const Vec3 vel{0.0, -1.0, -5.0};
  const auto a = radar_scan(pos, vel, 9, 0.03, model);
  const auto b = radar_scan(pos, vel, 9, 0.03, model);
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].position.x == b[i].position.x);
    CHECK(a[i].radial_velocity == b[i].radial_velocity);
  }
}

TEST_CASE("approaching objects have negative radial velocity") {
  RadarModel model;
  const Vec3 pos{0.0, 1.0, 5.0};
  const Vec3 vel = (model.position - pos) * 0.8;  // aimed at the sensor
  const auto returns = radar_scan(pos, vel, 3, 0.0, model);
  bool found = false;
  for (const auto& r : returns)
    if (r.position.z == pos.z && r.position.y == pos.y) {
      CHECK(r.radial_velocity < 0.0);
      found = true;
    }
  CHECK(found);
}

TEST_CASE("radar_filter keeps the fastest approaching target") {
  std::vector<RadarReturn> returns{
      {{0, 0, 1}, -5.2}, {{0, 0, 2}, -1.0}, {{0, 0, 3}, 3.0}, {{0, 0, 4}, 0.0}};
  const auto det = radar_filter(returns, 1.5);
  REQUIRE(det.has_value());
  CHECK(det->position.z == doctest::Approx(1.0));
  CHECK(det->t == doctest::Approx(1.5));
  CHECK(det->source == Source::Radar);
}

TEST_CASE("radar_filter drops static and receding returns") {
  CHECK_FALSE(radar_filter({{{0, 0, 1}, 0.0}, {{0, 0, 2}, 0.1}}, 0.0).has_value());
  CHECK_FALSE(radar_filter({{{0, 0, 1}, 2.5}}, 0.0).has_value());
  CHECK_FALSE(radar_filter({}, 0.0).has_value());
}

TEST_CASE("merge_streams with one empty input is the identity") {
  std::vector<Detection> cam{{{0, 0, 0}, 0.1, Source::Camera},
                             {{0, 0, 0}, 0.2, Source::Camera}};
  const auto merged = merge_streams(cam, {});
  REQUIRE(merged.size() == 2);
  CHECK(merged.items[0].t == doctest::Approx(0.1));
  CHECK(merged.items[1].t == doctest::Approx(0.2));
}

TEST_CASE("merge_streams keeps camera first on ties and preserves order") {
  std::vector<Detection> cam{{{1, 0, 0}, 0.1, Source::Camera},
                             {{2, 0, 0}, 0.3, Source::Camera}};
  std::vector<Detection> rad{{{3, 0, 0}, 0.1, Source::Radar},
                             {{4, 0, 0}, 0.2, Source::Radar}};
  const auto merged = merge_streams(cam, rad);
  REQUIRE(merged.size() == 4);
  CHECK(merged.items[0].source == Source::Camera);
  CHECK(merged.items[1].source == Source::Radar);
  for (std::size_t i = 1; i < merged.size(); ++i)
    CHECK(merged.items[i].t >= merged.items[i - 1].t);
}

TEST_CASE("merge_streams rejects unordered input") {
  std::vector<Detection> cam{{{0, 0, 0}, 0.3, Source::Camera},
                             {{0, 0, 0}, 0.1, Source::Camera}};
  CHECK_THROWS_AS(merge_streams(cam, {}), std::invalid_argument);
}

TEST_CASE("merge_streams preserves the detection multiset") {
  Rng rng(21);
  for (int trial = 0; trial < 40; ++trial) {
    std::vector<Detection> cam, rad;
    double t = 0;
    const int nc = static_cast<int>(rng.uniform_int(0, 12));
    for (int i = 0; i < nc; ++i) {
      t += rng.uniform(0.0, 0.05);
      cam.push_back({{rng.uniform(), 0, 0}, t, Source::Camera});
    }
    t = 0;
    const int nr = static_cast<int>(rng.uniform_int(0, 12));
    for (int i = 0; i < nr; ++i) {
      t += rng.uniform(0.0, 0.05);
      rad.push_back({{rng.uniform(), 0, 0}, t, Source::Radar});
    }
    const auto merged = merge_streams(cam, rad);
    CHECK(merged.size() == cam.size() + rad.size());
    std::multiset<double> in, out;
    for (const auto& d : cam) in.insert(d.position.x);
    for (const auto& d : rad) in.insert(d.position.x);
    for (const auto& d : merged.items) out.insert(d.position.x);
    CHECK(in == out);
    for (std::size_t i = 1; i < merged.size(); ++i)
      CHECK(merged.items[i].t >= merged.items[i - 1].t);
  }
}

TEST_CASE("detection buffer rejects backwards timestamps") {
  DetectionBuffer buffer;
  buffer.push({{0, 0, 0}, 1.0, Source::Camera});
  CHECK_THROWS_AS(buffer.push({{0, 0, 0}, 0.5, Source::Radar}),
                  std::invalid_argument);
}
