#pragma once

#include <cmath>
#include <stdexcept>
#include <string>

namespace piglet {

// Robot coordinate frame: x horizontal, y vertical (up), z depth.
// Thrown objects approach the robot along -z.
struct Vec3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  Vec3 operator+(const Vec3& o) const { return {x + o.x, y + o.y, z + o.z}; }
  Vec3 operator-(const Vec3& o) const { return {x - o.x, y - o.y, z - o.z}; }
  Vec3 operator*(double s) const { return {x * s, y * s, z * s}; }
  Vec3& operator+=(const Vec3& o) {
    x += o.x;
    y += o.y;
    z += o.z;
    return *this;
  }

  double dot(const Vec3& o) const { return x * o.x + y * o.y + z * o.z; }
  double norm() const { return std::sqrt(x * x + y * y + z * z); }
  double planar_distance(const Vec3& o) const {
    const double dx = x - o.x;
    const double dy = y - o.y;
    return std::sqrt(dx * dx + dy * dy);
  }

  bool finite() const {
    return std::isfinite(x) && std::isfinite(y) && std::isfinite(z);
  }
};

inline Vec3 operator*(double s, const Vec3& v) { return v * s; }

inline void require_finite(const Vec3& v, const char* what) {
  if (!v.finite()) throw std::invalid_argument(std::string(what) + " must be finite");
}

// Axis-aligned box, used for the controller workspace.
struct Box {
  Vec3 lo;
  Vec3 hi;

  bool contains(const Vec3& p) const {
    return p.x >= lo.x && p.x <= hi.x && p.y >= lo.y && p.y <= hi.y &&
           p.z >= lo.z && p.z <= hi.z;
  }

  Vec3 clamp(const Vec3& p) const {
    auto clamp1 = [](double v, double a, double b) {
      return v < a ? a : (v > b ? b : v);
    };
    return {clamp1(p.x, lo.x, hi.x), clamp1(p.y, lo.y, hi.y),
            clamp1(p.z, lo.z, hi.z)};
  }
};

}  // namespace piglet
