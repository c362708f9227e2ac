#pragma once

// Small 3-vector used for positions, directions and surface normals.

#include <cmath>
#include <stdexcept>

namespace owcsim {

struct Vec3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;
};

inline Vec3 operator+(const Vec3& a, const Vec3& b) { return {a.x + b.x, a.y + b.y, a.z + b.z}; }
inline Vec3 operator-(const Vec3& a, const Vec3& b) { return {a.x - b.x, a.y - b.y, a.z - b.z}; }
inline Vec3 operator*(double s, const Vec3& v) { return {s * v.x, s * v.y, s * v.z}; }
inline Vec3 operator*(const Vec3& v, double s) { return s * v; }

inline double dot(const Vec3& a, const Vec3& b) { return a.x * b.x + a.y * b.y + a.z * b.z; }
inline double norm(const Vec3& v) { return std::sqrt(dot(v, v)); }

inline Vec3 normalize(const Vec3& v) {
  double n = norm(v);
  if (n <= 0.0 || !std::isfinite(n)) throw std::invalid_argument("normalize: zero-length vector");
  return {v.x / n, v.y / n, v.z / n};
}

// Angle between two unit vectors, clamped against rounding outside [-1, 1].
inline double angle_between(const Vec3& a, const Vec3& b) {
  double c = dot(a, b);
  if (c > 1.0) c = 1.0;
  if (c < -1.0) c = -1.0;
  return std::acos(c);
}

}  // namespace owcsim
