// Small fixed-size vector/matrix types and unit constants used throughout.
//
// Everything is SI internally: meters, tesla, tesla/meter. Gauss and
// millimeters appear only at I/O boundaries via the helpers at the bottom.

#pragma once

#include <array>
#include <cmath>
#include <numbers>

namespace halbach {

struct Vec3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  constexpr double& operator[](int i) { return i == 0 ? x : (i == 1 ? y : z); }
  constexpr double operator[](int i) const { return i == 0 ? x : (i == 1 ? y : z); }

  constexpr Vec3& operator+=(const Vec3& o) {
    x += o.x;
    y += o.y;
    z += o.z;
    return *this;
  }
  constexpr Vec3& operator-=(const Vec3& o) {
    x -= o.x;
    y -= o.y;
    z -= o.z;
    return *this;
  }
  constexpr Vec3& operator*=(double s) {
    x *= s;
    y *= s;
    z *= s;
    return *this;
  }

  friend constexpr bool operator==(const Vec3&, const Vec3&) = default;
};

constexpr Vec3 operator+(Vec3 a, const Vec3& b) { return a += b; }
constexpr Vec3 operator-(Vec3 a, const Vec3& b) { return a -= b; }
constexpr Vec3 operator-(const Vec3& a) { return {-a.x, -a.y, -a.z}; }
constexpr Vec3 operator*(Vec3 a, double s) { return a *= s; }
constexpr Vec3 operator*(double s, Vec3 a) { return a *= s; }
constexpr Vec3 operator/(const Vec3& a, double s) { return {a.x / s, a.y / s, a.z / s}; }

constexpr double dot(const Vec3& a, const Vec3& b) { return a.x * b.x + a.y * b.y + a.z * b.z; }
constexpr Vec3 cross(const Vec3& a, const Vec3& b) {
  return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}
inline double norm(const Vec3& a) { return std::sqrt(dot(a, a)); }
inline Vec3 normalized(const Vec3& a) { return a / norm(a); }
inline bool is_finite(const Vec3& a) {
  return std::isfinite(a.x) && std::isfinite(a.y) && std::isfinite(a.z);
}

/// Row-major 3x3 matrix; m[i][j] = dB_i / dx_j when used as a field Jacobian.
using Mat3 = std::array<std::array<double, 3>, 3>;

inline double frobenius(const Mat3& m) {
  double s = 0.0;
  for (const auto& row : m)
    for (double v : row) s += v * v;
  return std::sqrt(s);
}

inline double trace(const Mat3& m) { return m[0][0] + m[1][1] + m[2][2]; }

inline Vec3 operator*(const Mat3& m, const Vec3& v) {
  return {m[0][0] * v.x + m[0][1] * v.y + m[0][2] * v.z,
          m[1][0] * v.x + m[1][1] * v.y + m[1][2] * v.z,
          m[2][0] * v.x + m[2][1] * v.y + m[2][2] * v.z};
}

/// Rotation about the vertical (y) axis by a multiple of 90 degrees. Exact
/// integer entries, so rotated geometry carries no trigonometric round-off.
inline Mat3 yaw_rotation(int quarter_turns) {
  const int q = ((quarter_turns % 4) + 4) % 4;
  static constexpr std::array<std::array<int, 2>, 4> cs = {{{1, 0}, {0, 1}, {-1, 0}, {0, -1}}};
  const double c = cs[q][0];
  const double s = cs[q][1];
  // x' = c x + s z ; z' = -s x + c z
  return {{{c, 0.0, s}, {0.0, 1.0, 0.0}, {-s, 0.0, c}}};
}

namespace units {
inline constexpr double mu0 = 4.0e-7 * std::numbers::pi;  // rigid-magnet model, classic value
inline constexpr double gauss = 1e-4;                      // tesla per gauss
inline constexpr double mm = 1e-3;
inline constexpr double um = 1e-6;
inline constexpr double elementary_charge = 1.602176634e-19;
inline constexpr double atomic_mass_unit = 1.66053906660e-27;

constexpr double to_gauss(double tesla) { return tesla / gauss; }
constexpr double from_gauss(double g) { return g * gauss; }
constexpr double to_mm(double m) { return m / mm; }
}  // namespace units

}  // namespace halbach
