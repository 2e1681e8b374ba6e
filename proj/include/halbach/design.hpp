// Parametric dual-layer Halbach geometry.
//
// Canonical frame: x transverse (array direction), y vertical, z axial.
// The lower (Halbach) array has its top faces on the base-plane y = 0 and its
// weak-field front edge on z = 0; the upper (compensation) array is a
// geometric copy whose bottom faces sit at y = separation. Magnets are
// ordered along +x, lower array first.

#pragma once

#include <cmath>
#include <cstddef>
#include <numbers>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "halbach/errors.hpp"
#include "halbach/field.hpp"
#include "halbach/polyhedron.hpp"
#include "halbach/vec3.hpp"

namespace halbach {

enum class CenterStyle { cuboid, rhombic };
enum class RotationPlane { yz, xy };

constexpr std::string_view to_string(CenterStyle s) { return s == CenterStyle::cuboid ? "cuboid" : "rhombic"; }
constexpr std::string_view to_string(RotationPlane r) { return r == RotationPlane::yz ? "yz" : "xy"; }

struct RhombusDiagonals {
  double transverse = 0.5e-3;  // along x
  double axial = 1.0e-3;       // along z
  friend bool operator==(const RhombusDiagonals&, const RhombusDiagonals&) = default;
};

struct DesignParams {
  int n_segments = 9;
  Vec3 cuboid_size{0.5e-3, 1.0e-3, 1.0e-3};  // (width_x, height_y, depth_z)
  CenterStyle center_style = CenterStyle::rhombic;
  RhombusDiagonals rhombus_diagonals{};
  double rhombus_height = 1.0e-3;
  double spacing = 1.5e-3;  // center-to-center along x
  double rotation_step = std::numbers::pi / 4;
  RotationPlane rotation_plane = RotationPlane::xy;
  double br_lower = 1.0;
  double br_upper = 0.5;
  double separation = 2.25e-3;  // base-plane to bottom face of upper array
  double axial_offset_upper = 0.0;
  double ion_height = 0.5e-3;

  friend bool operator==(const DesignParams&, const DesignParams&) = default;
};

/// Throws InvalidParams when a structural invariant fails. Overlap between
/// magnets is left to Assembly construction.
inline void validate(const DesignParams& p) {
  auto fail = [](const std::string& why) { throw Error(ErrorKind::InvalidParams, why); };
  if (p.n_segments < 1) fail("n_segments must be >= 1");
  if (p.center_style == CenterStyle::rhombic && p.n_segments % 2 == 0)
    fail("rhombic center requires an odd n_segments");
  const double lengths[] = {p.cuboid_size.x, p.cuboid_size.y, p.cuboid_size.z, p.spacing, p.separation,
                            p.ion_height};
  for (double v : lengths)
    if (!(v > 0.0) || !std::isfinite(v)) fail("lengths must be positive and finite");
  if (p.center_style == CenterStyle::rhombic &&
      !(p.rhombus_diagonals.transverse > 0 && p.rhombus_diagonals.axial > 0 && p.rhombus_height > 0))
    fail("rhombus dimensions must be positive");
  if (!std::isfinite(p.rotation_step) || !std::isfinite(p.axial_offset_upper)) fail("non-finite parameter");
  if (!(p.br_lower >= 0.0) || !(p.br_upper >= 0.0)) fail("remanence must be >= 0");
}

/// Magnetization direction of lower magnet k: +y rotated by k * step,
/// right-handed about the plane normal (+x for yz, +z for xy).
inline Vec3 lower_direction(const DesignParams& p, int k) {
  const double theta = k * p.rotation_step;
  const double c = std::cos(theta), s = std::sin(theta);
  return p.rotation_plane == RotationPlane::yz ? Vec3{0.0, c, s} : Vec3{-s, c, 0.0};
}

inline double magnet_x(const DesignParams& p, int k) { return (k - 0.5 * (p.n_segments - 1)) * p.spacing; }

inline bool is_center_index(const DesignParams& p, int k) {
  return p.center_style == CenterStyle::rhombic && 2 * k == p.n_segments - 1;
}

/// Shape of magnet k with its bottom face at y_bottom and front edge at z_front.
inline Polyhedron segment_shape(const DesignParams& p, int k, double y_bottom, double z_front) {
  const double x = magnet_x(p, k);
  if (is_center_index(p, k)) {
    const double h = p.rhombus_height;
    return make_rhombic_prism(p.rhombus_diagonals.transverse, p.rhombus_diagonals.axial, h,
                              {x, y_bottom + h / 2, z_front - p.rhombus_diagonals.axial / 2});
  }
  const Vec3& s = p.cuboid_size;
  return make_cuboid({x, y_bottom + s.y / 2, z_front - s.z / 2}, s);
}

inline double segment_height(const DesignParams& p, int k) {
  return is_center_index(p, k) ? p.rhombus_height : p.cuboid_size.y;
}

/// Builds the 2 * n_segments magnet assembly (lower array then upper array).
inline Assembly build_dual_layer(const DesignParams& p, std::string label = "dual_layer") {
  validate(p);
  std::vector<Magnet> ms;
  ms.reserve(2 * static_cast<std::size_t>(p.n_segments));
  for (int k = 0; k < p.n_segments; ++k)
    ms.push_back({segment_shape(p, k, -segment_height(p, k), 0.0), lower_direction(p, k) * p.br_lower});
  for (int k = 0; k < p.n_segments; ++k)
    ms.push_back({segment_shape(p, k, p.separation, p.axial_offset_upper), Vec3{0.0, -p.br_upper, 0.0}});
  return Assembly(std::move(ms), std::move(label));
}

enum class Preset { naive_s2, rhombic_s3, optimized_s3_1 };

constexpr std::string_view to_string(Preset p) {
  switch (p) {
    case Preset::naive_s2: return "naive_s2";
    case Preset::rhombic_s3: return "rhombic_s3";
    case Preset::optimized_s3_1: return "optimized_s3_1";
  }
  return "?";
}

inline DesignParams preset_params(Preset which) {
  DesignParams p;
  switch (which) {
    case Preset::naive_s2:
      p.center_style = CenterStyle::cuboid;
      p.separation = 2.0e-3;
      break;
    case Preset::rhombic_s3:
      p.center_style = CenterStyle::rhombic;
      p.separation = 2.0e-3;
      break;
    case Preset::optimized_s3_1:
      p.center_style = CenterStyle::rhombic;
      p.separation = 2.25e-3;
      break;
  }
  return p;
}

inline std::pair<DesignParams, Assembly> preset_design(Preset which) {
  DesignParams p = preset_params(which);
  return {p, build_dual_layer(p, std::string(to_string(which)))};
}

}  // namespace halbach
