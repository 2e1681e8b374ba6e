// Tiling of dual-layer modules into a junction-grid layout and
// corridor exposure analysis.
//
// A module's local frame is the canonical design frame (front edge on z = 0,
// base-plane y = 0, weak side towards +z). Placement applies a yaw about +y
// in quarter turns, then a translation.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "halbach/analysis.hpp"
#include "halbach/design.hpp"
#include "halbach/errors.hpp"
#include "halbach/field.hpp"
#include "halbach/ion.hpp"
#include "halbach/parallel.hpp"

namespace halbach {

struct ModulePlacement {
  DesignParams design = preset_params(Preset::optimized_s3_1);
  Vec3 translation;
  int yaw_quarter_turns = 0;
  bool optional_arm = false;
  std::string label = "module";
  double gate_standoff = 2.0e-3;  // gate zone distance from the front edge, weak side
};

/// Gate-zone center of a module in the global frame.
inline Vec3 gate_point(const ModulePlacement& m) {
  return yaw_rotation(m.yaw_quarter_turns) * Vec3{0.0, m.design.ion_height, m.gate_standoff} + m.translation;
}

struct Scene {
  std::vector<ModulePlacement> placements;
  std::vector<ShuttlePath> corridors;
};

inline Assembly place_module(const ModulePlacement& m) {
  if (!is_finite(m.translation)) throw Error(ErrorKind::InvalidParams, "non-finite placement translation");
  const Assembly local = build_dual_layer(m.design, m.label);
  const Mat3 r = yaw_rotation(m.yaw_quarter_turns);
  std::vector<Magnet> out;
  out.reserve(local.size());
  for (const auto& mag : local.magnets()) out.push_back({mag.shape.transformed(r, m.translation), r * mag.remanence});
  return Assembly(std::move(out), m.label, false);
}

namespace detail {
struct Aabb {
  Vec3 lo, hi;
};
inline Aabb bounds(const Polyhedron& p) {
  Aabb b{p.vertices()[0], p.vertices()[0]};
  for (const auto& v : p.vertices())
    for (int i = 0; i < 3; ++i) {
      b.lo[i] = std::min(b.lo[i], v[i]);
      b.hi[i] = std::max(b.hi[i], v[i]);
    }
  return b;
}
inline bool boxes_disjoint(const Aabb& a, const Aabb& b, double clearance) {
  for (int i = 0; i < 3; ++i)
    if (std::min(a.hi[i], b.hi[i]) - std::max(a.lo[i], b.lo[i]) <= clearance) return true;
  return false;
}
}  // namespace detail

/// Flattens all placements into one assembly in the global frame, in
/// placement order. Throws OverlappingMagnets if modules interpenetrate.
inline Assembly compose_scene(const std::vector<ModulePlacement>& placements, std::string label = "scene") {
  std::vector<Magnet> all;
  std::vector<std::size_t> owner;
  for (std::size_t i = 0; i < placements.size(); ++i) {
    const Assembly a = place_module(placements[i]);
    for (const auto& m : a.magnets()) {
      all.push_back(m);
      owner.push_back(i);
    }
  }
  std::vector<detail::Aabb> boxes;
  boxes.reserve(all.size());
  for (const auto& m : all) boxes.push_back(detail::bounds(m.shape));
  for (std::size_t i = 0; i < all.size(); ++i)
    for (std::size_t j = i + 1; j < all.size(); ++j) {
      if (owner[i] == owner[j] || detail::boxes_disjoint(boxes[i], boxes[j], kSurfaceExclusion)) continue;
      if (interiors_overlap(all[i].shape, all[j].shape))
        throw Error(ErrorKind::OverlappingMagnets,
                    "modules " + std::to_string(owner[i]) + " and " + std::to_string(owner[j]) + " overlap");
    }
  return Assembly(std::move(all), std::move(label), false);
}

struct CorridorReport {
  double max_B = 0.0;
  Vec3 max_location;
  double gate_clearance = std::numeric_limits<double>::infinity();  // min distance to any gate point
  std::size_t flagged_samples = 0;  // samples with |B| >= threshold
  bool flagged = false;
};

inline std::vector<CorridorReport> corridor_report(const Scene& scene, double threshold = 1e-4, double pitch = 50e-6) {
  if (!(threshold > 0.0)) throw Error(ErrorKind::InvalidParams, "threshold must be positive");
  const Assembly a = compose_scene(scene.placements);
  std::vector<Vec3> gates;
  for (const auto& p : scene.placements) gates.push_back(gate_point(p));

  std::vector<CorridorReport> out;
  for (const auto& path : scene.corridors) {
    const auto ps = sample_path(path, pitch);
    for (std::size_t i = 0; i < ps.size(); ++i)
      if (!a.is_exterior(ps[i].position))
        throw PointInsideError(i, "corridor sample " + std::to_string(i) + " lies inside or on a magnet");
    const auto mags = parallel_map(ps.size(), [&](std::size_t i) { return norm(field_of_assembly(a, ps[i].position)); });
    CorridorReport r;
    for (std::size_t i = 0; i < ps.size(); ++i) {
      if (mags[i] > r.max_B || i == 0) {
        r.max_B = mags[i];
        r.max_location = ps[i].position;
      }
      if (mags[i] >= threshold) ++r.flagged_samples;
      for (const auto& g : gates) r.gate_clearance = std::min(r.gate_clearance, norm(ps[i].position - g));
    }
    r.flagged = r.flagged_samples > 0;
    out.push_back(r);
  }
  return out;
}

inline constexpr double kMinModulePitch = 20e-3;

struct JunctionGridOptions {
  double pitch = kMinModulePitch;
  bool optional_center_arms = false;
  double gate_arm_offset = 0.25;  // gate point distance from its junction, in pitches
  double gate_standoff = 2.0e-3;  // gate point to module front edge
  DesignParams design = preset_params(Preset::optimized_s3_1);
};

/// 3x3 grid of x-junctions centered on the origin in the x-z plane. Rows run
/// along x; the top row sits at z = +pitch. Gate modules occupy the outer
/// arms of the top and bottom rows with their weak side facing the junction;
/// optionally the outer arms of the middle row get a module too. Corridors
/// follow the three rows and three columns at ion height.
inline Scene nine_junction_preset(const JunctionGridOptions& opt = {}) {
  if (!(opt.pitch >= kMinModulePitch))
    throw Error(ErrorKind::InvalidParams, "module pitch below the 20 mm minimum");
  const double pitch = opt.pitch;
  const double reach = opt.gate_arm_offset * pitch + opt.gate_standoff;
  Scene s;
  for (int col = -1; col <= 1; ++col) {
    const double x = col * pitch;
    ModulePlacement top{opt.design, {x, 0.0, pitch + reach}, 2, false, "top_" + std::to_string(col + 1), opt.gate_standoff};
    ModulePlacement bottom{opt.design, {x, 0.0, -pitch - reach}, 0, false, "bottom_" + std::to_string(col + 1),
                           opt.gate_standoff};
    s.placements.push_back(top);
    s.placements.push_back(bottom);
  }
  if (opt.optional_center_arms) {
    s.placements.push_back({opt.design, {-pitch - reach, 0.0, 0.0}, 1, true, "center_left", opt.gate_standoff});
    s.placements.push_back({opt.design, {pitch + reach, 0.0, 0.0}, 3, true, "center_right", opt.gate_standoff});
  }
  const double y = opt.design.ion_height;
  for (int k = -1; k <= 1; ++k) {
    s.corridors.push_back({{{-pitch, y, k * pitch}, {pitch, y, k * pitch}}, 1.6});
    s.corridors.push_back({{{k * pitch, y, -pitch}, {k * pitch, y, pitch}}, 1.6});
  }
  return s;
}

}  // namespace halbach
