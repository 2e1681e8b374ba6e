// Line and grid sampling, effective-null search, approach offsets and
// extinction distance along the ion-height corridor (0, y, z), z > 0.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "halbach/errors.hpp"
#include "halbach/field.hpp"
#include "halbach/parallel.hpp"
#include "halbach/vec3.hpp"

namespace halbach {

struct LineSpec {
  Vec3 start;
  Vec3 end;
  std::size_t n_samples = 2;
};

enum class Axis { x = 0, y = 1, z = 2 };

struct AxisRange {
  double lo = 0.0;
  double hi = 0.0;
  std::size_t count = 2;
};

/// Plane with normal `normal` at coordinate `value`. The in-plane axes are
/// the remaining two in x, y, z order: `u` is the first, `v` the second.
/// Samples are row-major: u is the outer (slow) index, v the inner.
struct GridSpec {
  Axis normal = Axis::y;
  double value = 0.0;
  AxisRange u;
  AxisRange v;
};

struct FieldProfile {
  std::vector<Vec3> positions;
  std::vector<Vec3> B;
  std::vector<double> dBz_dz;  // empty unless requested

  std::size_t size() const noexcept { return positions.size(); }
};

struct NullReport {
  Vec3 position;
  Vec3 residual_B;
  double residual_mag = 0.0;
  double axial_gradient = 0.0;
  double distance_from_edge = 0.0;
  bool is_effective_null = false;
};

struct NullSearchOptions {
  double scan_pitch = 10e-6;
  double refine_tol = 0.1e-6;
  double null_threshold = 1e-4;  // 1 G
  double gradient_step = 1e-6;
};

namespace detail {

inline Vec3 lerp(const Vec3& a, const Vec3& b, double t) { return a + (b - a) * t; }

inline std::vector<Vec3> line_points(const LineSpec& spec) {
  if (spec.n_samples < 2) throw Error(ErrorKind::InvalidParams, "line needs n_samples >= 2");
  if (spec.start == spec.end) throw Error(ErrorKind::InvalidParams, "line start equals end");
  std::vector<Vec3> pts(spec.n_samples);
  const double last = static_cast<double>(spec.n_samples - 1);
  for (std::size_t i = 0; i < spec.n_samples; ++i)
    pts[i] = i + 1 == spec.n_samples ? spec.end : lerp(spec.start, spec.end, static_cast<double>(i) / last);
  return pts;
}

inline double axis_value(const AxisRange& r, std::size_t i) {
  if (r.count == 1) return r.lo;
  return i + 1 == r.count ? r.hi : r.lo + (r.hi - r.lo) * static_cast<double>(i) / static_cast<double>(r.count - 1);
}

/// Evaluates B (and optionally dBz/dz) at each point; a rejected point is
/// reported with its sample index.
inline FieldProfile evaluate_points(const Assembly& a, std::vector<Vec3> pts, bool with_gradient, double h = 1e-6) {
  for (std::size_t i = 0; i < pts.size(); ++i)
    if (!a.is_exterior(pts[i]))
      throw PointInsideError(i, "sample " + std::to_string(i) + " lies inside or on a magnet");
  FieldProfile prof;
  prof.B = parallel_map(pts.size(), [&](std::size_t i) { return field_of_assembly(a, pts[i]); });
  if (with_gradient) {
    prof.dBz_dz = parallel_map(pts.size(), [&](std::size_t i) {
      const Vec3 dz{0.0, 0.0, h};
      try {
        return (field_of_assembly(a, pts[i] + dz).z - field_of_assembly(a, pts[i] - dz).z) / (2 * h);
      } catch (const PointInsideError&) {
        throw PointInsideError(i, "gradient stencil of sample " + std::to_string(i) + " touches a magnet");
      }
    });
  }
  prof.positions = std::move(pts);
  return prof;
}

inline Vec3 corridor_point(double y, double z) { return {0.0, y, z}; }

}  // namespace detail

inline FieldProfile sample_line(const Assembly& a, const LineSpec& spec, bool with_gradient = false) {
  return detail::evaluate_points(a, detail::line_points(spec), with_gradient);
}

inline FieldProfile sample_grid(const Assembly& a, const GridSpec& spec) {
  if (spec.u.count < 2 || spec.v.count < 2) throw Error(ErrorKind::InvalidParams, "grid counts must be >= 2");
  const int n = static_cast<int>(spec.normal);
  const int iu = n == 0 ? 1 : 0;
  const int iv = n == 2 ? 1 : 2;
  std::vector<Vec3> pts;
  pts.reserve(spec.u.count * spec.v.count);
  for (std::size_t i = 0; i < spec.u.count; ++i)
    for (std::size_t j = 0; j < spec.v.count; ++j) {
      Vec3 p;
      p[n] = spec.value;
      p[iu] = detail::axis_value(spec.u, i);
      p[iv] = detail::axis_value(spec.v, j);
      pts.push_back(p);
    }
  return detail::evaluate_points(a, std::move(pts), false);
}

/// Minimum of |B| along (0, y, z), z in window: coarse scan at scan_pitch,
/// golden-section refinement of the deepest interior local minimum.
inline NullReport find_null(const Assembly& a, double y, std::pair<double, double> z_window,
                            const NullSearchOptions& opt = {}) {
  const auto [z0, z1] = z_window;
  if (!(z0 > 0.0) || !(z1 > z0))
    throw Error(ErrorKind::InvalidParams, "null window must satisfy 0 < z_lo < z_hi");
  if (!(opt.null_threshold > 0.0) || !(opt.scan_pitch > 0.0) || !(opt.refine_tol > 0.0))
    throw Error(ErrorKind::InvalidParams, "null search tolerances must be positive");

  const auto n = static_cast<std::size_t>(std::ceil((z1 - z0) / opt.scan_pitch)) + 1;
  std::vector<Vec3> pts(n);
  for (std::size_t i = 0; i < n; ++i)
    pts[i] = detail::corridor_point(y, i + 1 == n ? z1 : z0 + (z1 - z0) * static_cast<double>(i) / (n - 1));
  const FieldProfile prof = detail::evaluate_points(a, pts, false);

  std::optional<std::size_t> best;
  for (std::size_t i = 1; i + 1 < n; ++i) {
    const double m = norm(prof.B[i]);
    if (m <= norm(prof.B[i - 1]) && m <= norm(prof.B[i + 1]) && (!best || m < norm(prof.B[*best]))) best = i;
  }
  // A flat plateau of exact zeros (empty assembly) has no meaningful null.
  if (!best || (norm(prof.B[*best]) == norm(prof.B[*best - 1]) && norm(prof.B[*best]) == norm(prof.B[*best + 1])))
    throw Error(ErrorKind::NoNullFound, "no interior minimum of |B| in the window");

  auto mag = [&](double z) { return norm(field_of_assembly(a, detail::corridor_point(y, z))); };
  double lo = pts[*best - 1].z, hi = pts[*best + 1].z;
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = hi - inv_phi * (hi - lo), d = lo + inv_phi * (hi - lo);
  double fc = mag(c), fd = mag(d);
  while (hi - lo > opt.refine_tol) {
    if (fc < fd) {
      hi = d;
      d = c;
      fd = fc;
      c = hi - inv_phi * (hi - lo);
      fc = mag(c);
    } else {
      lo = c;
      c = d;
      fc = fd;
      d = lo + inv_phi * (hi - lo);
      fd = mag(d);
    }
  }
  // Keep the best point seen; the coarse sample can beat a flat bracket.
  double zbest = 0.5 * (lo + hi);
  if (norm(prof.B[*best]) < mag(zbest)) zbest = pts[*best].z;

  NullReport r;
  r.position = detail::corridor_point(y, zbest);
  r.residual_B = field_of_assembly(a, r.position);
  r.residual_mag = norm(r.residual_B);
  r.axial_gradient = field_jacobian(a, r.position, opt.gradient_step)[2][2];
  r.distance_from_edge = r.position.z;
  r.is_effective_null = r.residual_mag < opt.null_threshold;
  return r;
}

/// dBz/dz at the reported null with a halved, Richardson-extrapolated stencil.
inline double axial_gradient_at_null(const Assembly& a, const NullReport& report, double h = 0.5e-6) {
  return field_jacobian(a, report.position, h, true)[2][2];
}

struct ApproachOffsets {
  double max_bx = 0.0;
  double max_by = 0.0;
  double max_bz = 0.0;
};

/// Per-axis maxima of |B| on the segment from the null out to from_z.
inline ApproachOffsets approach_offsets(const Assembly& a, double y, double from_z, const NullReport& to_null,
                                        double pitch = 10e-6) {
  const double zn = to_null.position.z;
  if (!(from_z > zn)) throw Error(ErrorKind::InvalidParams, "approach must start beyond the null (from_z > z_null)");
  if (!(pitch > 0.0)) throw Error(ErrorKind::InvalidParams, "pitch must be positive");
  const auto n = static_cast<std::size_t>(std::ceil((from_z - zn) / pitch)) + 1;
  const auto prof = sample_line(a, {detail::corridor_point(y, zn), detail::corridor_point(y, from_z), n});
  ApproachOffsets out;
  for (const auto& b : prof.B) {
    out.max_bx = std::max(out.max_bx, std::abs(b.x));
    out.max_by = std::max(out.max_by, std::abs(b.y));
    out.max_bz = std::max(out.max_bz, std::abs(b.z));
  }
  return out;
}

struct Extinction {
  double distance = 0.0;
  bool always_below = false;  // |B| < threshold on the whole corridor
};

/// Largest z in (0, z_max] on (0, y, z) with |B| >= threshold, scanned at
/// `pitch` and refined by bisection to 1e-9 m.
inline Extinction extinction_distance(const Assembly& a, double y, double threshold = 1e-4, double z_max = 100e-3,
                                      double pitch = 10e-6) {
  if (!(threshold > 0.0)) throw Error(ErrorKind::InvalidParams, "extinction threshold must be positive");
  if (!(pitch > 0.0) || !(z_max > pitch)) throw Error(ErrorKind::InvalidParams, "bad extinction scan range");
  const auto n = static_cast<std::size_t>(std::ceil(z_max / pitch));
  std::vector<Vec3> pts(n);
  for (std::size_t i = 0; i < n; ++i)
    pts[i] = detail::corridor_point(y, i + 1 == n ? z_max : z_max * static_cast<double>(i + 1) / n);
  const auto prof = detail::evaluate_points(a, pts, false);
  std::optional<std::size_t> last;
  for (std::size_t i = 0; i < n; ++i)
    if (norm(prof.B[i]) >= threshold) last = i;
  if (!last) return {0.0, true};
  if (*last + 1 == n) return {z_max, false};
  double lo = pts[*last].z, hi = pts[*last + 1].z;
  while (hi - lo > 1e-9) {
    const double mid = 0.5 * (lo + hi);
    (norm(field_of_assembly(a, detail::corridor_point(y, mid))) >= threshold ? lo : hi) = mid;
  }
  return {lo, false};
}

}  // namespace halbach
