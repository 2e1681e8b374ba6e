// Shuttled-ion exposure: Lorentz force estimates, force profiles along a
// constant-speed path, and first-order phase accumulation.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "halbach/errors.hpp"
#include "halbach/field.hpp"
#include "halbach/parallel.hpp"
#include "halbach/vec3.hpp"

namespace halbach {

struct IonSpecies {
  double charge = units::elementary_charge;  // C
  double mass = 171.0 * units::atomic_mass_unit;  // kg
  std::string label = "171Yb+";
};

inline IonSpecies ytterbium_171() { return {}; }

inline void validate(const IonSpecies& ion) {
  if (ion.charge == 0.0 || !std::isfinite(ion.charge)) throw Error(ErrorKind::InvalidParams, "ion charge must be nonzero");
  if (!(ion.mass > 0.0)) throw Error(ErrorKind::InvalidParams, "ion mass must be positive");
}

struct LorentzEstimate {
  double force = 0.0;         // N
  double acceleration = 0.0;  // m/s^2
  double ratio_radial = 0.0;  // force / radial confinement force
  double ratio_axial = 0.0;   // force / axial confinement force
};

/// Worst-case |F| = |q| v B (velocity perpendicular to B).
inline LorentzEstimate lorentz_estimate(const IonSpecies& ion, double speed, double b, double radial_confinement = 1e-16,
                                        double axial_confinement = 1e-19) {
  validate(ion);
  if (!(speed >= 0.0) || !(b >= 0.0)) throw Error(ErrorKind::InvalidParams, "speed and B must be >= 0");
  LorentzEstimate e;
  e.force = std::abs(ion.charge) * speed * b;
  e.acceleration = e.force / ion.mass;
  e.ratio_radial = e.force / radial_confinement;
  e.ratio_axial = e.force / axial_confinement;
  return e;
}

struct ShuttlePath {
  std::vector<Vec3> waypoints;
  double speed = 1.6;  // m/s
};

inline void validate(const ShuttlePath& path) {
  if (path.waypoints.size() < 2) throw Error(ErrorKind::InvalidParams, "path needs >= 2 waypoints");
  if (!(path.speed > 0.0)) throw Error(ErrorKind::InvalidParams, "path speed must be positive");
  for (std::size_t i = 0; i + 1 < path.waypoints.size(); ++i)
    if (path.waypoints[i] == path.waypoints[i + 1])
      throw Error(ErrorKind::InvalidParams, "path has a zero-length segment");
}

struct PathSample {
  double s = 0.0;  // arc length, m
  double t = 0.0;  // s
  Vec3 position;
  Vec3 velocity;
};

/// Samples the polyline at <= pitch arc-length spacing. Waypoints are always
/// samples; a waypoint takes the velocity of the segment leaving it, the
/// final waypoint that of the last segment.
inline std::vector<PathSample> sample_path(const ShuttlePath& path, double pitch = 10e-6) {
  validate(path);
  if (!(pitch > 0.0)) throw Error(ErrorKind::InvalidParams, "pitch must be positive");
  std::vector<PathSample> out;
  double s0 = 0.0;
  for (std::size_t k = 0; k + 1 < path.waypoints.size(); ++k) {
    const Vec3& a = path.waypoints[k];
    const Vec3& b = path.waypoints[k + 1];
    const double len = norm(b - a);
    const Vec3 vel = (b - a) * (path.speed / len);
    const auto n = std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(len / pitch - 1e-9)));
    for (std::size_t i = 0; i < n; ++i) {
      const double f = static_cast<double>(i) / static_cast<double>(n);
      out.push_back({s0 + f * len, (s0 + f * len) / path.speed, a + (b - a) * f, vel});
    }
    s0 += len;
    if (k + 2 == path.waypoints.size()) out.push_back({s0, s0 / path.speed, b, vel});
  }
  return out;
}

struct ExposureSample {
  double s = 0.0;
  double t = 0.0;
  Vec3 position;
  Vec3 B;
  Vec3 force;  // q v x B, N
};

struct ExposureProfile {
  std::vector<ExposureSample> samples;
  double peak_force = 0.0;
  Vec3 peak_force_position;
  double peak_B = 0.0;
};

inline ExposureProfile path_exposure(const Assembly& a, const IonSpecies& ion, const ShuttlePath& path,
                                     double pitch = 10e-6) {
  validate(ion);
  const auto ps = sample_path(path, pitch);
  for (std::size_t i = 0; i < ps.size(); ++i)
    if (!a.is_exterior(ps[i].position))
      throw PointInsideError(i, "path sample " + std::to_string(i) + " lies inside or on a magnet");
  ExposureProfile prof;
  prof.samples = parallel_map(ps.size(), [&](std::size_t i) {
    const Vec3 b = field_of_assembly(a, ps[i].position);
    return ExposureSample{ps[i].s, ps[i].t, ps[i].position, b, cross(ps[i].velocity, b) * ion.charge};
  });
  for (const auto& s : prof.samples) {
    const double f = norm(s.force);
    if (f > prof.peak_force) {
      prof.peak_force = f;
      prof.peak_force_position = s.position;
    }
    prof.peak_B = std::max(prof.peak_B, norm(s.B));
  }
  return prof;
}

/// phi = Int sensitivity |B(r(t))| dt by the trapezoid rule over the path
/// samples. Linear first-order model; no physical sensitivity is assumed.
inline double phase_accumulation(const Assembly& a, const ShuttlePath& path, double sensitivity, double pitch = 10e-6) {
  if (!(sensitivity >= 0.0)) throw Error(ErrorKind::InvalidParams, "sensitivity must be >= 0");
  const auto ps = sample_path(path, pitch);
  for (std::size_t i = 0; i < ps.size(); ++i)
    if (!a.is_exterior(ps[i].position))
      throw PointInsideError(i, "path sample " + std::to_string(i) + " lies inside or on a magnet");
  const auto mags = parallel_map(ps.size(), [&](std::size_t i) { return norm(field_of_assembly(a, ps[i].position)); });
  double phi = 0.0;
  for (std::size_t i = 0; i + 1 < ps.size(); ++i) phi += 0.5 * (mags[i] + mags[i + 1]) * (ps[i + 1].t - ps[i].t);
  return sensitivity * phi;
}

}  // namespace halbach
