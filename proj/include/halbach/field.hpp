// Exterior field of uniformly magnetized convex polyhedra.
//
// Rigid-magnet surface-charge model: a magnet with remanence vector B_r
// carries charge sigma_f = B_r . n_f on each facet, and outside matter
//
//   B(p) = (1 / 4 pi) sum_f sigma_f  Int_f (p - r') / |p - r'|^3 dA'.
//
// Each facet integral is evaluated in closed form: the normal part is the
// signed solid angle of the facet seen from p (triangle fan, Van Oosterom &
// Strackee), and the in-plane part reduces through the gradient theorem to
// edge integrals of 1/R, i.e. log((Ra + Rb + L) / (Ra + Rb - L)) per edge.

#pragma once

#include <cmath>
#include <cstddef>
#include <numbers>
#include <string>
#include <utility>
#include <vector>

#include "halbach/errors.hpp"
#include "halbach/polyhedron.hpp"
#include "halbach/vec3.hpp"

namespace halbach {

/// Points closer than this to a magnet (by plane distance) are rejected.
inline constexpr double kSurfaceExclusion = 1e-9;

struct Magnet {
  Polyhedron shape;
  Vec3 remanence;  // tesla; magnitude B_r, direction = magnetization axis
};

namespace detail {

/// Int_facet (p - r') / |p - r'|^3 dA' for one planar convex facet.
inline Vec3 facet_kernel(const Polyhedron& poly, const Facet& f, const Vec3& p) {
  const auto& v = poly.vertices();
  const std::size_t n = f.loop.size();

  // Signed solid angle, positive when p lies on the outward side.
  double omega = 0.0;
  const Vec3 a = v[f.loop[0]] - p;
  const double la = norm(a);
  for (std::size_t i = 1; i + 1 < n; ++i) {
    const Vec3 b = v[f.loop[i]] - p;
    const Vec3 c = v[f.loop[i + 1]] - p;
    const double lb = norm(b), lc = norm(c);
    const double triple = dot(a, cross(b, c));
    const double denom = la * lb * lc + dot(a, b) * lc + dot(a, c) * lb + dot(b, c) * la;
    omega -= 2.0 * std::atan2(triple, denom);
  }
  Vec3 result = f.normal * omega;

  for (std::size_t i = 0; i < n; ++i) {
    const Vec3& ea = v[f.loop[i]];
    const Vec3& eb = v[f.loop[(i + 1) % n]];
    const Vec3 edge = eb - ea;
    const double len = norm(edge);
    const double ra = norm(ea - p), rb = norm(eb - p);
    const Vec3 outward = cross(edge, f.normal) / len;
    result += outward * std::log((ra + rb + len) / (ra + rb - len));
  }
  return result;
}

}  // namespace detail

/// Throws PointInsideError unless p is farther than the exclusion zone from
/// the magnet.
inline void require_exterior(const Magnet& m, const Vec3& p, std::size_t index = 0) {
  if (!is_finite(p)) throw PointInsideError(index, "non-finite evaluation point");
  if (!(m.shape.plane_distance(p) > kSurfaceExclusion))
    throw PointInsideError(index, "evaluation point inside or on magnet " + std::to_string(index));
}

inline Vec3 field_of_magnet(const Magnet& m, const Vec3& p) {
  require_exterior(m, p);
  if (m.remanence == Vec3{}) return {};
  Vec3 b;
  for (const auto& f : m.shape.facets()) {
    const double sigma = dot(m.remanence, f.normal);
    if (sigma == 0.0) continue;
    b += detail::facet_kernel(m.shape, f, p) * sigma;
  }
  return b / (4.0 * std::numbers::pi);
}

/// Posed, immutable collection of magnets. Construction rejects
/// interpenetrating magnets.
class Assembly {
 public:
  Assembly() = default;
  Assembly(std::vector<Magnet> magnets, std::string label, bool check_overlap = true)
      : magnets_(std::move(magnets)), label_(std::move(label)) {
    if (check_overlap)
      for (std::size_t i = 0; i < magnets_.size(); ++i)
        for (std::size_t j = i + 1; j < magnets_.size(); ++j)
          if (interiors_overlap(magnets_[i].shape, magnets_[j].shape))
            throw Error(ErrorKind::OverlappingMagnets,
                        "magnets " + std::to_string(i) + " and " + std::to_string(j) + " overlap");
  }

  const std::vector<Magnet>& magnets() const noexcept { return magnets_; }
  const std::string& label() const noexcept { return label_; }
  std::size_t size() const noexcept { return magnets_.size(); }
  bool empty() const noexcept { return magnets_.empty(); }

  bool is_exterior(const Vec3& p) const {
    for (const auto& m : magnets_)
      if (!(m.shape.plane_distance(p) > kSurfaceExclusion)) return false;
    return true;
  }

  /// Same geometry, every remanence multiplied by s.
  Assembly scaled(double s) const {
    auto ms = magnets_;
    for (auto& m : ms) m.remanence *= s;
    return Assembly(std::move(ms), label_, false);
  }

 private:
  std::vector<Magnet> magnets_;
  std::string label_;
};

/// Superposition in fixed magnet order.
inline Vec3 field_of_assembly(const Assembly& a, const Vec3& p) {
  const auto& ms = a.magnets();
  for (std::size_t i = 0; i < ms.size(); ++i) require_exterior(ms[i], p, i);
  Vec3 b;
  for (const auto& m : ms) {
    if (m.remanence == Vec3{}) continue;
    for (const auto& f : m.shape.facets()) {
      const double sigma = dot(m.remanence, f.normal);
      if (sigma == 0.0) continue;
      b += detail::facet_kernel(m.shape, f, p) * (sigma / (4.0 * std::numbers::pi));
    }
  }
  return b;
}

/// Field of a point dipole with moment m (A m^2) located at `origin`.
inline Vec3 dipole_field(const Vec3& moment, const Vec3& origin, const Vec3& p) {
  const Vec3 r = p - origin;
  const double d = norm(r);
  const Vec3 u = r / d;
  return (u * (3.0 * dot(moment, u)) - moment) * (units::mu0 / (4.0 * std::numbers::pi * d * d * d));
}

/// Dipole moment (A m^2) equivalent to a uniformly magnetized magnet.
inline Vec3 dipole_moment(const Magnet& m) { return m.remanence * (m.shape.volume() / units::mu0); }

/// Central-difference Jacobian J[i][j] = dB_i/dx_j of any field callable.
/// With `richardson`, combines steps h and h/2 to cancel the h^2 term.
template <class Field>
Mat3 jacobian(Field&& field, const Vec3& p, double h = 1e-6, bool richardson = false) {
  if (!(h > 0.0)) throw Error(ErrorKind::InvalidParams, "finite-difference step must be positive");
  auto central = [&](double step) {
    Mat3 j{};
    for (int k = 0; k < 3; ++k) {
      Vec3 dp;
      dp[k] = step;
      const Vec3 d = field(p + dp) - field(p - dp);
      for (int i = 0; i < 3; ++i) j[i][k] = d[i] / (2.0 * step);
    }
    return j;
  };
  Mat3 j = central(h);
  if (richardson) {
    const Mat3 j2 = central(h / 2);
    for (int i = 0; i < 3; ++i)
      for (int k = 0; k < 3; ++k) j[i][k] = (4.0 * j2[i][k] - j[i][k]) / 3.0;
  }
  return j;
}

inline Mat3 field_jacobian(const Assembly& a, const Vec3& p, double h = 1e-6, bool richardson = false) {
  return jacobian([&](const Vec3& q) { return field_of_assembly(a, q); }, p, h, richardson);
}

}  // namespace halbach
