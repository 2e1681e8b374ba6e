// Validation oracle: the same surface-charge integral as field_of_magnet,
// computed by adaptive numerical quadrature instead of closed form.
//
// Facets are fan-triangulated; each triangle is integrated with a 6x6
// collapsed Gauss-Legendre product rule and bisected into four children
// until the parent and children estimates agree. Nothing here shares code
// with the closed-form kernel beyond the Polyhedron data.

#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <numbers>

#include "halbach/errors.hpp"
#include "halbach/field.hpp"
#include "halbach/vec3.hpp"

namespace halbach {

namespace detail {

struct Triangle {
  Vec3 a, b, c;
};

// Gauss-Legendre, 6 points, mapped to [0, 1].
inline constexpr std::array<double, 6> kGlNodes = {
    0.033765242898423986, 0.16939530676686776, 0.38069040695840156,
    0.61930959304159845,  0.83060469323313224, 0.96623475710157603};
inline constexpr std::array<double, 6> kGlWeights = {
    0.085662246189585173, 0.18038078652406930, 0.23395696728634552,
    0.23395696728634552,  0.18038078652406930, 0.085662246189585173};

inline Vec3 coulomb_kernel(const Vec3& p, const Vec3& r) {
  const Vec3 d = p - r;
  const double r2 = dot(d, d);
  return d / (r2 * std::sqrt(r2));
}

/// Duffy map r = a + u (b - a) + u v (c - b); dA = 2 area u du dv.
inline Vec3 triangle_rule(const Triangle& t, const Vec3& p) {
  const double twice_area = norm(cross(t.b - t.a, t.c - t.a));
  Vec3 sum;
  for (std::size_t i = 0; i < kGlNodes.size(); ++i) {
    const double u = kGlNodes[i];
    Vec3 inner;
    for (std::size_t j = 0; j < kGlNodes.size(); ++j) {
      const double v = kGlNodes[j];
      inner += coulomb_kernel(p, t.a + (t.b - t.a) * u + (t.c - t.b) * (u * v)) * kGlWeights[j];
    }
    sum += inner * (kGlWeights[i] * u);
  }
  return sum * twice_area;
}

struct QuadratureBudget {
  std::size_t remaining;
};

inline Vec3 adaptive_triangle(const Triangle& t, const Vec3& p, const Vec3& coarse, double abs_tol, int depth,
                              QuadratureBudget& budget) {
  const Vec3 ab = (t.a + t.b) * 0.5, bc = (t.b + t.c) * 0.5, ca = (t.c + t.a) * 0.5;
  const std::array<Triangle, 4> kids = {Triangle{t.a, ab, ca}, Triangle{ab, t.b, bc}, Triangle{ca, bc, t.c},
                                        Triangle{ab, bc, ca}};
  std::array<Vec3, 4> est;
  Vec3 fine;
  for (std::size_t i = 0; i < 4; ++i) {
    est[i] = triangle_rule(kids[i], p);
    fine += est[i];
  }
  if (budget.remaining < 4) throw Error(ErrorKind::QuadratureNonConvergence, "evaluation budget exhausted");
  budget.remaining -= 4;
  if (norm(fine - coarse) <= abs_tol) return fine;
  if (depth <= 0) throw Error(ErrorKind::QuadratureNonConvergence, "maximum refinement depth reached");
  Vec3 total;
  for (std::size_t i = 0; i < 4; ++i) total += adaptive_triangle(kids[i], p, est[i], abs_tol / 4, depth - 1, budget);
  return total;
}

}  // namespace detail

/// B at p by adaptive quadrature, converged to `tol` relative to |B|.
inline Vec3 oracle_field_quadrature(const Magnet& m, const Vec3& p, double tol = 1e-10,
                                    std::size_t max_evaluations = 4'000'000) {
  if (!(tol > 0.0)) throw Error(ErrorKind::InvalidParams, "quadrature tolerance must be positive");
  require_exterior(m, p);
  if (m.remanence == Vec3{}) return {};

  std::vector<std::pair<double, detail::Triangle>> tris;  // (charge density, triangle)
  const auto& v = m.shape.vertices();
  for (const auto& f : m.shape.facets()) {
    const double sigma = dot(m.remanence, f.normal);
    if (sigma == 0.0) continue;
    for (std::size_t i = 1; i + 1 < f.loop.size(); ++i)
      tris.push_back({sigma, {v[f.loop[0]], v[f.loop[i]], v[f.loop[i + 1]]}});
  }

  auto integrate = [&](double abs_tol_b) {
    detail::QuadratureBudget budget{max_evaluations};
    Vec3 b;
    const double per_tri = abs_tol_b * 4.0 * std::numbers::pi / static_cast<double>(tris.size());
    for (const auto& [sigma, t] : tris) {
      const Vec3 coarse = detail::triangle_rule(t, p);
      b += detail::adaptive_triangle(t, p, coarse, per_tri / std::abs(sigma), 40, budget) * sigma;
    }
    return b / (4.0 * std::numbers::pi);
  };

  // Scale the absolute tolerance by a first estimate, then tighten once if
  // cancellation made the converged field much smaller than that estimate.
  Vec3 rough;
  for (const auto& [sigma, t] : tris) rough += detail::triangle_rule(t, p) * sigma;
  double scale = norm(rough) / (4.0 * std::numbers::pi);
  if (!(scale > 0.0)) scale = std::abs(norm(m.remanence)) * 1e-12;
  Vec3 b = integrate(tol * scale);
  const double got = norm(b);
  if (got < 0.5 * scale && got > 0.0) b = integrate(tol * got);
  return b;
}

}  // namespace halbach
