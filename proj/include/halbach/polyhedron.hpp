// Convex polyhedra with outward-oriented planar facets.
//
// A Polyhedron is validated once at construction (planarity, orientation,
// watertightness, convexity) and is immutable afterwards. Facet planes and
// in-plane edge normals are cached because every field evaluation needs them.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "halbach/errors.hpp"
#include "halbach/vec3.hpp"

namespace halbach {

struct Facet {
  std::vector<int> loop;  // vertex indices, counter-clockwise seen from outside
  Vec3 normal;            // outward unit normal
  double offset = 0.0;    // normal . v for any vertex v on the facet
};

class Polyhedron {
 public:
  static constexpr double kPlanarityTol = 1e-12;

  Polyhedron(std::vector<Vec3> vertices, std::vector<std::vector<int>> loops)
      : vertices_(std::move(vertices)) {
    if (vertices_.size() < 4 || loops.size() < 4)
      throw Error(ErrorKind::DegenerateGeometry, "polyhedron needs >= 4 vertices and >= 4 facets");
    for (const auto& v : vertices_)
      if (!is_finite(v)) throw Error(ErrorKind::DegenerateGeometry, "non-finite vertex");

    facets_.reserve(loops.size());
    for (auto& loop : loops) facets_.push_back(make_facet(std::move(loop)));
    check_watertight();
    volume_ = compute_volume();
    if (!(volume_ > 0.0))
      throw Error(ErrorKind::DegenerateGeometry, "signed volume is not positive (inward facets?)");
    check_convex();
  }

  const std::vector<Vec3>& vertices() const noexcept { return vertices_; }
  const std::vector<Facet>& facets() const noexcept { return facets_; }
  double volume() const noexcept { return volume_; }

  Vec3 centroid_of_vertices() const {
    Vec3 c;
    for (const auto& v : vertices_) c += v;
    return c / static_cast<double>(vertices_.size());
  }

  /// Largest signed plane distance max_f (n_f . p - d_f). Positive means
  /// outside; for exterior points it is a lower bound on the true distance.
  double plane_distance(const Vec3& p) const {
    double worst = -std::numeric_limits<double>::infinity();
    for (const auto& f : facets_) worst = std::max(worst, dot(f.normal, p) - f.offset);
    return worst;
  }

  double diameter() const {
    double d = 0.0;
    for (std::size_t i = 0; i < vertices_.size(); ++i)
      for (std::size_t j = i + 1; j < vertices_.size(); ++j)
        d = std::max(d, norm(vertices_[i] - vertices_[j]));
    return d;
  }

  /// Applies x -> R x + t. R must be orthogonal with det +1.
  Polyhedron transformed(const Mat3& rotation, const Vec3& translation) const {
    std::vector<Vec3> vs;
    vs.reserve(vertices_.size());
    for (const auto& v : vertices_) vs.push_back(rotation * v + translation);
    std::vector<std::vector<int>> loops;
    loops.reserve(facets_.size());
    for (const auto& f : facets_) loops.push_back(f.loop);
    return Polyhedron(std::move(vs), std::move(loops));
  }

  Polyhedron translated(const Vec3& t) const {
    return transformed({{{1, 0, 0}, {0, 1, 0}, {0, 0, 1}}}, t);
  }

 private:
  Facet make_facet(std::vector<int> loop) const {
    if (loop.size() < 3) throw Error(ErrorKind::DegenerateGeometry, "facet with < 3 vertices");
    for (int idx : loop)
      if (idx < 0 || static_cast<std::size_t>(idx) >= vertices_.size())
        throw Error(ErrorKind::DegenerateGeometry, "facet index out of range");
    // Newell's method gives a robust area-weighted normal for the loop.
    Vec3 n;
    for (std::size_t i = 0; i < loop.size(); ++i) {
      const Vec3& a = vertices_[loop[i]];
      const Vec3& b = vertices_[loop[(i + 1) % loop.size()]];
      n.x += (a.y - b.y) * (a.z + b.z);
      n.y += (a.z - b.z) * (a.x + b.x);
      n.z += (a.x - b.x) * (a.y + b.y);
    }
    const double len = norm(n);
    if (!(len > 0.0)) throw Error(ErrorKind::DegenerateGeometry, "zero-area facet");
    Facet f{std::move(loop), n / len, 0.0};
    f.offset = dot(f.normal, vertices_[f.loop[0]]);
    for (int idx : f.loop)
      if (std::abs(dot(f.normal, vertices_[idx]) - f.offset) > kPlanarityTol)
        throw Error(ErrorKind::DegenerateGeometry, "non-planar facet");
    return f;
  }

  void check_watertight() const {
    std::map<std::pair<int, int>, int> directed;
    for (const auto& f : facets_)
      for (std::size_t i = 0; i < f.loop.size(); ++i) {
        const int a = f.loop[i];
        const int b = f.loop[(i + 1) % f.loop.size()];
        if (++directed[{a, b}] > 1)
          throw Error(ErrorKind::DegenerateGeometry, "edge used twice in the same direction");
      }
    for (const auto& [edge, count] : directed)
      if (!directed.contains({edge.second, edge.first}))
        throw Error(ErrorKind::DegenerateGeometry, "open edge: polyhedron is not watertight");
  }

  double compute_volume() const {
    double v6 = 0.0;
    for (const auto& f : facets_) {
      const Vec3& a = vertices_[f.loop[0]];
      for (std::size_t i = 1; i + 1 < f.loop.size(); ++i)
        v6 += dot(a, cross(vertices_[f.loop[i]], vertices_[f.loop[i + 1]]));
    }
    return v6 / 6.0;
  }

  void check_convex() const {
    const double scale = diameter();
    for (const auto& f : facets_)
      for (const auto& v : vertices_)
        if (dot(f.normal, v) - f.offset > kPlanarityTol * std::max(1.0, scale * 1e3))
          throw Error(ErrorKind::DegenerateGeometry, "polyhedron is not convex");
  }

  std::vector<Vec3> vertices_;
  std::vector<Facet> facets_;
  double volume_ = 0.0;
};

/// Axis-aligned box centered at `center` with edge lengths `size` (x, y, z).
inline Polyhedron make_cuboid(const Vec3& center, const Vec3& size) {
  if (!(size.x > 0 && size.y > 0 && size.z > 0))
    throw Error(ErrorKind::InvalidParams, "cuboid edge lengths must be positive");
  const Vec3 h = size * 0.5;
  std::vector<Vec3> v;
  for (int i = 0; i < 8; ++i)
    v.push_back(center + Vec3{(i & 1) ? h.x : -h.x, (i & 2) ? h.y : -h.y, (i & 4) ? h.z : -h.z});
  // Loops are counter-clockwise seen from outside.
  return Polyhedron(std::move(v), {{0, 4, 6, 2},    // -x
                                   {1, 3, 7, 5},    // +x
                                   {0, 1, 5, 4},    // -y
                                   {2, 6, 7, 3},    // +y
                                   {0, 2, 3, 1},    // -z
                                   {4, 5, 7, 6}});  // +z
}

/// Right prism with rhombic cross-section in the x-z plane, extruded along y.
/// Rhombus vertices sit at +-d_transverse/2 along x and +-d_axial/2 along z.
inline Polyhedron make_rhombic_prism(double d_transverse, double d_axial, double height,
                                     const Vec3& center) {
  if (!(d_transverse > 0 && d_axial > 0 && height > 0))
    throw Error(ErrorKind::InvalidParams, "rhombic prism diagonals and height must be positive");
  const double a = d_transverse / 2, b = d_axial / 2, h = height / 2;
  // Bottom ring 0..3 at y = -h, top ring 4..7 at y = +h, ordered +x, +z, -x, -z.
  const std::array<Vec3, 4> ring = {Vec3{a, 0, 0}, Vec3{0, 0, b}, Vec3{-a, 0, 0}, Vec3{0, 0, -b}};
  std::vector<Vec3> v;
  for (const auto& r : ring) v.push_back(center + r + Vec3{0, -h, 0});
  for (const auto& r : ring) v.push_back(center + r + Vec3{0, h, 0});
  std::vector<std::vector<int>> loops;
  // Ring order +x -> +z -> -x is clockwise seen from +y.
  loops.push_back({4, 7, 6, 5});  // top (+y)
  loops.push_back({0, 1, 2, 3});  // bottom (-y)
  for (int i = 0; i < 4; ++i) {
    const int j = (i + 1) % 4;
    loops.push_back({i, i + 4, j + 4, j});
  }
  return Polyhedron(std::move(v), std::move(loops));
}

/// Separating-axis test for two convex polyhedra. Returns true when the
/// interiors interpenetrate by more than `clearance`; touching faces are fine.
inline bool interiors_overlap(const Polyhedron& a, const Polyhedron& b, double clearance = 1e-9) {
  auto separated_along = [&](const Vec3& axis) {
    const double len = norm(axis);
    if (len < 1e-14) return false;
    const Vec3 u = axis / len;
    double amin = std::numeric_limits<double>::infinity(), amax = -amin;
    double bmin = amin, bmax = -amin;
    for (const auto& v : a.vertices()) {
      const double s = dot(u, v);
      amin = std::min(amin, s);
      amax = std::max(amax, s);
    }
    for (const auto& v : b.vertices()) {
      const double s = dot(u, v);
      bmin = std::min(bmin, s);
      bmax = std::max(bmax, s);
    }
    return std::min(amax, bmax) - std::max(amin, bmin) <= clearance;
  };
  for (const auto& f : a.facets())
    if (separated_along(f.normal)) return false;
  for (const auto& f : b.facets())
    if (separated_along(f.normal)) return false;
  auto edges = [](const Polyhedron& p) {
    std::vector<Vec3> out;
    for (const auto& f : p.facets())
      for (std::size_t i = 0; i < f.loop.size(); ++i)
        out.push_back(p.vertices()[f.loop[(i + 1) % f.loop.size()]] - p.vertices()[f.loop[i]]);
    return out;
  };
  const auto ea = edges(a);
  const auto eb = edges(b);
  for (const auto& e1 : ea)
    for (const auto& e2 : eb)
      if (separated_along(cross(e1, e2))) return false;
  return true;
}

}  // namespace halbach
