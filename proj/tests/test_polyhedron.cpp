#include <gtest/gtest.h>

#include "halbach/polyhedron.hpp"

using namespace halbach;

namespace {

void expect_kind(ErrorKind kind, auto&& fn) {
  try {
    fn();
    ADD_FAILURE() << "expected " << to_string(kind);
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), kind) << e.what();
  }
}

}  // namespace

TEST(Polyhedron, CuboidHasSixOutwardFacetsAndVolume) {
  const Polyhedron c = make_cuboid({1.0, 2.0, 3.0}, {0.5, 1.0, 2.0});
  EXPECT_EQ(c.vertices().size(), 8u);
  ASSERT_EQ(c.facets().size(), 6u);
  EXPECT_NEAR(c.volume(), 1.0, 1e-15);
  for (const auto& f : c.facets()) {
    EXPECT_NEAR(norm(f.normal), 1.0, 1e-15);
    EXPECT_LT(dot(f.normal, c.centroid_of_vertices()) - f.offset, 0.0);
  }
  EXPECT_LT(c.plane_distance({1.0, 2.0, 3.0}), 0.0);
  EXPECT_NEAR(c.plane_distance({2.0, 2.0, 3.0}), 0.75, 1e-15);
}

TEST(Polyhedron, RhombicPrismVolume) {
  const Polyhedron r = make_rhombic_prism(0.5e-3, 1e-3, 1e-3, {0.0, -0.5e-3, -0.5e-3});
  EXPECT_EQ(r.facets().size(), 6u);
  EXPECT_NEAR(r.volume(), 0.25e-9, 1e-24);
}

TEST(Polyhedron, RejectsNonPositiveDimensions) {
  expect_kind(ErrorKind::InvalidParams, [] { make_rhombic_prism(0.0, 1e-3, 1e-3, {}); });
  expect_kind(ErrorKind::InvalidParams, [] { make_cuboid({}, {1.0, 0.0, 1.0}); });
}

TEST(Polyhedron, RejectsOpenSurface) {
  const Polyhedron c = make_cuboid({}, {1, 1, 1});
  std::vector<std::vector<int>> loops;
  for (std::size_t i = 0; i + 1 < c.facets().size(); ++i) loops.push_back(c.facets()[i].loop);
  loops.push_back(c.facets()[0].loop);
  expect_kind(ErrorKind::DegenerateGeometry, [&] { Polyhedron(c.vertices(), loops); });
}

TEST(Polyhedron, RejectsInwardOrientation) {
  const Polyhedron c = make_cuboid({}, {1, 1, 1});
  std::vector<std::vector<int>> loops;
  for (const auto& f : c.facets()) loops.emplace_back(f.loop.rbegin(), f.loop.rend());
  expect_kind(ErrorKind::DegenerateGeometry, [&] { Polyhedron(c.vertices(), loops); });
}

TEST(Polyhedron, RejectsNonPlanarFacet) {
  const Polyhedron c = make_cuboid({}, {1, 1, 1});
  auto v = c.vertices();
  v[0] = v[0] + Vec3{0.0, 0.0, 1e-3};
  std::vector<std::vector<int>> loops;
  for (const auto& f : c.facets()) loops.push_back(f.loop);
  expect_kind(ErrorKind::DegenerateGeometry, [&] { Polyhedron(v, loops); });
}

TEST(Polyhedron, RejectsTooFewFacets) {
  expect_kind(ErrorKind::DegenerateGeometry, [] { Polyhedron({{0, 0, 0}, {1, 0, 0}, {0, 1, 0}}, {{0, 1, 2}}); });
}

TEST(Polyhedron, TransformPreservesVolume) {
  const Polyhedron r = make_rhombic_prism(0.5e-3, 1e-3, 1e-3, {});
  const Polyhedron t = r.transformed(yaw_rotation(1), {1e-3, 2e-3, 3e-3});
  EXPECT_NEAR(t.volume(), r.volume(), 1e-24);
  EXPECT_NEAR(t.diameter(), r.diameter(), 1e-18);
}

TEST(Polyhedron, OverlapTouchingAndSeparated) {
  const Polyhedron a = make_cuboid({}, {1, 1, 1});
  EXPECT_FALSE(interiors_overlap(a, make_cuboid({1.0, 0, 0}, {1, 1, 1})));  // shared face
  EXPECT_FALSE(interiors_overlap(a, make_cuboid({3.0, 0, 0}, {1, 1, 1})));
  EXPECT_TRUE(interiors_overlap(a, make_cuboid({0.9, 0.2, 0}, {1, 1, 1})));
  EXPECT_TRUE(interiors_overlap(a, make_rhombic_prism(0.5, 1.0, 1.0, {0.6, 0.0, 0.0})));
  EXPECT_FALSE(interiors_overlap(a, make_rhombic_prism(0.5, 1.0, 1.0, {0.75, 0.0, 0.0})));
}
