#include <gtest/gtest.h>

#include <numbers>

#include "halbach/design.hpp"
#include "test_support.hpp"

using namespace halbach;

namespace {

double total_volume(const Assembly& a) {
  double v = 0.0;
  for (const auto& m : a.magnets()) v += m.shape.volume();
  return v;
}

Vec3 direction(const Assembly& a, std::size_t k) { return normalized(a.magnets()[k].remanence); }

void expect_vec_near(const Vec3& got, const Vec3& want, double tol) {
  EXPECT_NEAR(got.x, want.x, tol);
  EXPECT_NEAR(got.y, want.y, tol);
  EXPECT_NEAR(got.z, want.z, tol);
}

}  // namespace

TEST(Design, DefaultsBuildEighteenMagnets) {
  const Assembly a = build_dual_layer(DesignParams{});
  EXPECT_EQ(a.size(), 18u);
  for (std::size_t k = 9; k < 18; ++k) expect_vec_near(a.magnets()[k].remanence, {0.0, -0.5, 0.0}, 0.0);
}

TEST(Design, YzSequenceQuarterTurns) {
  DesignParams p;
  p.rotation_plane = RotationPlane::yz;
  const Assembly a = build_dual_layer(p);
  const Vec3 want[] = {{0, 1, 0}, {0, 0, 1}, {0, -1, 0}, {0, 0, -1}, {0, 1, 0}};
  for (int i = 0; i < 5; ++i) expect_vec_near(direction(a, 2 * i), want[i], 1e-15);
}

TEST(Design, XySequenceQuarterTurns) {
  const Assembly a = build_dual_layer(DesignParams{});
  const Vec3 want[] = {{0, 1, 0}, {-1, 0, 0}, {0, -1, 0}, {1, 0, 0}, {0, 1, 0}};
  for (int i = 0; i < 5; ++i) expect_vec_near(direction(a, 2 * i), want[i], 1e-15);
}

TEST(Design, RotationSequenceCloses) {
  for (RotationPlane rp : {RotationPlane::yz, RotationPlane::xy}) {
    DesignParams p;
    p.rotation_plane = rp;
    p.rotation_step = 2.0 * std::numbers::pi / (p.n_segments - 1);
    EXPECT_NEAR(dot(lower_direction(p, 0), lower_direction(p, p.n_segments - 1)), 1.0, 1e-15);
  }
}

TEST(Design, SingleSegmentCuboid) {
  DesignParams p;
  p.n_segments = 1;
  p.center_style = CenterStyle::cuboid;
  const Assembly a = build_dual_layer(p);
  ASSERT_EQ(a.size(), 2u);
  expect_vec_near(direction(a, 0), {0, 1, 0}, 0.0);
}

TEST(Design, RhombicCenterVolume) {
  const Assembly a = build_dual_layer(preset_params(Preset::rhombic_s3));
  EXPECT_NEAR(a.magnets()[4].shape.volume(), 0.25e-9, 1e-24);
  EXPECT_NEAR(a.magnets()[13].shape.volume(), 0.25e-9, 1e-24);
  EXPECT_NEAR(total_volume(a), 16 * 0.5e-9 + 2 * 0.25e-9, 1e-22);
}

TEST(Design, EqualDiagonalsGiveSquareSection) {
  const Polyhedron r = make_rhombic_prism(0.8e-3, 0.8e-3, 1e-3, {});
  EXPECT_NEAR(r.volume(), 0.8e-3 * 0.8e-3 * 1e-3 / 2, 1e-24);
  EXPECT_EQ(r.vertices().size(), 8u);
}

TEST(Design, NaiveVolumeAndBounds) {
  const DesignParams p = preset_params(Preset::naive_s2);
  const Assembly a = build_dual_layer(p);
  EXPECT_NEAR(total_volume(a), 18 * 0.5e-9, 1e-22);
  Vec3 lo{1, 1, 1}, hi{-1, -1, -1};
  for (const auto& m : a.magnets())
    for (const auto& v : m.shape.vertices())
      for (int i = 0; i < 3; ++i) {
        lo[i] = std::min(lo[i], v[i]);
        hi[i] = std::max(hi[i], v[i]);
      }
  const double half_span = 4 * p.spacing + p.cuboid_size.x / 2;
  expect_vec_near(lo, {-half_span, -p.cuboid_size.y, -p.cuboid_size.z}, 1e-15);
  expect_vec_near(hi, {half_span, p.separation + p.cuboid_size.y, 0.0}, 1e-15);
}

TEST(Design, Presets) {
  EXPECT_EQ(preset_params(Preset::naive_s2).separation, 2.0e-3);
  EXPECT_EQ(preset_params(Preset::naive_s2).center_style, CenterStyle::cuboid);
  EXPECT_EQ(preset_params(Preset::rhombic_s3).separation, 2.0e-3);
  EXPECT_EQ(preset_params(Preset::rhombic_s3).center_style, CenterStyle::rhombic);
  const DesignParams o = preset_params(Preset::optimized_s3_1);
  EXPECT_EQ(o.separation, 2.25e-3);
  EXPECT_EQ(o.axial_offset_upper, 0.0);
  EXPECT_EQ(o.spacing, 1.5e-3);
  EXPECT_EQ(o.br_lower, 1.0);
  EXPECT_EQ(o.br_upper, 0.5);
  const auto [params, assembly] = preset_design(Preset::optimized_s3_1);
  EXPECT_EQ(params, o);
  EXPECT_EQ(assembly.label(), "optimized_s3_1");
}

TEST(Design, BuilderIsDeterministic) {
  const Assembly a = build_dual_layer(DesignParams{});
  const Assembly b = build_dual_layer(DesignParams{});
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a.magnets()[i].remanence, b.magnets()[i].remanence);
    EXPECT_EQ(a.magnets()[i].shape.vertices(), b.magnets()[i].shape.vertices());
  }
}

TEST(Design, MirrorPlaneHasNoTransverseField) {
  for (Preset pr : {Preset::naive_s2, Preset::rhombic_s3, Preset::optimized_s3_1}) {
    const Assembly a = build_dual_layer(preset_params(pr));
    for (double y : {-0.5e-3, 0.5e-3, 1.0e-3, 3.0e-3})
      for (double z = 0.05e-3; z < 8e-3; z += 0.37e-3) EXPECT_LE(std::abs(field_of_assembly(a, {0, y, z}).x), 1e-12);
  }
}

// The yz reading puts antisymmetric z components on a symmetric layout, so
// B_x survives on x = 0. Kept as a characterization of that interpretation.
TEST(Design, YzReadingBreaksMirrorSymmetry) {
  DesignParams p = preset_params(Preset::naive_s2);
  p.rotation_plane = RotationPlane::yz;
  EXPECT_GT(std::abs(field_of_assembly(build_dual_layer(p), {0, 0.5e-3, 1.6e-3}).x), 1e-3);
}

TEST(Design, InvalidParams) {
  auto expect_invalid = [](DesignParams p) {
    try {
      build_dual_layer(p);
      ADD_FAILURE();
    } catch (const Error& e) {
      EXPECT_EQ(e.kind(), ErrorKind::InvalidParams) << e.what();
    }
  };
  DesignParams p;
  p.n_segments = 0;
  expect_invalid(p);
  p = {};
  p.n_segments = 8;  // rhombic needs an odd count
  expect_invalid(p);
  p = {};
  p.separation = 0.0;
  expect_invalid(p);
  p = {};
  p.rhombus_diagonals.axial = 0.0;
  expect_invalid(p);
  p = {};
  p.br_upper = -0.1;
  expect_invalid(p);
}

TEST(Design, TightSpacingOverlaps) {
  DesignParams p = preset_params(Preset::naive_s2);
  p.spacing = 0.4e-3;
  try {
    build_dual_layer(p);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::OverlappingMagnets);
  }
  p.spacing = 0.5e-3;  // faces touch
  EXPECT_NO_THROW(build_dual_layer(p));
}
