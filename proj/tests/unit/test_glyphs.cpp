#include <gtest/gtest.h>

#include <cmath>

#include "vdk/core/error.hpp"
#include "vdk/core/random.hpp"
#include "vdk/glyphs/arrow_glyphs.hpp"
#include "vdk/glyphs/circle_glyphs.hpp"
#include "vdk/glyphs/supporting.hpp"
#include "vdk/glyphs/void_space.hpp"
#include "vdk/mesh/primitives.hpp"
#include "vdk/render/rasterizer.hpp"
#include "vdk/skeleton/endpoints.hpp"

namespace vdk {
namespace {

MeshInstance instance(TriMesh mesh) {
  MeshInstance inst;
  inst.mesh = std::make_shared<const TriMesh>(std::move(mesh));
  return inst;
}

Camera camera(int size = 128) {
  Camera c;
  c.position = Vec3(0, 0, 200);
  c.lookAt = Vec3::Zero();
  c.up = Vec3::UnitY();
  c.verticalFov = 40;
  c.nearPlane = 1;
  c.farPlane = 1000;
  c.width = c.height = size;
  return c;
}

ShadowPlane groundPlane() {
  ShadowPlane p;
  p.origin = Vec3(-50, -50, -10);
  p.normal = Vec3::UnitZ();
  return p;
}

TEST(SupportingLines, LengthEqualsHeight) {
  const auto lines = supportingLines(groundPlane(), {Vec3(3, 4, 15.5)});
  ASSERT_EQ(lines.size(), 1u);
  EXPECT_NEAR(lines[0].length, 25.5, 1e-12);
  EXPECT_NEAR((lines[0].point - lines[0].foot).norm(), 25.5, 1e-12);
}

TEST(SupportingLines, StackedPointsShareFoot) {
  const auto lines = supportingLines(groundPlane(), {Vec3(1, 2, 0), Vec3(1, 2, 30)});
  EXPECT_NEAR((lines[0].foot - lines[1].foot).norm(), 0.0, 1e-12);
  EXPECT_LT(lines[0].length, lines[1].length);
}

TEST(SupportingLines, FootIsOrthogonalProjection) {
  ShadowPlane p = groundPlane();
  p.normal = Vec3(0.2, -0.3, 1.0).normalized();
  Random rng(5);
  std::vector<Vec3> pts;
  for (int i = 0; i < 50; ++i) pts.emplace_back(rng.uniform(-40, 40), rng.uniform(-40, 40), rng.uniform(20, 60));
  for (const auto& l : supportingLines(p, pts)) {
    EXPECT_NEAR((l.point - l.foot).cross(p.normal).norm(), 0.0, 1e-6);
    EXPECT_NEAR(p.height(l.foot), 0.0, 1e-9);
  }
}

TEST(SupportingLines, BelowPlaneThrows) {
  try {
    supportingLines(groundPlane(), {Vec3(0, 0, 5), Vec3(0, 0, -11)});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::SelectionBelowPlane);
  }
}

TEST(SupportingLines, YBranchEndpointsGiveThreeLines) {
  const TriMesh y = primitives::yBranch(25, 3.5, 1.0);
  const SkeletonResult skel = computeSkeleton(y);
  Scene s;
  s.camera = camera();
  s.instances.push_back(instance(y));
  const ShadowPlane plane = fitShadowPlane(s, Vec3::UnitZ(), 10.0, 5.0, 64);
  const AnchorSet anchors = makeAnchorSet(y, skel.endpoints);
  EXPECT_EQ(supportingLines(plane, anchors.worldPositions).size(), 3u);
}

TEST(AnchorSet, DeduplicatesAndValidates) {
  const TriMesh m = primitives::icosphere(5, 1);
  const AnchorSet a = makeAnchorSet(m, {3, 1, 3, 7, 1});
  EXPECT_EQ(a.anchorVertices, (std::vector<int>{3, 1, 7}));
  EXPECT_EQ(a.worldPositions[2], m.vertex(7));
  EXPECT_THROW(makeAnchorSet(m, {0, static_cast<int>(m.vertexCount())}), Error);
}

AnchorCylinder testCylinder() {
  Scene s;
  s.camera = camera();
  s.instances.push_back(instance(primitives::icosphere(40, 2)));
  return fitAnchorCylinder(s);
}

TEST(SupportingAnchors, CylinderFitsScene) {
  const AnchorCylinder c = testCylinder();
  EXPECT_NEAR(c.axis.dot(Vec3(0, 0, -1)), 1.0, 1e-12);
  const double sphereRadius = 0.5 * Vec3(80, 80, 80).norm();
  EXPECT_NEAR(c.radius, 0.6 * sphereRadius, 1.0);
  EXPECT_LT(c.nearDepth, 200 - 39);
  EXPECT_GT(c.farDepth, 200 + 39);
}

TEST(SupportingAnchors, MidplaneConnectorIsRadial) {
  const AnchorCylinder c = testCylinder();
  const double mid = 0.5 * (c.nearDepth + c.farDepth);
  AnchorSet set;
  set.anchorVertices = {0};
  set.worldPositions = {c.axisPoint(mid) + Vec3(7, 3, 0)};
  const auto a = supportingAnchors(c, set);
  ASSERT_EQ(a.size(), 1u);
  const Vec3 connector = a[0].foot - a[0].position;
  EXPECT_NEAR(connector.dot(c.axis), 0.0, 1e-9);
  EXPECT_NEAR((a[0].foot - c.axisPoint(mid)).norm(), c.radius, 1e-9);
  EXPECT_NEAR(connector.normalized().dot(Vec3(7, 3, 0).normalized()), 1.0, 1e-12);
  EXPECT_FALSE(a[0].clamped);
}

TEST(SupportingAnchors, EqualDepthArcsShareCrossSection) {
  const AnchorCylinder c = testCylinder();
  const double depth = c.nearDepth + 0.3 * (c.farDepth - c.nearDepth);
  AnchorSet set;
  set.anchorVertices = {0, 1};
  set.worldPositions = {c.axisPoint(depth) + Vec3(5, 0, 0), c.axisPoint(depth) + Vec3(-2, -9, 0)};
  const auto a = supportingAnchors(c, set);
  ASSERT_EQ(a.size(), 2u);
  for (const auto& anchor : a) {
    for (const Vec3& p : anchor.arc) {
      EXPECT_NEAR(c.axis.dot(p - c.origin), depth, 1e-9);
      EXPECT_NEAR((p - c.axisPoint(depth)).norm(), c.radius, 1e-9);
    }
  }
}

TEST(SupportingAnchors, OutsideRangeIsClampedAndFlagged) {
  const AnchorCylinder c = testCylinder();
  AnchorSet set;
  set.anchorVertices = {0};
  set.worldPositions = {c.axisPoint(c.farDepth + 20) + Vec3(0, 4, 0)};
  const auto a = supportingAnchors(c, set);
  ASSERT_EQ(a.size(), 1u);
  EXPECT_TRUE(a[0].clamped);
  EXPECT_NEAR(c.axis.dot(a[0].foot - c.origin), c.farDepth, 1e-9);
}

TEST(SupportingAnchors, ThinningKeepsNearestPerBin) {
  const AnchorCylinder c = testCylinder();
  AnchorSet set;
  // Eight anchors between 21 and 26 degrees, all in the 20-30 degree bin.
  const double depths[8] = {230, 190, 175, 210, 182, 199, 240, 176};
  for (int i = 0; i < 8; ++i) {
    const double a = degToRad(21.0 + 5.0 * i / 7.0);
    set.anchorVertices.push_back(i);
    set.worldPositions.push_back(c.axisPoint(depths[i]) + 10.0 * (std::cos(a) * c.right + std::sin(a) * c.up));
  }
  // One anchor in a different bin survives independently.
  set.anchorVertices.push_back(8);
  set.worldPositions.push_back(c.axisPoint(250) + 10.0 * (std::cos(1.5) * c.right + std::sin(1.5) * c.up));
  const auto kept = supportingAnchors(c, set);
  ASSERT_EQ(kept.size(), 2u);
  EXPECT_EQ(kept[0].vertex, 2);
  EXPECT_EQ(kept[1].vertex, 8);

  AnchorOptions noThin;
  noThin.thin = false;
  EXPECT_EQ(supportingAnchors(c, set, noThin).size(), 9u);
}

TEST(CircleGlyphs, FillSequence) {
  for (int k = 0; k < 3; ++k) EXPECT_EQ(circleFill(0.0, k), 0.0);
  for (int k = 0; k < 3; ++k) EXPECT_EQ(circleFill(1.0, k), 1.0);
  EXPECT_EQ(circleFill(0.5, 0), 1.0);
  EXPECT_DOUBLE_EQ(circleFill(0.5, 1), 0.5);
  EXPECT_EQ(circleFill(0.5, 2), 0.0);
}

TEST(CircleGlyphs, HalfFillIsRightSemicircle) {
  EXPECT_TRUE(inFilledSector(Vec2(0.5, 0.01), 0.5));
  EXPECT_TRUE(inFilledSector(Vec2(0.5, -0.3), 0.5));
  EXPECT_FALSE(inFilledSector(Vec2(-0.5, 0.3), 0.5));
  EXPECT_FALSE(inFilledSector(Vec2(-0.5, -0.3), 0.5));
  // A quarter fill covers 12 to 3 o'clock only.
  EXPECT_TRUE(inFilledSector(Vec2(0.3, 0.3), 0.25));
  EXPECT_FALSE(inFilledSector(Vec2(0.3, -0.3), 0.25));
}

TEST(CircleGlyphs, FillIsMonotone) {
  double prev = -1.0;
  for (int i = 0; i <= 1000; ++i) {
    const double t = i / 1000.0;
    double total = 0.0;
    for (int k = 0; k < 3; ++k) total += circleFill(t, k);
    EXPECT_GE(total, prev);
    prev = total;
  }
}

TEST(CircleGlyphs, NormalizationSizeAndColour) {
  const Camera cam = camera(500);
  AnchorSet set;
  set.anchorVertices = {0, 1, 2};
  set.worldPositions = {Vec3(0, 0, 100), Vec3(0, 0, 0), Vec3(0, 0, 50)};
  const std::vector<Vec3> tumor = {Vec3(0, 0, 0)};
  const auto g = concentricCircleGlyphs(cam, set, tumor);
  ASSERT_EQ(g.size(), 3u);
  EXPECT_DOUBLE_EQ(g[0].normalizedDistance, 0.0);
  EXPECT_DOUBLE_EQ(g[1].normalizedDistance, 1.0);
  EXPECT_DOUBLE_EQ(g[2].normalizedDistance, 0.5);
  EXPECT_DOUBLE_EQ(g[0].sizePx, 0.04 * 500);
  EXPECT_DOUBLE_EQ(g[1].sizePx, 0.04 * 500 * 0.25);
  EXPECT_GT(g[0].sizePx, g[2].sizePx);
  // Nearest to the tumor gets the hot end of the ramp.
  EXPECT_NEAR((g[1].fillColor - Rgb(1, 0, 0)).norm(), 0.0, 1e-12);
  EXPECT_NEAR((g[0].fillColor - Rgb(1, 1, 1)).norm(), 0.0, 1e-12);
}

TEST(CircleGlyphs, TexelPattern) {
  CircleGlyph g;
  g.sizePx = 200;
  g.normalizedDistance = 0.5;
  g.fillColor = Rgb(1, 0, 0);
  const Rgba inner = circleGlyphTexel(g, Vec2(-0.1, -0.1));
  const Rgba midRight = circleGlyphTexel(g, Vec2(0.5, 0.0));
  const Rgba midLeft = circleGlyphTexel(g, Vec2(-0.5, 0.0));
  const Rgba outer = circleGlyphTexel(g, Vec2(0.0, 0.85));
  EXPECT_EQ(inner, Rgba(1, 0, 0, 1));
  EXPECT_EQ(midRight, Rgba(1, 0, 0, 1));
  EXPECT_LT(midLeft.w(), 1.0);
  EXPECT_LT(outer.w(), 1.0);
  EXPECT_EQ(circleGlyphTexel(g, Vec2(0.9, 0.9)).w(), 0.0);
}

TEST(ArrowGlyphs, OpacityFollowsNormal) {
  EXPECT_DOUBLE_EQ(arrowOpacity(Vec3(0, 0, 2), Vec3(0, 0, 1)), 1.0);
  EXPECT_NEAR(arrowOpacity(Vec3(1, 0, 0), Vec3(0, 0, 1)), 0.0, 1e-15);
  EXPECT_EQ(arrowOpacity(Vec3(0, 0, -1), Vec3(0, 0, 1)), 0.0);
  EXPECT_NEAR(arrowOpacity(Vec3(1, 0, 1), Vec3(0, 0, 1)), std::sqrt(0.5), 1e-12);
}

TEST(ArrowGlyphs, TickDots) {
  EXPECT_EQ(tickCount(65, 20), 3);
  EXPECT_EQ(tickCount(60, 20), 3);
  EXPECT_EQ(tickCount(19.9, 20), 0);
  GlyphStyle style;
  style.maxLength = 80;
  style.switchingDistance = 10;
  const SurfacePoint s{Vec3(0, 0, 0), Vec3(0, 0, 1), 0};
  const auto g = arrowGlyphs({s}, {Vec3(0, 0, 65)}, style);
  ASSERT_EQ(g.size(), 1u);
  EXPECT_DOUBLE_EQ(g[0].length, 65.0);
  ASSERT_EQ(g[0].ticks.size(), 3u);
  EXPECT_NEAR(g[0].ticks[0].z(), 20, 1e-12);
  EXPECT_NEAR(g[0].ticks[1].z(), 40, 1e-12);
  EXPECT_NEAR(g[0].ticks[2].z(), 60, 1e-12);
  EXPECT_DOUBLE_EQ(g[0].opacity, 1.0);
  EXPECT_FALSE(g[0].dense);
}

TEST(ArrowGlyphs, Errors) {
  GlyphStyle style;
  EXPECT_NO_THROW(style.validate());
  try {
    arrowGlyphs({}, {}, style);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NoTumor);
  }
  GlyphStyle bad = style;
  bad.denseSpacing = bad.sparseSpacing;
  EXPECT_THROW(bad.validate(), Error);
  bad = style;
  bad.thickness = 0;
  EXPECT_THROW(bad.validate(), Error);
}

TEST(ArrowGlyphs, DenserNearTumor) {
  const TriMesh plane = primitives::gridPatch(80, 40, 160.0, 80.0);
  const BoundingBox box = plane.boundingBox();
  // Tumor above the left quarter of the patch.
  const Vec3 tumor(box.min.x() + 20, box.center().y(), 5);
  GlyphStyle style;
  style.switchingDistance = 30;
  const auto samples = arrowSamplePoints(plane, {tumor}, style, 11);
  const auto again = arrowSamplePoints(plane, {tumor}, style, 11);
  ASSERT_EQ(samples.size(), again.size());
  for (std::size_t i = 0; i < samples.size(); ++i) EXPECT_EQ(samples[i].position, again[i].position);
  // Equal-area squares: one inside the dense region, one far away.
  auto count = [&](double cx) {
    int n = 0;
    for (const auto& s : samples) {
      if (std::abs(s.position.x() - cx) < 10 && std::abs(s.position.y() - box.center().y()) < 10) ++n;
    }
    return n;
  };
  const int dense = count(tumor.x()), sparse = count(box.max.x() - 20);
  EXPECT_GE(dense, sparse);
  EXPECT_GT(dense, 2 * sparse);
  // Poisson property: no pair closer than the smaller radius.
  for (std::size_t i = 0; i < samples.size(); ++i) {
    for (std::size_t j = i + 1; j < samples.size(); ++j) {
      EXPECT_GE((samples[i].position - samples[j].position).norm(), style.denseSpacing - 1e-9);
    }
  }
}

FrameBuffer emptyFrame(int w, int h) {
  FrameBuffer fb(w, h);
  return fb;
}

void cover(FrameBuffer& fb, int x, int y, double depth) {
  const std::size_t i = fb.index(x, y);
  fb.objectMask[i] = 0;
  fb.depth[i] = depth;
}

TEST(VoidSpace, SymmetricMidpoint) {
  FrameBuffer fb = emptyFrame(11, 11);
  cover(fb, 2, 5, 0.2);
  cover(fb, 8, 5, 0.7);
  const VoidSpaceResult r = voidSpaceSurfaces(fb);
  EXPECT_EQ(r.contourCount, 2u);
  EXPECT_NEAR(r.fill.at(5, 5), 0.45, 1e-15);
  EXPECT_NEAR(r.fill.at(5, 0), 0.45, 1e-15);
  EXPECT_TRUE(std::isnan(r.fill.at(2, 5)));
}

TEST(VoidSpace, FillWithinContourRange) {
  Random rng(3);
  FrameBuffer fb = emptyFrame(40, 30);
  for (int k = 0; k < 60; ++k) cover(fb, static_cast<int>(rng.index(40)), static_cast<int>(rng.index(30)), rng.uniform(0.2, 0.8));
  const VoidSpaceResult r = voidSpaceSurfaces(fb);
  for (double v : r.fill.data) {
    if (std::isnan(v)) continue;
    EXPECT_GE(v, r.minDepth - 1e-12);
    EXPECT_LE(v, r.maxDepth + 1e-12);
  }
}

TEST(VoidSpace, EmptyAndFullFramesAreFlat) {
  VoidSpaceParams p;
  p.flatColor = Rgb(0.3, 0.4, 0.5);
  FrameBuffer empty = emptyFrame(16, 16);
  const VoidSpaceResult r = voidSpaceSurfaces(empty, p);
  EXPECT_TRUE(r.noContour);
  for (const Rgb& c : r.color) EXPECT_EQ(c, p.flatColor);

  FrameBuffer full = emptyFrame(8, 8);
  for (int y = 0; y < 8; ++y) {
    for (int x = 0; x < 8; ++x) cover(full, x, y, 0.5);
  }
  EXPECT_TRUE(voidSpaceSurfaces(full, p).noContour);
}

TEST(VoidSpace, SubsamplesLongContours) {
  FrameBuffer fb = emptyFrame(300, 300);
  for (int y = 10; y < 290; ++y) {
    for (int x = 10; x < 290; ++x) cover(fb, x, y, 0.4);
  }
  VoidSpaceParams p;
  p.maxContourPoints = 100;
  const VoidSpaceResult r = voidSpaceSurfaces(fb, p);
  EXPECT_GT(r.contourCount, 1000u);
  EXPECT_LE(r.contourUsed, 100u);
  EXPECT_NEAR(r.fill.at(0, 0), 0.4, 1e-12);
}

TEST(VoidSpace, SphereFillAttachesToSilhouette) {
  Scene s;
  s.camera = camera(256);
  const double radius = 30.0, dist = 200.0;
  s.instances.push_back(instance(primitives::icosphere(radius, 5)));
  const FrameBuffer fb = rasterizeGeometry(s);
  const VoidSpaceResult r = voidSpaceSurfaces(fb);
  ASSERT_FALSE(r.noContour);
  const double silhouette = s.camera.linearDepth(dist - radius * radius / dist);
  // Contour pixel centres sit up to one pixel inside the silhouette, where
  // the sphere depth drops by at most sqrt(2 R p) for pixel footprint p.
  const double pixel = 2.0 * dist * s.camera.tanHalfFov() / s.camera.height;
  const double inset = std::sqrt(2.0 * radius * pixel) / (s.camera.farPlane - s.camera.nearPlane);
  int checked = 0;
  for (int y = 0; y < fb.height; ++y) {
    for (int x = 0; x < fb.width; ++x) {
      if (fb.covered(x, y)) continue;
      bool adjacent = false;
      for (auto [dx, dy] : {std::pair{1, 0}, {-1, 0}, {0, 1}, {0, -1}}) {
        if (fb.inside(x + dx, y + dy) && fb.covered(x + dx, y + dy)) adjacent = true;
      }
      if (!adjacent) continue;
      EXPECT_LE(r.fill.at(x, y), silhouette + 1e-12);
      EXPECT_GE(r.fill.at(x, y), silhouette - inset);
      ++checked;
    }
  }
  EXPECT_GT(checked, 100);
}

}  // namespace
}  // namespace vdk
