#include <gtest/gtest.h>

#include <filesystem>
#include <random>
#include <set>

#include "vdk/core/error.hpp"
#include "vdk/mesh/primitives.hpp"
#include "vdk/render/image_io.hpp"
#include "vdk/render/pick.hpp"
#include "vdk/render/rasterizer.hpp"
#include "vdk/render/shadow.hpp"

namespace vdk {
namespace {

namespace fs = std::filesystem;

MeshInstance instance(TriMesh mesh, Rgb color = Rgb(0.8, 0.2, 0.2), MeshRole role = MeshRole::Vessel) {
  MeshInstance inst;
  inst.mesh = std::make_shared<const TriMesh>(std::move(mesh));
  inst.color = color;
  inst.role = role;
  return inst;
}

Camera frontCamera(int size = 64) {
  Camera c;
  c.position = Vec3(0, 0, 100);
  c.lookAt = Vec3::Zero();
  c.up = Vec3::UnitY();
  c.verticalFov = 40;
  c.nearPlane = 10;
  c.farPlane = 190;
  c.width = c.height = size;
  return c;
}

TriMesh triangleAt(double z, double size) {
  return TriMesh({{-size, -size, z}, {size, -size, z}, {0, size, z}}, {{0, 1, 2}});
}

FragmentShader flatColor() {
  return [](const Fragment& f) { return withAlpha(f.mesh->color, 1.0); };
}

TEST(Camera, LinearDepthEndpoints) {
  const Camera c = frontCamera();
  EXPECT_EQ(c.linearDepth(c.nearPlane), 0.0);
  EXPECT_EQ(c.linearDepth(c.farPlane), 1.0);
  EXPECT_DOUBLE_EQ(c.linearDepth(0.5 * (c.nearPlane + c.farPlane)), 0.5);
  EXPECT_EQ(c.linearDepth(0.1), 0.0);
  EXPECT_EQ(c.linearDepth(1e9), 1.0);
}

TEST(Camera, ProjectAndRayAgree) {
  Camera c = frontCamera(200);
  c.position = Vec3(30, -20, 80);
  c.up = Vec3(0.1, 1, 0.2);
  const Vec3 p(3, 4, -5);
  const Vec3 s = c.project(p);
  const Vec3 dir = c.rayDirection(s.x(), s.y());
  EXPECT_LT(dir.cross((p - c.position).normalized()).norm(), 1e-12);
}

TEST(Camera, ValidateRejectsBadSetups) {
  Camera c = frontCamera();
  c.nearPlane = 0;
  EXPECT_THROW(c.validate(), Error);
  c = frontCamera();
  c.up = Vec3(0, 0, 1);
  EXPECT_THROW(c.validate(), Error);
  c = frontCamera();
  c.verticalFov = 180;
  EXPECT_THROW(c.validate(), Error);
}

TEST(Rasterize, NearTriangleWinsInEitherOrder) {
  for (bool swap : {false, true}) {
    Scene s;
    s.camera = frontCamera();
    MeshInstance nearRed = instance(triangleAt(10, 20), Rgb(1, 0, 0));
    MeshInstance farBlue = instance(triangleAt(-10, 25), Rgb(0, 0, 1));
    if (swap) {
      s.instances = {farBlue, nearRed};
    } else {
      s.instances = {nearRed, farBlue};
    }
    const FrameBuffer fb = rasterize(s, flatColor());
    const Rgba c = fb.color[fb.index(32, 32)];
    EXPECT_EQ(c, Rgba(1, 0, 0, 1));
  }
}

TEST(Rasterize, FullScreenQuadHasConstantDepth) {
  Scene s;
  s.camera = frontCamera(48);
  s.instances = {instance(primitives::gridPatch(1, 1, 400, 400).transformed(
      Eigen::Affine3d(Eigen::Translation3d(-200, -200, 0))))};
  const FrameBuffer fb = rasterize(s, flatColor());
  const double d0 = fb.depth[0];
  EXPECT_GT(d0, 0.0);
  EXPECT_LT(d0, 1.0);
  EXPECT_NEAR(d0, 0.5, 1e-12);
  for (std::size_t i = 0; i < fb.size(); ++i) {
    ASSERT_TRUE(fb.covered(i));
    EXPECT_NEAR(fb.depth[i], d0, 1e-12);
  }
}

TEST(Rasterize, SharedEdgesLeaveNoHoles) {
  // Fine grid whose vertices land on pixel centres and edges.
  Scene s;
  s.camera = frontCamera(64);
  s.instances = {instance(primitives::gridPatch(37, 29, 300, 300).transformed(
      Eigen::Affine3d(Eigen::AngleAxisd(0.3, Vec3::UnitZ()) * Eigen::Translation3d(-150, -150, 0))))};
  const FrameBuffer fb = rasterizeGeometry(s);
  for (int y = 0; y < 64; ++y) {
    for (int x = 0; x < 64; ++x) ASSERT_TRUE(fb.covered(x, y)) << x << "," << y;
  }
}

TEST(Rasterize, DeterministicAndOrderIndependent) {
  Scene a;
  a.camera = frontCamera(96);
  a.instances = {instance(primitives::icosphere(12, 3, Vec3(-8, 0, 0)), Rgb(1, 0.2, 0.1)),
                 instance(primitives::torus(14, 4, 48, 16), Rgb(0.1, 0.6, 0.9)),
                 instance(primitives::icosphere(6, 2, Vec3(10, 5, 8)), Rgb(0.3, 0.9, 0.2))};
  Scene b = a;
  std::reverse(b.instances.begin(), b.instances.end());
  auto shader = [&](const Fragment& f) { return withAlpha(f.mesh->color * (0.2 + 0.8 * f.normal.z()), 1.0); };
  const FrameBuffer f1 = rasterize(a, shader);
  const FrameBuffer f2 = rasterize(a, shader);
  const FrameBuffer f3 = rasterize(b, shader);
  EXPECT_EQ(f1.color, f2.color);
  EXPECT_EQ(f1.depth, f2.depth);
  EXPECT_EQ(f1.color, f3.color);
  EXPECT_EQ(f1.depth, f3.depth);
}

TEST(Rasterize, NearPlaneClippingKeepsDepthInRange) {
  Scene s;
  s.camera = frontCamera(64);
  // Triangle reaching from behind the camera to well in front of it.
  s.instances = {instance(TriMesh({{-30, -5, 150}, {30, -5, 150}, {0, -5, -50}}, {{0, 1, 2}}))};
  const FrameBuffer fb = rasterizeGeometry(s);
  int covered = 0;
  for (std::size_t i = 0; i < fb.size(); ++i) {
    if (!fb.covered(i)) continue;
    ++covered;
    EXPECT_GE(fb.viewDepth[i], s.camera.nearPlane * (1 - 1e-9));
    EXPECT_GE(fb.depth[i], 0.0);
    EXPECT_LE(fb.depth[i], 1.0);
  }
  EXPECT_GT(covered, 100);
}

TEST(Rasterize, EmptySceneThrows) {
  Scene s;
  s.camera = frontCamera();
  try {
    rasterizeGeometry(s);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::EmptyScene);
  }
}

TEST(Rasterize, EmptyPixelsKeepDefaults) {
  Scene s;
  s.camera = frontCamera(32);
  s.background = Rgb(0.2, 0.3, 0.4);
  s.instances = {instance(triangleAt(0, 5))};
  const FrameBuffer fb = rasterize(s, flatColor());
  EXPECT_FALSE(fb.covered(0, 0));
  EXPECT_EQ(fb.depth[0], 1.0);
  EXPECT_EQ(fb.objectMask[0], kNoObject);
  EXPECT_EQ(fb.color[0], Rgba(0.2, 0.3, 0.4, 1.0));
}

TEST(Rasterize, ResolutionDoublingKeepsSmoothShading) {
  Scene s;
  s.camera = frontCamera(128);
  s.instances = {instance(primitives::icosphere(30, 5))};
  const Vec3 light = Vec3(0.3, 0.4, 1).normalized();
  auto shader = [&](const Fragment& f) {
    return withAlpha(Rgb(0.9, 0.5, 0.3) * (0.15 + 0.85 * std::max(0.0, f.normal.dot(light))), 1.0);
  };
  const Image8 lo = toImage8(rasterize(s, shader));
  Scene hiScene = s;
  hiScene.camera = s.camera.withViewport(256, 256);
  const Image8 hi = toImage8(rasterize(hiScene, shader));
  int compared = 0;
  for (int y = 40; y < 88; y += 3) {
    for (int x = 40; x < 88; x += 3) {
      for (int k = 0; k < 3; ++k) {
        EXPECT_LE(std::abs(lo.pixel(x, y)[k] - hi.pixel(2 * x, 2 * y)[k]), 1) << x << "," << y;
      }
      ++compared;
    }
  }
  EXPECT_GT(compared, 200);
}

TEST(Pick, CentroidHitsTriangle) {
  Scene s;
  s.camera = frontCamera(64);
  s.instances = {instance(TriMesh({{-20, -20, 0}, {20, -20, 0}, {-20, 20, 0}}, {{0, 1, 2}}))};
  const Vec3 centroid = Vec3(-20.0 / 3.0, -20.0 / 3.0, 0);
  const Vec3 px = s.camera.project(centroid);
  const auto hit = pick(s, static_cast<int>(px.x()), static_cast<int>(px.y()));
  ASSERT_TRUE(hit);
  EXPECT_EQ(hit->instance, 0);
  EXPECT_EQ(hit->face, 0);
  // Nearest vertex from the pixel's actual hit point.
  int expected = 0;
  double best = 1e300;
  for (int k = 0; k < 3; ++k) {
    const double d = (s.instances[0].mesh->vertex(k) - hit->worldPosition).norm();
    if (d < best) {
      best = d;
      expected = k;
    }
  }
  EXPECT_EQ(hit->vertexIndex, expected);
  EXPECT_NEAR(hit->worldPosition.z(), 0.0, 1e-9);
  EXPECT_FALSE(pick(s, 63, 0).has_value());
}

TEST(Pick, StackedTrianglesReturnNearer) {
  Scene s;
  s.camera = frontCamera(64);
  s.instances = {instance(triangleAt(-10, 20)), instance(triangleAt(15, 20))};
  const auto hit = pick(s, 32, 32);
  ASSERT_TRUE(hit);
  EXPECT_EQ(hit->instance, 1);
  EXPECT_NEAR(hit->worldPosition.z(), 15.0, 1e-9);
}

TEST(Pick, AgreesWithDepthBuffer) {
  Scene s;
  s.camera = frontCamera(96);
  s.camera.position = Vec3(40, 30, 70);
  s.instances = {instance(primitives::torus(18, 6, 64, 24)), instance(primitives::icosphere(7, 3, Vec3(0, 0, 10)))};
  const FrameBuffer fb = rasterizeGeometry(s);
  std::mt19937_64 rng(3);
  int checked = 0;
  for (int i = 0; i < 4000 && checked < 400; ++i) {
    const int x = static_cast<int>(rng() % 96), y = static_cast<int>(rng() % 96);
    if (!fb.covered(x, y)) continue;
    const auto hit = pick(s, x, y);
    ASSERT_TRUE(hit) << x << "," << y;
    EXPECT_NEAR(hit->depth, fb.depth[fb.index(x, y)], 1e-5) << x << "," << y;
    ++checked;
  }
  EXPECT_EQ(checked, 400);
}

TEST(Shadow, SphereCastsDiscOfSameRadius) {
  Scene s;
  s.instances = {instance(primitives::icosphere(1.0, 5, Vec3(0, 0, 3)))};
  ShadowPlane plane;
  plane.origin = Vec3(-2, -2, 0);
  plane.extentU = plane.extentV = 4.0;
  plane.resolutionU = plane.resolutionV = 200;  // 0.02 mm cells
  const ShadowMask mask = shadowProject(s, plane);
  EXPECT_TRUE(mask.warnings.empty());
  int wrong = 0;
  for (int v = 0; v < 200; ++v) {
    for (int u = 0; u < 200; ++u) {
      const Vec3 c = plane.cellCenter(u, v);
      const double r = std::hypot(c.x(), c.y());
      const bool in = mask.at(u, v) != 0;
      if (std::abs(r - 1.0) > plane.cellU() && in != (r < 1.0)) ++wrong;
    }
  }
  EXPECT_EQ(wrong, 0);
  EXPECT_EQ(mask.componentCount(), 1);
}

TEST(Shadow, EmptySceneAndTwoLabels) {
  Scene empty;
  ShadowPlane plane;
  plane.origin = Vec3(-20, -20, -10);
  plane.extentU = plane.extentV = 40;
  plane.resolutionU = plane.resolutionV = 80;
  const ShadowMask none = shadowProject(empty, plane);
  EXPECT_TRUE(std::all_of(none.labels.begin(), none.labels.end(), [](int l) { return l == 0; }));

  Scene s;
  s.instances = {instance(primitives::icosphere(5, 3, Vec3(-8, 0, 0))),
                 instance(primitives::icosphere(3, 3, Vec3(9, 2, 4)), Rgb(1, 1, 0), MeshRole::Tumor)};
  const ShadowMask mask = shadowProject(s, plane);
  std::set<int> labels(mask.labels.begin(), mask.labels.end());
  EXPECT_EQ(labels, std::set<int>({0, 1, 2}));
  EXPECT_EQ(mask.componentCount(), 2);

  ShadowPlane cutting = plane;
  cutting.origin.z() = 1.0;
  EXPECT_FALSE(shadowProject(s, cutting).warnings.empty());
}

TEST(ImageIo, PngRoundTripWithText) {
  Image8 img;
  img.width = 5;
  img.height = 3;
  for (int i = 0; i < 15 * 4; ++i) img.rgba.push_back(static_cast<std::uint8_t>(i * 17));
  const auto bytes = encodePng(img, {{kSceneTextKey, "hash=abc;seed=7"}});
  PngText text;
  const Image8 back = decodePng(bytes, &text);
  EXPECT_EQ(back.width, 5);
  EXPECT_EQ(back.height, 3);
  EXPECT_EQ(back.rgba, img.rgba);
  EXPECT_EQ(text[kSceneTextKey], "hash=abc;seed=7");
  EXPECT_EQ(encodePng(img, {{kSceneTextKey, "hash=abc;seed=7"}}), bytes);
  EXPECT_THROW(decodePng(std::vector<std::uint8_t>(bytes.begin(), bytes.begin() + 40)), Error);
}

TEST(ImageIo, SrgbEncoding) {
  EXPECT_EQ(encodeSrgb8(0.0), 0);
  EXPECT_EQ(encodeSrgb8(1.0), 255);
  EXPECT_EQ(encodeSrgb8(2.0), 255);
  EXPECT_EQ(encodeSrgb8(-1.0), 0);
  EXPECT_EQ(encodeSrgb8(0.1), 89);
  EXPECT_EQ(encodeSrgb8(0.25), 137);
  for (int v = 0; v <= 255; ++v) EXPECT_EQ(encodeSrgb8(srgbToLinear(v / 255.0)), v);
}

TEST(ImageIo, FloatDumpRoundTrip) {
  FloatImage img;
  img.width = 3;
  img.height = 2;
  img.channels = 2;
  img.data = {0.f, 1.f, -2.5f, 3.25f, 1e-20f, 7.f, 8.f, 9.f, 10.f, 11.f, 12.f, 13.f};
  const fs::path p = fs::temp_directory_path() / "vdk_dump.f32";
  writeFloatDump(p, img);
  EXPECT_EQ(fs::file_size(p), 12u + 4u * 12u);
  const FloatImage back = readFloatDump(p);
  EXPECT_EQ(back.width, 3);
  EXPECT_EQ(back.height, 2);
  EXPECT_EQ(back.channels, 2);
  EXPECT_EQ(back.data, img.data);
}

}  // namespace
}  // namespace vdk
