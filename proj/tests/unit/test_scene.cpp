#include <gtest/gtest.h>
#include <unistd.h>

#include <filesystem>
#include <fstream>
#include <nlohmann/json.hpp>
#include <set>
#include <sstream>

#include "vdk/core/error.hpp"
#include "vdk/mesh/mesh_io.hpp"
#include "vdk/mesh/primitives.hpp"
#include "vdk/render/image_io.hpp"
#include "vdk/scene/batch.hpp"
#include "vdk/scene/registry.hpp"
#include "vdk/scene/render.hpp"
#include "vdk/scene/serve.hpp"

// After Eigen: <resolv.h> defines a _res macro that collides with Eigen.
#include <httplib.h>

namespace vdk {
namespace {

using nlohmann::json;
namespace fs = std::filesystem;

fs::path tempDir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("vdk_scene_" + name + "_" + std::to_string(::getpid()));
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

/// Small scene on generator meshes: a bent tube pair and a tumor sphere.
json smallScene(const std::string& technique, json params = json::object()) {
  return {
      {"schemaVersion", 1},
      {"meshes",
       json::array({
           {{"id", "vessel"},
            {"generator", {{"kind", "roundedTube"}, {"length", 60}, {"r0", 4}, {"r1", 3}}},
            {"role", "vessel"},
            {"transform", {{"translate", {-10, 0, -30}}}}},
           {{"id", "branch"},
            {"generator", {{"kind", "roundedTube"}, {"length", 40}, {"r0", 3}, {"r1", 2}}},
            {"role", "vessel"},
            {"transform", {{"translate", {-10, 0, 0}}, {"rotate", {{"axis", {0, 1, 0}}, {"degrees", 90}}}}}},
           {{"id", "tumor"},
            {"generator", {{"kind", "icosphere"}, {"radius", 5}, {"subdivisions", 2}}},
            {"role", "tumor"},
            {"transform", {{"translate", {8, 10, 0}}}}},
       })},
      {"camera", {{"width", 96}, {"height", 96}, {"elevationDeg", 25}, {"azimuthDeg", 20}}},
      {"technique", {{"name", technique}, {"params", std::move(params)}}},
      {"seed", 3},
  };
}

std::vector<std::uint8_t> renderBytes(const json& doc) {
  MeshCache cache;
  return renderScene(parseScene(doc, "."), cache).png;
}

template <class F>
std::string schemaField(F&& f) {
  try {
    f();
  } catch (const SchemaError& e) {
    return e.field();
  }
  return "<no error>";
}

// Registry

Flag parseFlag(const std::string& s) {
  if (s == "yes") return Flag::Yes;
  if (s == "partial") return Flag::Partial;
  EXPECT_EQ(s, "no");
  return Flag::No;
}

TEST(Registry, MatchesCheckedInTable) {
  std::ifstream in(fs::path(VDK_SOURCE_DIR) / "tests/data/technique_flags.tsv");
  ASSERT_TRUE(in);
  std::string line;
  std::getline(in, line);
  const auto& reg = registry();
  std::size_t row = 0;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::stringstream ss(line);
    for (std::string c; std::getline(ss, c, '\t');) cells.push_back(c);
    ASSERT_EQ(cells.size(), 12u) << line;
    ASSERT_LT(row, reg.size());
    const TechniqueDescriptor& t = reg[row++];
    EXPECT_EQ(t.name, cells[0]);
    const Flag flags[] = {t.cues.shading,     t.cues.shadow,    t.cues.color,         t.cues.transparency,
                          t.cues.surface,     t.cues.voidSpace, t.phase.preattentive, t.phase.attentive,
                          t.distance.egocentric, t.distance.exocentric, t.realtime};
    for (int k = 0; k < 11; ++k) EXPECT_EQ(flags[k], parseFlag(cells[static_cast<std::size_t>(k + 1)])) << t.name << " col " << k;
  }
  EXPECT_EQ(row, 16u);
  EXPECT_EQ(reg.size(), 16u);
}

TEST(Registry, DescriptorExamples) {
  EXPECT_EQ(descriptor("Pseudo-Chromadepth").cues.color, Flag::Yes);
  EXPECT_EQ(descriptor("Fog").distance.egocentric, Flag::Yes);
  EXPECT_EQ(descriptor("Fog").distance.exocentric, Flag::No);
  EXPECT_EQ(descriptor("Hatching by H. and Z.").realtime, Flag::Partial);
  const TechniqueDescriptor& phong = descriptor("phong");
  EXPECT_EQ(phong.cues.shading, Flag::Yes);
  EXPECT_EQ(phong.cues.shadow, Flag::Yes);
  EXPECT_EQ(phong.phase.preattentive, Flag::Yes);
  EXPECT_EQ(phong.distance.egocentric, Flag::Yes);
  const TechniqueDescriptor& arrows = descriptor("Arrow Glyphs");
  EXPECT_EQ(arrows.cues.color, Flag::Yes);
  EXPECT_EQ(arrows.cues.transparency, Flag::Yes);
  EXPECT_EQ(arrows.cues.voidSpace, Flag::Yes);
  EXPECT_EQ(arrows.distance.exocentric, Flag::Yes);
  EXPECT_THROW(descriptor("Gouraud"), Error);
}

TEST(Registry, JsonListsSchemas) {
  const json j = registryJson();
  ASSERT_EQ(j.size(), 16u);
  std::set<std::string> ids;
  for (const json& t : j) ids.insert(t.at("id").get<std::string>());
  EXPECT_EQ(ids.size(), 16u);
  EXPECT_NE(registryTable().find("Hatching by H. and Z."), std::string::npos);
}

TEST(Registry, ResolveParamsFillsDefaultsAndChecksRanges) {
  const json p = resolveParams(descriptor("fog"), json::object(), "technique.params");
  EXPECT_DOUBLE_EQ(p.at("fogFalloff").get<double>(), 2.0);
  EXPECT_EQ(schemaField([] { resolveParams(descriptor("fog"), {{"fogFalloff", -1}}, "technique.params"); }),
            "technique.params.fogFalloff");
  EXPECT_EQ(schemaField([] { resolveParams(descriptor("toon"), {{"bands", 2.5}}, "technique.params"); }),
            "technique.params.bands");
  EXPECT_EQ(schemaField([] { resolveParams(descriptor("phong"), {{"glow", 1}}, "technique.params"); }),
            "technique.params.glow");
}

// Scene schema

TEST(SceneSchema, FogFalloffOutOfRangeNamesField) {
  json doc = smallScene("fog", {{"fogFalloff", -1}});
  EXPECT_EQ(schemaField([&] { parseScene(doc, "."); }), "technique.params.fogFalloff");
}

TEST(SceneSchema, StrictFieldsAndPaths) {
  json doc = smallScene("phong");
  doc["extra"] = 1;
  EXPECT_EQ(schemaField([&] { parseScene(doc, "."); }), "extra");

  doc = smallScene("phong");
  doc["meshes"][1]["colour"] = {1, 0, 0};
  EXPECT_EQ(schemaField([&] { parseScene(doc, "."); }), "meshes[1].colour");

  doc = smallScene("phong");
  doc.erase("schemaVersion");
  EXPECT_EQ(schemaField([&] { parseScene(doc, "."); }), "schemaVersion");

  doc = smallScene("phong");
  doc["schemaVersion"] = 2;
  EXPECT_EQ(schemaField([&] { parseScene(doc, "."); }), "schemaVersion");

  doc = smallScene("phong");
  doc["meshes"][0]["role"] = "nerve";
  EXPECT_EQ(schemaField([&] { parseScene(doc, "."); }), "meshes[0].role");

  EXPECT_EQ(schemaField([] { parseSceneText("{ not json", "."); }), "<root>");
}

TEST(SceneSchema, UnknownTechnique) {
  try {
    parseScene(smallScene("gouraud"), ".");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::UnknownTechnique);
  }
}

TEST(SceneSchema, FullFrameTechniqueOnlyAsSceneTechnique) {
  json doc = smallScene("phong");
  doc["layers"] = json::array({{{"name", "hatching-hz"}}});
  MeshCache cache;
  const SceneSpec spec = parseScene(doc, ".");
  EXPECT_EQ(schemaField([&] { renderScene(spec, cache); }), "layers[0].name");
}

TEST(SceneSchema, DefaultTumorPositionIsTumorCentroid) {
  MeshCache cache;
  const PreparedScene p = prepareScene(parseScene(smallScene("phong"), "."), cache);
  ASSERT_EQ(p.scene.tumorPositions.size(), 1u);
  EXPECT_NEAR((p.scene.tumorPositions[0] - Vec3(8, 10, 0)).norm(), 0.0, 1e-9);
  EXPECT_EQ(p.scene.camera.width, 96);
}

// Render

TEST(SceneRender, DeterministicBytesAndMetadata) {
  const json doc = smallScene("phong");
  const auto a = renderBytes(doc);
  const auto b = renderBytes(doc);
  EXPECT_EQ(a, b);
  PngText text;
  const Image8 img = decodePng(a, &text);
  EXPECT_EQ(img.width, 96);
  ASSERT_TRUE(text.count(kSceneTextKey));
  EXPECT_EQ(text[kSceneTextKey].rfind("scene=", 0), 0u);
  EXPECT_NE(text[kSceneTextKey].find(";seed=3"), std::string::npos);

  json other = doc;
  other["seed"] = 4;
  PngText text2;
  decodePng(renderBytes(other), &text2);
  EXPECT_NE(text[kSceneTextKey], text2[kSceneTextKey]);
}

TEST(SceneRender, EveryTechniqueRenders) {
  MeshCache cache;
  const auto bg = renderScene(parseScene(smallScene("phong"), "."), cache).image;
  for (const TechniqueDescriptor& t : registry()) {
    SCOPED_TRACE(t.id);
    const RenderOutput out = renderScene(parseScene(smallScene(t.id), "."), cache);
    EXPECT_EQ(out.image.width, 96);
    EXPECT_FALSE(out.png.empty());
    if (t.id != "phong") {
      EXPECT_NE(out.image.rgba, bg.rgba) << "technique left the image unchanged";
    }
  }
}

TEST(SceneRender, LayersCompositeInListOrder) {
  json heat = smallScene("heatmap");
  json both = heat;
  both["layers"] = json::array({{{"name", "isolines"}}});
  EXPECT_NE(renderBytes(heat), renderBytes(both));
}

TEST(SceneRender, ScalarFieldFromMeshNeedsScalars) {
  MeshCache cache;
  const SceneSpec spec = parseScene(smallScene("scalar-field", {{"source", "mesh"}}), ".");
  try {
    renderScene(spec, cache);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::RenderError);
  }
}

TEST(SceneAnchors, SceneListThenCacheThenSampling) {
  const fs::path dir = tempDir("anchors");
  const TriMesh y = primitives::yBranch(20, 3, 1.2);
  saveObj(y, dir / "y.obj");
  json doc = smallScene("supporting-lines");
  doc["meshes"] = json::array({{{"path", "y.obj"}, {"role", "vessel"}}});
  MeshCache cache;

  PreparedScene p = prepareScene(parseScene(doc, dir), cache);
  ResolvedAnchors a = resolveAnchors(p);
  EXPECT_EQ(a.source, "sampled");
  EXPECT_EQ(a.set.size(), 8u);

  updateEndpointCache(dir / "y.obj", endpointCachePath(dir / "y.obj"));
  a = resolveAnchors(p);
  EXPECT_EQ(a.source, "endpoints");
  EXPECT_EQ(a.set.size(), 3u);

  doc["anchors"] = json::array({{{"mesh", 0}, {"vertex", 5}}});
  p = prepareScene(parseScene(doc, dir), cache);
  a = resolveAnchors(p);
  EXPECT_EQ(a.source, "scene");
  ASSERT_EQ(a.set.size(), 1u);
  EXPECT_EQ(a.set.anchorVertices[0], 5);

  doc["anchors"] = json::array({{{"mesh", 0}, {"vertex", 1 << 30}}});
  EXPECT_EQ(schemaField([&] { prepareScene(parseScene(doc, dir), cache); }), "anchors[0].vertex");
  fs::remove_all(dir);
}

TEST(SceneAnchors, FarthestPointSamplesSpread) {
  const TriMesh y = primitives::yBranch(20, 3, 1.2);
  const auto s = farthestPointSamples(y, 3);
  ASSERT_EQ(s.size(), 3u);
  for (std::size_t i = 0; i < 3; ++i) {
    for (std::size_t j = i + 1; j < 3; ++j) EXPECT_GT((y.vertex(s[i]) - y.vertex(s[j])).norm(), 30.0);
  }
}

// Endpoint cache command

TEST(EndpointCache, ComputeHitAndRecomputeOnEdit) {
  const fs::path dir = tempDir("endpoints");
  const fs::path mesh = dir / "y.obj", cache = dir / "y.endpoints.json";
  saveObj(primitives::yBranch(20, 3, 1.2), mesh);
  std::ostringstream log;
  SkeletonResult r;
  EXPECT_EQ(updateEndpointCache(mesh, cache, &log, &r), EndpointCacheStatus::Computed);
  EXPECT_EQ(r.endpoints.size(), 3u);
  EXPECT_GE(r.root, 0);
  EXPECT_NE(log.str().find("iteration"), std::string::npos);

  EXPECT_EQ(updateEndpointCache(mesh, cache), EndpointCacheStatus::Hit);

  saveObj(primitives::yBranch(22, 3, 1.2), mesh);
  EXPECT_EQ(updateEndpointCache(mesh, cache), EndpointCacheStatus::Computed);
  fs::remove_all(dir);
}

// Batch

void writeJson(const fs::path& p, const json& j) { std::ofstream(p) << j.dump(1); }

std::set<std::string> pngFiles(const fs::path& dir) {
  std::set<std::string> out;
  for (const auto& e : fs::directory_iterator(dir)) {
    if (e.path().extension() == ".png") out.insert(e.path().filename().string());
  }
  return out;
}

TEST(Batch, SweepProductAndIndexBijection) {
  const fs::path dir = tempDir("batch");
  writeJson(dir / "a.json", smallScene("fog"));
  json b = smallScene("fog");
  b["seed"] = 9;
  writeJson(dir / "b.json", b);
  writeJson(dir / "m.json", {{"scenes", {"a.json", "b.json"}},
                             {"sweep", {{"technique.params.fogFalloff", {0.5, 2, 8}}}},
                             {"width", 48},
                             {"height", 48}});
  MeshCache cache;
  const BatchReport r = runBatch(loadManifest(dir / "m.json"), dir / "out", cache);
  EXPECT_EQ(r.rows.size(), 6u);
  EXPECT_EQ(r.failures(), 0u);
  const auto files = pngFiles(dir / "out");
  EXPECT_EQ(files.size(), 6u);

  std::ifstream in(dir / "out/index.json");
  const json index = json::parse(in);
  ASSERT_EQ(index["rows"].size(), 6u);
  std::set<std::string> listed;
  std::set<double> falloffs;
  for (const json& row : index["rows"]) {
    listed.insert(row.at("file").get<std::string>());
    falloffs.insert(row["layers"][0]["params"]["fogFalloff"].get<double>());
    EXPECT_EQ(row["width"], 48);
  }
  EXPECT_EQ(listed, files);
  EXPECT_EQ(falloffs, (std::set<double>{0.5, 2, 8}));
  fs::remove_all(dir);
}

TEST(Batch, BrokenSceneRecordedAndCounted) {
  const fs::path dir = tempDir("batch_broken");
  json scenes = json::array();
  for (int i = 0; i < 6; ++i) {
    json s = smallScene("phong");
    s["seed"] = i;
    if (i == 4) s["camera"]["fovDeg"] = 500;
    const std::string name = "s" + std::to_string(i) + ".json";
    writeJson(dir / name, s);
    scenes.push_back(name);
  }
  writeJson(dir / "m.json", {{"scenes", scenes}, {"width", 32}, {"height", 32}});
  MeshCache cache;
  const BatchReport r = runBatch(loadManifest(dir / "m.json"), dir / "out", cache);
  EXPECT_EQ(r.rows.size(), 6u);
  EXPECT_EQ(r.failures(), 1u);
  EXPECT_EQ(pngFiles(dir / "out").size(), 5u);
  std::ifstream in(dir / "out/index.json");
  const json index = json::parse(in);
  int errors = 0;
  for (const json& row : index["rows"]) {
    if (row.contains("error")) {
      ++errors;
      EXPECT_EQ(row["error"]["field"], "camera.fovDeg");
      EXPECT_FALSE(row.contains("file"));
    }
  }
  EXPECT_EQ(errors, 1);
  fs::remove_all(dir);
}

TEST(Batch, AllTechniquesSweep) {
  const fs::path dir = tempDir("batch_all");
  writeJson(dir / "s.json", smallScene("fog", {{"fogFalloff", 4}}));
  writeJson(dir / "m.json", {{"scenes", {"s.json"}}, {"sweep", {{"technique.name", "*"}}}, {"width", 40}, {"height", 40}});
  MeshCache cache;
  const BatchReport r = runBatch(loadManifest(dir / "m.json"), dir / "out", cache);
  EXPECT_EQ(r.failures(), 0u);
  EXPECT_EQ(pngFiles(dir / "out").size(), 16u);
  fs::remove_all(dir);
}

TEST(Batch, ManifestValidation) {
  EXPECT_EQ(schemaField([] { parseManifest({{"scenes", {"a.json"}}, {"sweeps", {}}}, "."); }), "sweeps");
  EXPECT_EQ(schemaField([] { parseManifest({{"sweep", json::object()}}, "."); }), "scenes");
  EXPECT_EQ(schemaField([] { parseManifest({{"scenes", {"a.json"}}, {"sweep", {{"seed", json::array()}}}}, "."); }),
            "sweep.seed");
}

TEST(Batch, DottedPathSetsNestedValues) {
  json doc = {{"technique", {{"name", "fog"}}}, {"meshes", {{{"id", "a"}}}}};
  setDottedPath(doc, "technique.params.fogFalloff", 3);
  setDottedPath(doc, "meshes.0.id", "b");
  EXPECT_EQ(doc["technique"]["params"]["fogFalloff"], 3);
  EXPECT_EQ(doc["meshes"][0]["id"], "b");
}

// HTTP service

class ServeTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = tempDir("serve");
    saveObj(primitives::yBranch(20, 3, 1.2), dir_ / "ybranch.obj");
    ServeOptions o;
    o.meshDir = dir_;
    server_ = std::make_unique<Server>(o);
    port_ = server_->start(0);
    client_ = std::make_unique<httplib::Client>("127.0.0.1", port_);
  }
  void TearDown() override {
    server_->stop();
    server_->waitForJobs();
    server_.reset();
    fs::remove_all(dir_);
  }
  fs::path dir_;
  std::unique_ptr<Server> server_;
  std::unique_ptr<httplib::Client> client_;
  int port_ = 0;
};

TEST_F(ServeTest, HealthAndTechniques) {
  auto res = client_->Get("/api/health");
  ASSERT_TRUE(res);
  EXPECT_EQ(res->status, 200);
  res = client_->Get("/api/techniques");
  ASSERT_TRUE(res);
  EXPECT_EQ(res->status, 200);
  EXPECT_EQ(json::parse(res->body).size(), 16u);
}

TEST_F(ServeTest, RenderMatchesLibraryBytes) {
  const json doc = smallScene("phong");
  auto res = client_->Post("/api/render", doc.dump(), "application/json");
  ASSERT_TRUE(res);
  EXPECT_EQ(res->status, 200);
  EXPECT_EQ(res->get_header_value("Content-Type"), "image/png");
  const auto lib = renderBytes(doc);
  EXPECT_EQ(std::vector<std::uint8_t>(res->body.begin(), res->body.end()), lib);
  auto again = client_->Post("/api/render", doc.dump(), "application/json");
  ASSERT_TRUE(again);
  EXPECT_EQ(again->body, res->body);

  auto sized = client_->Post("/api/render?width=40&height=30", doc.dump(), "application/json");
  ASSERT_TRUE(sized);
  const Image8 img = decodePng(std::span<const std::uint8_t>(reinterpret_cast<const std::uint8_t*>(sized->body.data()),
                                                             sized->body.size()));
  EXPECT_EQ(img.width, 40);
  EXPECT_EQ(img.height, 30);
}

TEST_F(ServeTest, ErrorsMapToStatusCodes) {
  auto res = client_->Post("/api/render", smallScene("fog", {{"fogFalloff", -1}}).dump(), "application/json");
  ASSERT_TRUE(res);
  EXPECT_EQ(res->status, 400);
  EXPECT_EQ(json::parse(res->body)["field"], "technique.params.fogFalloff");

  res = client_->Post("/api/render", "{", "application/json");
  ASSERT_TRUE(res);
  EXPECT_EQ(res->status, 400);

  json unknown = smallScene("phong");
  unknown["meshes"] = json::array({{{"path", "missing.obj"}}});
  res = client_->Post("/api/render", unknown.dump(), "application/json");
  ASSERT_TRUE(res);
  EXPECT_EQ(res->status, 500);

  res = client_->Get("/api/mesh/nothing/meta");
  ASSERT_TRUE(res);
  EXPECT_EQ(res->status, 404);
}

TEST_F(ServeTest, PickBackgroundAndSurface) {
  const json scene = smallScene("phong");
  auto res = client_->Post("/api/pick", json{{"scene", scene}, {"x", 0}, {"y", 0}}.dump(), "application/json");
  ASSERT_TRUE(res);
  EXPECT_EQ(res->status, 200);
  EXPECT_TRUE(json::parse(res->body).is_null());

  // First covered pixel of the rendered frame must pick.
  MeshCache cache;
  const PreparedScene p = prepareScene(parseScene(scene, "."), cache);
  const FrameBuffer fb = renderLayers(p);
  int hx = -1, hy = -1;
  for (int y = 0; y < fb.height && hx < 0; ++y) {
    for (int x = 0; x < fb.width; ++x) {
      if (fb.covered(x, y) && fb.objectMask[fb.index(x, y)] == 0) {
        hx = x;
        hy = y;
        break;
      }
    }
  }
  ASSERT_GE(hx, 0);
  res = client_->Post("/api/pick", json{{"scene", scene}, {"x", hx}, {"y", hy}}.dump(), "application/json");
  ASSERT_TRUE(res);
  const json hit = json::parse(res->body);
  ASSERT_FALSE(hit.is_null());
  EXPECT_GE(hit["vertexIndex"].get<int>(), 0);
  EXPECT_EQ(hit["worldPosition"].size(), 3u);

  res = client_->Post("/api/pick", json{{"scene", scene}, {"x", 1000}, {"y", 0}}.dump(), "application/json");
  ASSERT_TRUE(res);
  EXPECT_EQ(res->status, 400);
}

TEST_F(ServeTest, MeshMetaQueuesEndpointJob) {
  auto res = client_->Get("/api/mesh/ybranch/meta");
  ASSERT_TRUE(res);
  ASSERT_EQ(res->status, 200);
  json meta = json::parse(res->body);
  EXPECT_GT(meta["vertexCount"].get<int>(), 0);
  EXPECT_EQ(meta["bbox"]["min"].size(), 3u);
  EXPECT_TRUE(meta["endpoints"].is_null());
  EXPECT_EQ(meta["endpointJob"], "queued");

  server_->waitForJobs();
  res = client_->Get("/api/mesh/ybranch/meta");
  ASSERT_TRUE(res);
  meta = json::parse(res->body);
  ASSERT_FALSE(meta["endpoints"].is_null());
  EXPECT_EQ(meta["endpoints"]["vertices"].size(), 3u);
  EXPECT_EQ(meta["endpointJob"], "done");
}

TEST_F(ServeTest, ConcurrentRendersAgree) {
  const std::string body = smallScene("toon").dump();
  std::vector<std::string> results(4);
  std::vector<std::thread> threads;
  for (int i = 0; i < 4; ++i) {
    threads.emplace_back([&, i] {
      httplib::Client c("127.0.0.1", port_);
      auto r = c.Post("/api/render", body, "application/json");
      if (r && r->status == 200) results[static_cast<std::size_t>(i)] = r->body;
    });
  }
  for (auto& t : threads) t.join();
  for (const auto& r : results) {
    EXPECT_FALSE(r.empty());
    EXPECT_EQ(r, results[0]);
  }
}

}  // namespace
}  // namespace vdk
