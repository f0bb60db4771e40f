#include "vdk/scene/render.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <map>
#include <span>

#include "vdk/core/error.hpp"
#include "vdk/glyphs/arrow_glyphs.hpp"
#include "vdk/glyphs/circle_glyphs.hpp"
#include "vdk/glyphs/overlay.hpp"
#include "vdk/glyphs/void_space.hpp"
#include "vdk/hatching/overlay_hatch.hpp"
#include "vdk/hatching/pipeline.hpp"
#include "vdk/lic/pipeline.hpp"
#include "vdk/mesh/geometry.hpp"
#include "vdk/render/rasterizer.hpp"
#include "vdk/render/shadow.hpp"
#include "vdk/shading/colormap.hpp"
#include "vdk/shading/shading.hpp"
#include "vdk/skeleton/endpoints.hpp"

#ifndef VDK_DEFAULT_DATA_DIR
#define VDK_DEFAULT_DATA_DIR "data"
#endif

namespace vdk {

std::filesystem::path dataDirectory() {
  if (const char* env = std::getenv("VDK_DATA_DIR"); env && *env) return env;
  return VDK_DEFAULT_DATA_DIR;
}

std::filesystem::path endpointCachePath(const std::filesystem::path& meshPath) {
  return meshPath.string() + ".endpoints.json";
}

std::vector<int> farthestPointSamples(const TriMesh& mesh, int count) {
  const std::size_t n = mesh.vertexCount();
  std::vector<int> out;
  if (n == 0 || count <= 0) return out;
  Vec3 c = Vec3::Zero();
  for (std::size_t v = 0; v < n; ++v) c += mesh.vertex(static_cast<int>(v));
  c /= static_cast<double>(n);
  std::vector<double> dist(n);
  int first = 0;
  for (std::size_t v = 0; v < n; ++v) {
    dist[v] = (mesh.vertex(static_cast<int>(v)) - c).squaredNorm();
    if (dist[v] > dist[static_cast<std::size_t>(first)]) first = static_cast<int>(v);
  }
  out.push_back(first);
  std::fill(dist.begin(), dist.end(), std::numeric_limits<double>::infinity());
  while (static_cast<int>(out.size()) < std::min<int>(count, static_cast<int>(n))) {
    const Vec3 last = mesh.vertex(out.back());
    int best = 0;
    for (std::size_t v = 0; v < n; ++v) {
      dist[v] = std::min(dist[v], (mesh.vertex(static_cast<int>(v)) - last).squaredNorm());
      if (dist[v] > dist[static_cast<std::size_t>(best)]) best = static_cast<int>(v);
    }
    out.push_back(best);
  }
  return out;
}

namespace {
constexpr double kAnchorMergeDistance = 4.0;  // mm
}  // namespace

ResolvedAnchors resolveAnchors(const PreparedScene& prepared, int fallbackCount) {
  ResolvedAnchors r;
  const Scene& s = prepared.scene;
  if (prepared.anchors) {
    r.source = "scene";
    for (const AnchorRef& a : *prepared.anchors) {
      r.set.anchorVertices.push_back(a.vertex);
      r.set.worldPositions.push_back(s.instances[static_cast<std::size_t>(a.mesh)].mesh->vertex(a.vertex));
      r.instances.push_back(a.mesh);
    }
    return r;
  }
  int vessel = -1;
  for (std::size_t i = 0; i < s.instances.size(); ++i) {
    if (s.instances[i].role == MeshRole::Vessel) {
      vessel = static_cast<int>(i);
      break;
    }
  }
  if (vessel < 0) return r;
  const auto vi = static_cast<std::size_t>(vessel);
  const TriMesh& mesh = *s.instances[vi].mesh;
  std::vector<int> vertices;
  if (!prepared.meshPaths[vi].empty()) {
    const auto cache = endpointCachePath(prepared.meshPaths[vi]);
    if (std::filesystem::exists(cache)) {
      try {
        // Capsule-like tips can yield two endpoints a few mm apart; keep one.
        for (int v : loadEndpoints(cache, prepared.baseMeshes[vi].get()).endpoints) {
          const bool near = std::any_of(vertices.begin(), vertices.end(), [&](int u) {
            return (mesh.vertex(u) - mesh.vertex(v)).norm() < kAnchorMergeDistance;
          });
          if (!near) vertices.push_back(v);
        }
        r.source = "endpoints";
      } catch (const Error&) {
        vertices.clear();
      }
    }
  }
  if (vertices.empty()) {
    vertices = farthestPointSamples(mesh, fallbackCount);
    r.source = "sampled";
  }
  r.set = makeAnchorSet(mesh, vertices);
  r.instances.assign(r.set.size(), vessel);
  return r;
}

namespace {

using nlohmann::json;

double num(const json& p, const char* key) { return p.at(key).get<double>(); }
int count(const json& p, const char* key) { return p.at(key).get<int>(); }

bool isSurface(const std::string& id) {
  static const char* ids[] = {"phong",    "toon", "fresnel", "heatmap", "isolines", "pseudo-chromadepth",
                              "fog",      "scalar-field"};
  return std::find_if(std::begin(ids), std::end(ids), [&](const char* s) { return id == s; }) != std::end(ids);
}

bool isFullFrame(const std::string& id) { return id == "hatching-hz" || id == "vector-field"; }

DistanceParams distanceParams(const Scene& scene, const json& p) {
  DistanceParams d;
  d.tumorPositions = scene.tumorPositions;
  if (p.contains("heatRadius")) d.heatRadius = num(p, "heatRadius");
  if (p.contains("isolineRadius")) d.isolineRadius = num(p, "isolineRadius");
  if (p.contains("isolineCount")) d.isolineCount = count(p, "isolineCount");
  if (p.contains("isolineThickness")) d.isolineThickness = num(p, "isolineThickness");
  if (p.contains("fogFalloff")) d.fogFalloff = num(p, "fogFalloff");
  return d;
}

ShadingParams phongParams(const Rgb& base, const json& p) {
  ShadingParams sp;
  sp.baseColor = base;
  sp.shininess = num(p, "shininess");
  sp.specularColor = Rgb::Constant(num(p, "specular"));
  sp.ambientColor = num(p, "ambient") * base;
  return sp;
}

const json& defaultPhong() {
  static const json p = resolveParams(descriptor("phong"), json(), "technique.params");
  return p;
}

/// Per-instance scalar values in [0, 1] for the scalar-field technique.
std::vector<double> scalarValues(const MeshInstance& inst, const Scene& scene, const std::string& source) {
  std::vector<double> raw;
  if (source == "mesh") {
    if (inst.scalars.empty()) throw Error(ErrorCode::RenderError, "mesh '" + inst.name + "' has no scalars file");
    raw = inst.scalars;
  } else if (source == "height") {
    const Vec3 up = scene.camera.trueUp();
    for (std::size_t v = 0; v < inst.mesh->vertexCount(); ++v) raw.push_back(up.dot(inst.mesh->vertex(static_cast<int>(v))));
  } else {
    raw = estimateCurvature(*inst.mesh).meanCurvature;
  }
  // Robust range: 2nd to 98th percentile.
  std::vector<double> sorted = raw;
  std::sort(sorted.begin(), sorted.end());
  const auto at = [&](double q) { return sorted[static_cast<std::size_t>(q * (sorted.size() - 1))]; };
  std::pair<double, double> range(at(0.02), at(0.98));
  if (range.second <= range.first) return normalizeScalars(raw);
  return normalizeScalars(raw, nullptr, &range);
}

}  // namespace

FrameBuffer renderLayers(const PreparedScene& prepared) {
  const std::vector<LayerSpec>& layers = prepared.layers;
  for (std::size_t i = 1; i < layers.size(); ++i) {
    if (isFullFrame(layers[i].technique->id)) {
      throw SchemaError("layers[" + std::to_string(i - 1) + "].name",
                        layers[i].technique->id + " renders a full frame and must be the scene technique");
    }
  }
  Scene scene = prepared.scene;
  const Camera cam = scene.camera;
  const int originalInstances = static_cast<int>(scene.instances.size());

  // Shadow plane geometry joins the visibility pass when supporting lines are on.
  std::optional<ShadowPlane> plane;
  std::optional<ShadowMask> shadow;
  double shadowOpacity = 0.0;
  for (const LayerSpec& l : layers) {
    if (l.technique->id != "supporting-lines" || plane) continue;
    plane = fitShadowPlane(scene, Vec3::UnitY(), num(l.params, "planeGap"), num(l.params, "planeMargin"), 512);
    shadow = shadowProject(scene, *plane);
    shadowOpacity = num(l.params, "shadowOpacity");
    const Vec3 o = plane->origin, u = plane->uAxis * plane->extentU, v = plane->vAxis() * plane->extentV;
    MeshInstance ground;
    ground.name = "shadow-plane";
    ground.role = MeshRole::Organ;
    ground.color = Rgb(0.86, 0.86, 0.84);
    ground.mesh = std::make_shared<const TriMesh>(std::vector<Vec3>{o, o + u, o + u + v, o + v},
                                                  std::vector<Face>{{0, 1, 2}, {0, 2, 3}});
    scene.instances.push_back(std::move(ground));
  }

  FrameBuffer fb;
  std::size_t firstOverlay = 0;
  const std::string& first = layers.front().technique->id;
  if (first == "hatching-hz") {
    const json& p = layers.front().params;
    HatchParams hp;
    hp.streamlines.dSep = num(p, "dSep");
    hp.streamlines.dTestRatio = num(p, "dTestRatio");
    hp.streamlines.seed = scene.seed;
    hp.crossHatch = p.at("crossHatch").get<bool>();
    hp.toneScale = num(p, "toneScale");
    hp.contourWidth = num(p, "contourWidth");
    HatchPipeline pipeline(hp);
    fb = pipeline.render(scene);
    firstOverlay = 1;
  } else if (first == "vector-field") {
    const json& p = layers.front().params;
    LicParams lp;
    lp.field = p.at("field") == "curvature" ? LicFieldSource::Curvature : LicFieldSource::IlluminationGradient;
    lp.halfLength = count(p, "halfLength");
    lp.ssaoSamples = count(p, "ssaoSamples");
    lp.ssaoRadiusFraction = num(p, "ssaoRadius");
    lp.licContrast = num(p, "contrast");
    lp.lut = p.at("lut") == "neutral" ? neutralLut() : loadLut(dataDirectory() / "luts" / "default.json");
    fb = licPipeline(scene, lp).frame;
    firstOverlay = 1;
  } else {
    fb = rasterizeGeometry(scene);
    const auto [nearDepth, farDepth] = viewDepthRange(cam, prepared.scene.bounds());
    const Vec3 light = scene.keyLightDirection();
    std::vector<const LayerSpec*> surface;
    for (const LayerSpec& l : layers) {
      if (isSurface(l.technique->id)) surface.push_back(&l);
    }
    // Per-instance scalar fields are computed once per layer.
    std::map<std::pair<const LayerSpec*, int>, std::vector<double>> scalars;
    for (const LayerSpec* l : surface) {
      if (l->technique->id != "scalar-field") continue;
      for (int i = 0; i < originalInstances; ++i) {
        const MeshInstance& inst = scene.instances[static_cast<std::size_t>(i)];
        if (inst.role == MeshRole::Tumor) continue;
        scalars[{l, i}] = scalarValues(inst, scene, l->params.at("source").get<std::string>());
      }
    }
    std::map<const LayerSpec*, ColorMap> maps;
    for (const LayerSpec* l : surface) {
      if (l->technique->id == "scalar-field") maps.emplace(l, ColorMap::named(l->params.at("colormap")));
    }
    shadeFrameBuffer(fb, scene, [&](const Fragment& f) -> Rgba {
      const SurfaceSample ss{f.normal, f.viewDir, light};
      const Rgb base = f.mesh->color;
      if (f.instance >= originalInstances) {
        // Shadow plane: flat lit grey, darkened under casters.
        const Vec3 d = f.position - plane->origin;
        const int u = std::clamp(static_cast<int>(d.dot(plane->uAxis) / plane->cellU()), 0, plane->resolutionU - 1);
        const int v = std::clamp(static_cast<int>(d.dot(plane->vAxis()) / plane->cellV()), 0, plane->resolutionV - 1);
        const double k = shadow->at(u, v) != 0 ? 1.0 - shadowOpacity : 1.0;
        return withAlpha(base * k * (0.55 + 0.45 * std::max(0.0, f.normal.dot(light))), 1.0);
      }
      Rgba c = withAlpha(phong(ss, phongParams(base, defaultPhong())), 1.0);
      if (f.mesh->role == MeshRole::Tumor) return c;
      const double t = normalizedDepth(f.viewDepth, nearDepth, farDepth);
      for (const LayerSpec* l : surface) {
        const std::string& id = l->technique->id;
        const json& p = l->params;
        if (id == "phong") {
          c.head<3>() = phong(ss, phongParams(base, p));
        } else if (id == "toon") {
          ShadingParams sp;
          sp.baseColor = base;
          sp.ambientColor = 0.1 * base;
          sp.toonBands = count(p, "bands");
          sp.shininess = num(p, "shininess");
          sp.rimAmount = num(p, "rimAmount");
          sp.rimThreshold = num(p, "rimThreshold");
          c.head<3>() = toon(ss, sp);
        } else if (id == "fresnel") {
          ShadingParams sp;
          sp.baseColor = base;
          sp.fresnelExponent = num(p, "exponent");
          c.head<3>() = fresnel(ss, sp);
        } else if (id == "heatmap") {
          c.head<3>() = heatmap(f.position, Rgb(c.head<3>()), distanceParams(scene, p));
        } else if (id == "isolines") {
          c.head<3>() = isolines(f.position, Rgb(c.head<3>()), distanceParams(scene, p));
        } else if (id == "pseudo-chromadepth") {
          c.head<3>() = pseudoChromadepth(t, std::max(0.0, f.normal.dot(light)), DistanceParams{});
        } else if (id == "fog") {
          c.w() *= fogAlpha(t, num(p, "fogFalloff"));
        } else if (id == "scalar-field") {
          c.head<3>() = maps.at(l)(f.interpolate(std::span<const double>(scalars.at({l, f.instance}))));
        }
      }
      return c;
    });
  }

  std::optional<ResolvedAnchors> anchors;
  auto needAnchors = [&]() -> const ResolvedAnchors& {
    if (!anchors) anchors = resolveAnchors(prepared);
    if (anchors->set.size() == 0) throw Error(ErrorCode::RenderError, "no vessel mesh to place anchors on");
    return *anchors;
  };
  for (std::size_t li = firstOverlay; li < layers.size(); ++li) {
    const std::string& id = layers[li].technique->id;
    const json& p = layers[li].params;
    if (isSurface(id)) continue;
    OverlayPainter painter(fb, cam);
    if (id == "supporting-lines") {
      const auto lines = supportingLines(*plane, needAnchors().set.worldPositions);
      paintSupportingLines(painter, lines, Rgb(0.1, 0.1, 0.1), num(p, "lineWidth"));
    } else if (id == "supporting-anchors") {
      const AnchorCylinder cyl = fitAnchorCylinder(prepared.scene, num(p, "radiusFactor"));
      AnchorOptions ao;
      ao.binDegrees = num(p, "binDegrees");
      ao.arcDegrees = num(p, "arcDegrees");
      const auto placed = supportingAnchors(cyl, needAnchors().set, ao);
      CylinderStyle style;
      style.opacity = num(p, "cylinderOpacity");
      style.fogFalloff = num(p, "fogFalloff");
      paintAnchorCylinder(fb, cam, cyl, style);
      paintSupportingAnchors(painter, placed, Rgb(0.1, 0.1, 0.1), num(p, "lineWidth"));
    } else if (id == "concentric-circle-glyphs") {
      CircleGlyphOptions o;
      o.baseSizeFraction = num(p, "baseSizeFraction");
      o.proximityRange = num(p, "proximityRange");
      o.emptyAlpha = num(p, "emptyAlpha");
      paintCircleGlyphs(painter, concentricCircleGlyphs(cam, needAnchors().set, scene.tumorPositions, o), o);
    } else if (id == "void-space") {
      VoidSpaceParams vp;
      vp.isolineCount = count(p, "isolineCount");
      vp.reliefScale = num(p, "reliefScale");
      vp.maxContourPoints = count(p, "maxContourPoints");
      vp.lightDirection = cam.directionToView(scene.keyLightDirection());
      compositeVoidSpace(fb, voidSpaceSurfaces(fb, vp));
    } else if (id == "arrow-glyphs") {
      GlyphStyle style;
      style.maxLength = num(p, "maxLength");
      style.switchingDistance = num(p, "switchingDistance");
      style.thickness = num(p, "thickness");
      style.tickSpacing = num(p, "tickSpacing");
      style.denseSpacing = num(p, "denseSpacing");
      style.sparseSpacing = num(p, "sparseSpacing");
      style.validate();
      const Image8 texture = defaultArrowTexture();
      for (int i = 0; i < originalInstances; ++i) {
        const MeshInstance& inst = scene.instances[static_cast<std::size_t>(i)];
        if (inst.role != MeshRole::Vessel) continue;
        const auto samples = arrowSamplePoints(*inst.mesh, scene.tumorPositions, style, scene.seed + i);
        paintArrowGlyphs(painter, cam, arrowGlyphs(samples, scene.tumorPositions, style), texture);
      }
    } else if (id == "hatching") {
      OverlayHatchParams hp;
      hp.offset = num(p, "offset");
      hp.spacing = num(p, "spacing");
      hp.lineFraction = num(p, "lineFraction");
      std::vector<HatchOverlay> overlays;
      for (int i = 0; i < originalInstances; ++i) {
        const MeshInstance& inst = scene.instances[static_cast<std::size_t>(i)];
        if (inst.role == MeshRole::Tumor) continue;
        overlays.push_back(makeHatchOverlay(*inst.mesh, hp));
      }
      compositeHatchOverlay(fb, prepared.scene, overlays, hp);
    }
  }
  return fb;
}

void writeBytes(const std::filesystem::path& path, const std::vector<std::uint8_t>& bytes) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  const auto tmp = std::filesystem::path(path.string() + ".tmp");
  {
    std::ofstream out(tmp, std::ios::binary);
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw Error(ErrorCode::IOError, "cannot write " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

std::string sceneTextValue(const std::string& hash, std::uint64_t seed) {
  return "scene=" + hash + ";seed=" + std::to_string(seed);
}

RenderOutput renderScene(const SceneSpec& spec, MeshCache& cache, int width, int height) {
  RenderOutput out;
  try {
    const PreparedScene prepared = prepareScene(spec, cache, width, height);
    const FrameBuffer fb = renderLayers(prepared);
    out.image = toImage8(fb);
    out.sceneHash = prepared.hash;
    out.seed = spec.seed;
    out.png = encodePng(out.image, {{kSceneTextKey, sceneTextValue(out.sceneHash, out.seed)}});
  } catch (const SchemaError&) {
    throw;
  } catch (const Error& e) {
    if (e.code() == ErrorCode::UnknownTechnique || e.code() == ErrorCode::RenderError) throw;
    throw Error(ErrorCode::RenderError, e.what());
  } catch (const std::exception& e) {
    throw Error(ErrorCode::RenderError, e.what());
  }
  return out;
}

}  // namespace vdk
