#include "vdk/scene/scene_file.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "vdk/core/error.hpp"
#include "vdk/core/hash.hpp"
#include "vdk/mesh/mesh_io.hpp"
#include "vdk/mesh/primitives.hpp"
#include "vdk/shading/colormap.hpp"

namespace vdk {

namespace {

using nlohmann::json;

/// Strict object access: every key must be consumed, leftovers are errors.
class Fields {
 public:
  Fields(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j.is_object()) throw SchemaError(display(), "must be an object");
  }

  const json* optional(const std::string& key) {
    seen_.insert(key);
    auto it = j_.find(key);
    return it == j_.end() ? nullptr : &*it;
  }
  const json& required(const std::string& key) {
    const json* v = optional(key);
    if (!v) throw SchemaError(at(key), "required field missing");
    return *v;
  }
  void finish() const {
    for (const auto& [key, value] : j_.items()) {
      if (!seen_.count(key)) throw SchemaError(at(key), "unknown field");
    }
  }
  std::string at(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

 private:
  std::string display() const { return path_.empty() ? "<root>" : path_; }
  const json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

std::string index(const std::string& path, std::size_t i) { return path + "[" + std::to_string(i) + "]"; }

double number(const json& v, const std::string& path, double lo = -HUGE_VAL, double hi = HUGE_VAL) {
  if (!v.is_number()) throw SchemaError(path, "must be a number");
  const double x = v.get<double>();
  if (!std::isfinite(x)) throw SchemaError(path, "must be finite");
  if (x < lo || x > hi) {
    std::ostringstream msg;
    msg << "out of range [" << lo << ", " << hi << "]";
    throw SchemaError(path, msg.str());
  }
  return x;
}

int integer(const json& v, const std::string& path, int lo, int hi) {
  const double x = number(v, path, lo, hi);
  if (x != std::floor(x)) throw SchemaError(path, "must be an integer");
  return static_cast<int>(x);
}

std::string string(const json& v, const std::string& path) {
  if (!v.is_string()) throw SchemaError(path, "must be a string");
  return v.get<std::string>();
}

Vec3 vec3(const json& v, const std::string& path) {
  if (!v.is_array() || v.size() != 3) throw SchemaError(path, "must be an array of 3 numbers");
  return Vec3(number(v[0], index(path, 0)), number(v[1], index(path, 1)), number(v[2], index(path, 2)));
}

Rgb color(const json& v, const std::string& path) {
  if (!v.is_array() || v.size() != 3) throw SchemaError(path, "must be an array of 3 numbers in [0, 1]");
  return Rgb(number(v[0], index(path, 0), 0, 1), number(v[1], index(path, 1), 0, 1),
             number(v[2], index(path, 2), 0, 1));
}

Eigen::Affine3d transform(const json& v, const std::string& path) {
  if (v.is_array()) {
    if (v.size() != 16) throw SchemaError(path, "matrix must have 16 entries (row-major)");
    Eigen::Matrix4d m;
    for (int i = 0; i < 16; ++i) m(i / 4, i % 4) = number(v[static_cast<std::size_t>(i)], index(path, i));
    if (m.row(3) != Eigen::RowVector4d(0, 0, 0, 1)) throw SchemaError(path, "last row must be 0 0 0 1");
    Eigen::Affine3d a;
    a.matrix() = m;
    if (std::abs(a.linear().determinant()) < 1e-12) throw SchemaError(path, "matrix is singular");
    return a;
  }
  Fields f(v, path);
  Eigen::Affine3d a = Eigen::Affine3d::Identity();
  if (const json* t = f.optional("translate")) a.translate(vec3(*t, f.at("translate")));
  if (const json* r = f.optional("rotate")) {
    Fields rf(*r, f.at("rotate"));
    const Vec3 axis = vec3(rf.required("axis"), rf.at("axis"));
    if (axis.norm() < 1e-12) throw SchemaError(rf.at("axis"), "must be non-zero");
    const double deg = number(rf.required("degrees"), rf.at("degrees"));
    rf.finish();
    a.rotate(Eigen::AngleAxisd(degToRad(deg), axis.normalized()));
  }
  if (const json* s = f.optional("scale")) a.scale(number(*s, f.at("scale"), 1e-6, 1e6));
  f.finish();
  return a;
}

Rgb defaultColor(MeshRole role) {
  switch (role) {
    case MeshRole::Vessel:
      return Rgb(0.8, 0.1, 0.1);
    case MeshRole::Tumor:
      return Rgb(0.85, 0.75, 0.2);
    case MeshRole::Organ:
      return Rgb(0.7, 0.6, 0.55);
  }
  return Rgb(0.8, 0.1, 0.1);
}

MeshSpec parseMesh(const json& j, const std::string& path, std::size_t i, const std::filesystem::path& baseDir) {
  Fields f(j, path);
  MeshSpec m;
  m.id = "mesh" + std::to_string(i);
  if (const json* id = f.optional("id")) m.id = string(*id, f.at("id"));
  const json* file = f.optional("path");
  const json* gen = f.optional("generator");
  if ((file != nullptr) == (gen != nullptr)) throw SchemaError(path, "exactly one of path or generator is required");
  if (file) m.path = (baseDir / string(*file, f.at("path"))).lexically_normal();
  if (gen) {
    generateMesh(*gen, f.at("generator"));  // validate eagerly; the cache builds it once
    m.generator = *gen;
  }
  if (const json* role = f.optional("role")) {
    const std::string r = string(*role, f.at("role"));
    try {
      m.role = meshRoleFromString(r);
    } catch (const Error&) {
      throw SchemaError(f.at("role"), "must be vessel, tumor or organ");
    }
  }
  m.color = defaultColor(m.role);
  if (const json* c = f.optional("color")) m.color = color(*c, f.at("color"));
  if (const json* t = f.optional("transform")) m.transform = transform(*t, f.at("transform"));
  if (const json* s = f.optional("scalars")) m.scalars = (baseDir / string(*s, f.at("scalars"))).lexically_normal();
  f.finish();
  return m;
}

CameraSpec parseCamera(const json& j) {
  Fields f(j, "camera");
  CameraSpec c;
  if (const json* v = f.optional("position")) c.position = vec3(*v, f.at("position"));
  if (const json* v = f.optional("lookAt")) c.lookAt = vec3(*v, f.at("lookAt"));
  if (const json* v = f.optional("up")) c.camera.up = vec3(*v, f.at("up"));
  if (const json* v = f.optional("fovDeg")) c.camera.verticalFov = number(*v, f.at("fovDeg"), 1, 170);
  if (const json* v = f.optional("near")) {
    c.camera.nearPlane = number(*v, f.at("near"), 1e-6, 1e9);
    c.autoNear = false;
  }
  if (const json* v = f.optional("far")) {
    c.camera.farPlane = number(*v, f.at("far"), 1e-6, 1e9);
    c.autoFar = false;
  }
  if (const json* v = f.optional("width")) c.camera.width = integer(*v, f.at("width"), 1, 8192);
  if (const json* v = f.optional("height")) c.camera.height = integer(*v, f.at("height"), 1, 8192);
  if (const json* v = f.optional("azimuthDeg")) c.azimuthDeg = number(*v, f.at("azimuthDeg"));
  if (const json* v = f.optional("elevationDeg")) c.elevationDeg = number(*v, f.at("elevationDeg"), -89.9, 89.9);
  if (const json* v = f.optional("distanceFactor")) c.distanceFactor = number(*v, f.at("distanceFactor"), 0.01, 100);
  f.finish();
  if (c.camera.up.norm() < 1e-12) throw SchemaError("camera.up", "must be non-zero");
  if (!c.autoNear && !c.autoFar && c.camera.farPlane <= c.camera.nearPlane) {
    throw SchemaError("camera.far", "must exceed camera.near");
  }
  return c;
}

LayerSpec parseLayer(const json& j, const std::string& path) {
  Fields f(j, path);
  LayerSpec l;
  l.technique = &descriptor(string(f.required("name"), f.at("name")));
  const json* params = f.optional("params");
  l.params = resolveParams(*l.technique, params ? *params : json(), f.at("params"));
  f.finish();
  return l;
}

}  // namespace

SceneSpec parseScene(const json& document, const std::filesystem::path& baseDir) {
  Fields f(document, "");
  SceneSpec s;
  s.source = document;
  const int version = integer(f.required("schemaVersion"), "schemaVersion", 0, 1 << 30);
  if (version != kSceneSchemaVersion) {
    throw SchemaError("schemaVersion", "unsupported version " + std::to_string(version));
  }
  const json& meshes = f.required("meshes");
  if (!meshes.is_array() || meshes.empty()) throw SchemaError("meshes", "must be a non-empty array");
  std::set<std::string> ids;
  for (std::size_t i = 0; i < meshes.size(); ++i) {
    s.meshes.push_back(parseMesh(meshes[i], index("meshes", i), i, baseDir));
    if (!ids.insert(s.meshes.back().id).second) throw SchemaError(index("meshes", i) + ".id", "duplicate id");
  }
  s.camera = parseCamera(f.required("camera"));
  if (const json* lights = f.optional("lights")) {
    if (!lights->is_array()) throw SchemaError("lights", "must be an array");
    for (std::size_t i = 0; i < lights->size(); ++i) {
      Fields lf((*lights)[i], index("lights", i));
      Light l;
      l.direction = vec3(lf.required("direction"), lf.at("direction"));
      if (l.direction.norm() < 1e-12) throw SchemaError(lf.at("direction"), "must be non-zero");
      if (const json* cr = lf.optional("cameraRelative")) {
        if (!cr->is_boolean()) throw SchemaError(lf.at("cameraRelative"), "must be a boolean");
        l.cameraRelative = cr->get<bool>();
      }
      lf.finish();
      s.lights.push_back(l);
    }
  }
  if (const json* tumors = f.optional("tumorPositions")) {
    if (!tumors->is_array()) throw SchemaError("tumorPositions", "must be an array");
    std::vector<Vec3> t;
    for (std::size_t i = 0; i < tumors->size(); ++i) t.push_back(vec3((*tumors)[i], index("tumorPositions", i)));
    s.tumorPositions = std::move(t);
  }
  if (const json* anchors = f.optional("anchors")) {
    if (!anchors->is_array()) throw SchemaError("anchors", "must be an array");
    std::vector<AnchorRef> a;
    for (std::size_t i = 0; i < anchors->size(); ++i) {
      Fields af((*anchors)[i], index("anchors", i));
      AnchorRef r;
      if (const json* m = af.optional("mesh")) {
        r.mesh = integer(*m, af.at("mesh"), 0, static_cast<int>(s.meshes.size()) - 1);
      }
      r.vertex = integer(af.required("vertex"), af.at("vertex"), 0, std::numeric_limits<int>::max());
      af.finish();
      a.push_back(r);
    }
    s.anchors = std::move(a);
  }
  s.layers.push_back(parseLayer(f.required("technique"), "technique"));
  if (const json* layers = f.optional("layers")) {
    if (!layers->is_array()) throw SchemaError("layers", "must be an array");
    for (std::size_t i = 0; i < layers->size(); ++i) s.layers.push_back(parseLayer((*layers)[i], index("layers", i)));
  }
  if (const json* seed = f.optional("seed")) {
    if (!seed->is_number_unsigned() && !(seed->is_number_integer() && seed->get<std::int64_t>() >= 0)) {
      throw SchemaError("seed", "must be a non-negative integer");
    }
    s.seed = seed->get<std::uint64_t>();
  }
  if (const json* bg = f.optional("background")) s.background = color(*bg, "background");
  f.finish();
  return s;
}

SceneSpec parseSceneText(const std::string& text, const std::filesystem::path& baseDir) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw SchemaError("<root>", std::string("invalid JSON: ") + e.what());
  }
  return parseScene(j, baseDir);
}

SceneSpec loadSceneFile(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IOError, "cannot read scene " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parseSceneText(ss.str(), path.parent_path());
}

TriMesh generateMesh(const json& generator, const std::string& path) {
  Fields f(generator, path);
  const std::string kind = string(f.required("kind"), f.at("kind"));
  auto num = [&](const char* key, double def, double lo, double hi) {
    const json* v = f.optional(key);
    return v ? number(*v, f.at(key), lo, hi) : def;
  };
  auto count = [&](const char* key, int def, int lo, int hi) {
    const json* v = f.optional(key);
    return v ? integer(*v, f.at(key), lo, hi) : def;
  };
  TriMesh mesh;
  if (kind == "vesselTree") {
    const double cell = num("cell", 1.0, 0.25, 10);
    f.finish();
    mesh = primitives::vesselTree(cell);
  } else if (kind == "yBranch") {
    const double arm = num("armLength", 30, 1, 1000), radius = num("radius", 3, 0.1, 100);
    const double cell = num("cell", 0.5, 0.05, 10);
    f.finish();
    mesh = primitives::yBranch(arm, radius, cell);
  } else if (kind == "roundedTube") {
    const double length = num("length", 60, 0.1, 10000), r0 = num("r0", 4, 0.01, 1000), r1 = num("r1", 4, 0.01, 1000);
    const int segments = count("segments", 48, 3, 4096);
    const double step = num("profileStep", 1.0, 0.01, 100);
    f.finish();
    mesh = primitives::roundedTube(length, r0, r1, segments, step);
  } else if (kind == "icosphere") {
    const double radius = num("radius", 10, 1e-3, 1e5);
    const int subdivisions = count("subdivisions", 3, 0, 7);
    Vec3 center = Vec3::Zero();
    if (const json* c = f.optional("center")) center = vec3(*c, f.at("center"));
    f.finish();
    mesh = primitives::icosphere(radius, subdivisions, center);
  } else if (kind == "torus") {
    const double major = num("majorRadius", 20, 1e-3, 1e5), minor = num("minorRadius", 5, 1e-3, 1e5);
    const int ms = count("majorSegments", 96, 3, 4096), ns = count("minorSegments", 32, 3, 4096);
    f.finish();
    mesh = primitives::torus(major, minor, ms, ns);
  } else {
    throw SchemaError(f.at("kind"), "unknown generator '" + kind + "'");
  }
  return mesh;
}

std::shared_ptr<const TriMesh> MeshCache::get(const MeshSpec& spec) {
  std::string key;
  if (!spec.path.empty()) {
    std::error_code ec;
    const auto size = std::filesystem::file_size(spec.path, ec);
    if (ec) throw Error(ErrorCode::IOError, "cannot read mesh " + spec.path.string());
    const auto mtime = std::filesystem::last_write_time(spec.path, ec).time_since_epoch().count();
    key = "file:" + spec.path.string() + ":" + std::to_string(size) + ":" + std::to_string(mtime);
  } else {
    key = "gen:" + spec.generator.dump();
  }
  {
    std::lock_guard lock(mutex_);
    auto it = meshes_.find(key);
    if (it != meshes_.end()) return it->second;
  }
  auto mesh = std::make_shared<const TriMesh>(spec.path.empty() ? generateMesh(spec.generator, spec.id)
                                                                 : loadMesh(spec.path));
  std::lock_guard lock(mutex_);
  return meshes_.emplace(key, std::move(mesh)).first->second;
}

std::size_t MeshCache::size() const {
  std::lock_guard lock(mutex_);
  return meshes_.size();
}

PreparedScene prepareScene(const SceneSpec& spec, MeshCache& cache, int width, int height) {
  PreparedScene p;
  Scene& s = p.scene;
  ByteWriter hashInput;
  hashInput.bytes(spec.source.dump());
  for (std::size_t i = 0; i < spec.meshes.size(); ++i) {
    const MeshSpec& m = spec.meshes[i];
    auto base = cache.get(m);
    MeshInstance inst;
    inst.name = m.id;
    inst.role = m.role;
    inst.color = m.color;
    inst.mesh = m.transform.matrix().isIdentity(0.0) ? base
                                                     : std::make_shared<const TriMesh>(base->transformed(m.transform));
    if (!m.scalars.empty()) {
      const std::string where = "meshes[" + std::to_string(i) + "].scalars";
      try {
        inst.scalars = loadScalarField(m.scalars, inst.mesh->vertexCount()).values;
      } catch (const Error& e) {
        throw SchemaError(where, e.what());
      }
    }
    hashInput.bytes(meshHash(*inst.mesh));
    s.instances.push_back(std::move(inst));
    p.meshIds.push_back(m.id);
    p.meshPaths.push_back(m.path);
    p.baseMeshes.push_back(base);
  }
  if (spec.tumorPositions) {
    s.tumorPositions = *spec.tumorPositions;
  } else {
    for (const MeshInstance& inst : s.instances) {
      if (inst.role != MeshRole::Tumor || inst.mesh->vertexCount() == 0) continue;
      Vec3 c = Vec3::Zero();
      for (std::size_t v = 0; v < inst.mesh->vertexCount(); ++v) c += inst.mesh->vertex(static_cast<int>(v));
      s.tumorPositions.push_back(c / static_cast<double>(inst.mesh->vertexCount()));
    }
  }
  s.lights = spec.lights;
  s.seed = spec.seed;
  s.background = spec.background;

  const CameraSpec& cs = spec.camera;
  Camera cam = cs.camera;
  if (width > 0) cam.width = width;
  if (height > 0) cam.height = height;
  const BoundingBox box = s.bounds();
  const double diag = box.extent().norm();
  cam.lookAt = cs.lookAt.value_or(box.center());
  if (cs.position) {
    cam.position = *cs.position;
  } else {
    const double az = degToRad(cs.azimuthDeg), el = degToRad(cs.elevationDeg);
    const Vec3 dir(std::cos(el) * std::sin(az), std::sin(el), std::cos(el) * std::cos(az));
    // Fit the bounding sphere inside the narrower field of view.
    const double tanV = std::tan(0.5 * degToRad(cam.verticalFov));
    const double tanMin = std::min(tanV, tanV * cam.width / static_cast<double>(cam.height));
    const double sinHalf = tanMin / std::sqrt(1.0 + tanMin * tanMin);
    cam.position = cam.lookAt + cs.distanceFactor * (0.5 * diag / sinHalf) * dir;
  }
  const double centre = (box.center() - cam.position).norm();
  if (cs.autoNear) cam.nearPlane = std::max(1e-3 * std::max(diag, 1.0), centre - diag);
  if (cs.autoFar) cam.farPlane = std::max(cam.nearPlane * 1.001, centre + diag);
  if (cam.farPlane <= cam.nearPlane) throw SchemaError("camera.far", "must exceed camera.near");
  if ((cam.lookAt - cam.position).norm() < 1e-9) throw SchemaError("camera.position", "coincides with lookAt");
  if ((cam.lookAt - cam.position).normalized().cross(cam.up.normalized()).norm() < 1e-9) {
    throw SchemaError("camera.up", "parallel to the view direction");
  }
  s.camera = cam;
  p.layers = spec.layers;
  p.anchors = spec.anchors;
  if (p.anchors) {
    for (std::size_t i = 0; i < p.anchors->size(); ++i) {
      const AnchorRef& a = (*p.anchors)[i];
      if (a.vertex >= static_cast<int>(s.instances[static_cast<std::size_t>(a.mesh)].mesh->vertexCount())) {
        throw SchemaError("anchors[" + std::to_string(i) + "].vertex", "out of range");
      }
    }
  }
  hashInput.u32(static_cast<std::uint32_t>(cam.width));
  hashInput.u32(static_cast<std::uint32_t>(cam.height));
  p.hash = sha256Hex(std::span<const std::uint8_t>(hashInput.data()));
  return p;
}

}  // namespace vdk
