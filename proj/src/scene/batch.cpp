#include "vdk/scene/batch.hpp"

#include <cstdio>
#include <algorithm>
#include <fstream>
#include <mutex>
#include <ostream>

#include "vdk/core/error.hpp"
#include "vdk/mesh/mesh_io.hpp"
#include "vdk/render/image_io.hpp"
#include "vdk/scene/render.hpp"
#include "vdk/skeleton/endpoint_job.hpp"

namespace vdk {

using nlohmann::json;

BatchManifest parseManifest(const json& doc, const std::filesystem::path& baseDir) {
  if (!doc.is_object()) throw SchemaError("<root>", "manifest must be an object");
  BatchManifest m;
  for (const auto& [key, value] : doc.items()) {
    if (key == "scenes") {
      if (!value.is_array() || value.empty()) throw SchemaError("scenes", "expected a non-empty array of paths");
      for (std::size_t i = 0; i < value.size(); ++i) {
        if (!value[i].is_string()) throw SchemaError("scenes[" + std::to_string(i) + "]", "expected a path");
        m.scenes.push_back(baseDir / value[i].get<std::string>());
      }
    } else if (key == "sweep") {
      if (!value.is_object()) throw SchemaError("sweep", "expected an object of value lists");
      for (const auto& [path, values] : value.items()) {
        std::vector<json> list;
        if (path == "technique.name" && values == "*") {
          for (const TechniqueDescriptor& t : registry()) list.emplace_back(t.id);
        } else if (values.is_array() && !values.empty()) {
          list.assign(values.begin(), values.end());
        } else {
          throw SchemaError("sweep." + path, "expected a non-empty array");
        }
        m.sweep.emplace_back(path, std::move(list));
      }
      // Technique changes reset params, so they apply before other overrides.
      std::stable_partition(m.sweep.begin(), m.sweep.end(), [](const auto& s) { return s.first == "technique.name"; });
    } else if (key == "width" || key == "height") {
      if (!value.is_number_integer() || value.get<int>() < 1 || value.get<int>() > 8192) {
        throw SchemaError(key, "expected an integer in [1, 8192]");
      }
      (key == "width" ? m.width : m.height) = value.get<int>();
    } else {
      throw SchemaError(key, "unknown field");
    }
  }
  if (m.scenes.empty()) throw SchemaError("scenes", "required");
  return m;
}

BatchManifest loadManifest(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IOError, "cannot open manifest " + path.string());
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::exception& e) {
    throw SchemaError("<root>", std::string("invalid JSON: ") + e.what());
  }
  return parseManifest(doc, path.parent_path());
}

std::size_t BatchReport::failures() const {
  std::size_t n = 0;
  for (const BatchRow& r : rows) n += r.ok() ? 0 : 1;
  return n;
}

void setDottedPath(json& doc, const std::string& path, const json& value) {
  json* node = &doc;
  std::size_t start = 0;
  while (true) {
    const std::size_t dot = path.find('.', start);
    const std::string part = path.substr(start, dot == std::string::npos ? std::string::npos : dot - start);
    if (part.empty()) throw SchemaError(path, "empty path segment");
    const bool index = node->is_array() && part.find_first_not_of("0123456789") == std::string::npos;
    json& next = index ? node->at(std::stoul(part)) : (*node)[part];
    if (dot == std::string::npos) {
      next = value;
      return;
    }
    node = &next;
    start = dot + 1;
  }
}

namespace {

json errorJson(const std::exception& e) {
  json j;
  j["message"] = e.what();
  if (const auto* err = dynamic_cast<const Error*>(&e)) j["code"] = std::string(toString(err->code()));
  if (const auto* s = dynamic_cast<const SchemaError*>(&e)) j["field"] = s->field();
  return j;
}

}  // namespace

BatchReport runBatch(const BatchManifest& manifest, const std::filesystem::path& outDir, MeshCache& cache,
                     std::ostream* log) {
  std::filesystem::create_directories(outDir);
  BatchReport report;
  std::size_t combos = 1;
  for (const auto& s : manifest.sweep) combos *= s.second.size();

  std::size_t counter = 0;
  for (const std::filesystem::path& scenePath : manifest.scenes) {
    json base;
    std::optional<json> loadErrorJson;
    try {
      std::ifstream in(scenePath);
      if (!in) throw Error(ErrorCode::IOError, "cannot open scene " + scenePath.string());
      base = json::parse(in);
    } catch (const json::exception& e) {
      loadErrorJson = errorJson(SchemaError("<root>", std::string("invalid JSON: ") + e.what()));
    } catch (const std::exception& e) {
      loadErrorJson = errorJson(e);
    }
    for (std::size_t c = 0; c < combos; ++c) {
      json overrides = json::object();
      std::size_t rest = c;
      for (auto it = manifest.sweep.rbegin(); it != manifest.sweep.rend(); ++it) {
        overrides[it->first] = it->second[rest % it->second.size()];
        rest /= it->second.size();
      }
      char name[32];
      std::snprintf(name, sizeof(name), "%04zu", counter++);
      const std::string file = std::string(name) + "_" + scenePath.stem().string() + ".png";

      BatchRow row;
      row.record["scene"] = scenePath.string();
      row.record["overrides"] = overrides;
      row.record["width"] = manifest.width;
      row.record["height"] = manifest.height;
      if (loadErrorJson) {
        row.record["error"] = *loadErrorJson;
        if (log) *log << "failed " << scenePath.string() << ": " << (*loadErrorJson)["message"].get<std::string>() << '\n';
        report.rows.push_back(std::move(row));
        continue;
      }
      try {
        json doc = base;
        for (const auto& [path, _] : manifest.sweep) {
          if (path == "technique.name") setDottedPath(doc, "technique.params", json::object());
          setDottedPath(doc, path, overrides[path]);
        }
        const SceneSpec spec = parseScene(doc, scenePath.parent_path());
        const RenderOutput out = renderScene(spec, cache, manifest.width, manifest.height);
        writeBytes(outDir / file, out.png);
        row.file = file;
        row.record["file"] = file;
        row.record["sceneHash"] = out.sceneHash;
        row.record["seed"] = out.seed;
        json layers = json::array();
        for (const LayerSpec& l : spec.layers) layers.push_back({{"technique", l.technique->id}, {"params", l.params}});
        row.record["layers"] = std::move(layers);
        row.record["width"] = out.image.width;
        row.record["height"] = out.image.height;
        if (log) *log << "rendered " << file << '\n';
      } catch (const std::exception& e) {
        row.record["error"] = errorJson(e);
        if (log) *log << "failed " << scenePath.string() << ' ' << overrides.dump() << ": " << e.what() << '\n';
      }
      report.rows.push_back(std::move(row));
    }
  }

  json index;
  index["rows"] = json::array();
  for (const BatchRow& r : report.rows) index["rows"].push_back(r.record);
  std::ofstream out(outDir / "index.json");
  if (!out) throw Error(ErrorCode::IOError, "cannot write index in " + outDir.string());
  out << index.dump(1) << '\n';
  return report;
}

EndpointCacheStatus updateEndpointCache(const std::filesystem::path& meshPath, const std::filesystem::path& out,
                                        std::ostream* log, SkeletonResult* result) {
  auto mesh = std::make_shared<const TriMesh>(loadMesh(meshPath));
  if (std::filesystem::exists(out)) {
    try {
      SkeletonResult cached = loadEndpoints(out, mesh.get());
      if (log) *log << "cache hit: " << out.string() << '\n';
      if (result) *result = std::move(cached);
      return EndpointCacheStatus::Hit;
    } catch (const Error& e) {
      if (log) *log << "cache invalid (" << e.what() << "), recomputing\n";
    }
  }
  std::mutex logMutex;
  ContractionProgress progress;
  if (log) {
    progress = [&](const ContractionIterationLog& it) {
      std::lock_guard lock(logMutex);
      *log << "iteration " << it.iteration << " volume " << it.volumeRatio << " residual " << it.residual
           << (it.accepted ? "" : " (rejected)") << '\n';
    };
  }
  EndpointJob job(mesh, {}, {}, progress);
  SkeletonResult r = job.wait();
  saveEndpoints(out, r);
  if (log) *log << "endpoints " << r.endpoints.size() << " root " << r.root << " -> " << out.string() << '\n';
  if (result) *result = std::move(r);
  return EndpointCacheStatus::Computed;
}

}  // namespace vdk
