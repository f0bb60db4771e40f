#include "vdk/scene/serve.hpp"

#include <condition_variable>
#include <deque>
#include <map>
#include <iostream>
#include <mutex>
#include <nlohmann/json.hpp>
#include <set>
#include <thread>

#include "vdk/core/error.hpp"
#include "vdk/mesh/mesh_io.hpp"
#include "vdk/render/pick.hpp"
#include "vdk/scene/batch.hpp"
#include "vdk/scene/registry.hpp"
#include "vdk/scene/render.hpp"

// After Eigen: <resolv.h> defines a _res macro that collides with Eigen.
#include <httplib.h>

namespace vdk {

using nlohmann::json;

namespace {

json vec(const Vec3& v) { return json::array({v.x(), v.y(), v.z()}); }

void sendError(httplib::Response& res, int status, const std::exception& e) {
  json body;
  body["error"] = e.what();
  if (const auto* err = dynamic_cast<const Error*>(&e)) body["code"] = std::string(toString(err->code()));
  if (const auto* s = dynamic_cast<const SchemaError*>(&e)) body["field"] = s->field();
  res.status = status;
  res.set_content(body.dump(), "application/json");
}

/// Maps library failures to HTTP statuses.
template <class F>
void guarded(httplib::Response& res, F&& f) {
  try {
    f();
  } catch (const SchemaError& e) {
    sendError(res, 400, e);
  } catch (const Error& e) {
    const int status = e.code() == ErrorCode::UnknownTechnique ? 400 : 500;
    sendError(res, status, e);
  } catch (const std::exception& e) {
    sendError(res, 500, e);
  }
}

int queryInt(const httplib::Request& req, const char* key) {
  if (!req.has_param(key)) return 0;
  const std::string v = req.get_param_value(key);
  try {
    const int n = std::stoi(v);
    if (n < 1 || n > 8192) throw std::out_of_range(v);
    return n;
  } catch (const std::exception&) {
    throw SchemaError(key, "expected an integer in [1, 8192]");
  }
}

json parseBody(const std::string& body) {
  try {
    return json::parse(body);
  } catch (const json::exception& e) {
    throw SchemaError("<root>", std::string("invalid JSON: ") + e.what());
  }
}

}  // namespace

struct Server::Impl {
  ServeOptions options;
  httplib::Server http;
  MeshCache cache;
  std::thread listener;
  int port = -1;

  // Endpoint jobs: one worker, one queued job per mesh at most.
  std::mutex jobMutex;
  std::condition_variable jobCv;
  std::deque<std::filesystem::path> jobs;
  std::set<std::string> pending;
  std::map<std::string, std::string> failed;
  bool stopping = false;
  bool busy = false;
  std::thread worker;

  explicit Impl(ServeOptions o) : options(std::move(o)) {
    worker = std::thread([this] { workLoop(); });
    routes();
  }

  ~Impl() {
    {
      std::lock_guard lock(jobMutex);
      stopping = true;
    }
    jobCv.notify_all();
    worker.join();
  }

  void workLoop() {
    std::unique_lock lock(jobMutex);
    while (true) {
      jobCv.wait(lock, [&] { return stopping || !jobs.empty(); });
      if (stopping) return;
      const std::filesystem::path mesh = jobs.front();
      jobs.pop_front();
      busy = true;
      lock.unlock();
      std::string error;
      try {
        updateEndpointCache(mesh, endpointCachePath(mesh));
      } catch (const std::exception& e) {
        error = e.what();
      }
      lock.lock();
      busy = false;
      pending.erase(mesh.string());
      if (!error.empty()) failed[mesh.string()] = error;
      jobCv.notify_all();
    }
  }

  /// Returns the job state for a mesh without a valid cache.
  std::string enqueue(const std::filesystem::path& mesh) {
    std::lock_guard lock(jobMutex);
    if (auto it = failed.find(mesh.string()); it != failed.end()) return "failed: " + it->second;
    if (pending.insert(mesh.string()).second) {
      jobs.push_back(mesh);
      jobCv.notify_all();
    }
    return "queued";
  }

  std::optional<std::filesystem::path> findMesh(const std::string& id) const {
    if (id.empty() || id.find('/') != std::string::npos || id.find("..") != std::string::npos) return std::nullopt;
    for (const char* ext : {".obj", ".ply", ".OBJ", ".PLY"}) {
      const auto p = options.meshDir / (id + ext);
      if (std::filesystem::is_regular_file(p)) return p;
    }
    return std::nullopt;
  }

  void routes() {
    http.Get("/api/health", [](const httplib::Request&, httplib::Response& res) {
      res.set_content(R"({"status":"ok"})", "application/json");
    });
    http.Get("/api/techniques", [](const httplib::Request&, httplib::Response& res) {
      res.set_content(registryJson().dump(), "application/json");
    });
    http.Post("/api/render", [this](const httplib::Request& req, httplib::Response& res) {
      guarded(res, [&] {
        const SceneSpec spec = parseScene(parseBody(req.body), options.meshDir);
        const RenderOutput out = renderScene(spec, cache, queryInt(req, "width"), queryInt(req, "height"));
        res.set_content(std::string(out.png.begin(), out.png.end()), "image/png");
      });
    });
    http.Post("/api/pick", [this](const httplib::Request& req, httplib::Response& res) {
      guarded(res, [&] {
        const json body = parseBody(req.body);
        if (!body.is_object()) throw SchemaError("<root>", "expected {scene, x, y}");
        for (const auto& [key, _] : body.items()) {
          if (key != "scene" && key != "x" && key != "y") throw SchemaError(key, "unknown field");
        }
        if (!body.contains("scene")) throw SchemaError("scene", "required");
        for (const char* k : {"x", "y"}) {
          if (!body.contains(k) || !body[k].is_number_integer()) throw SchemaError(k, "expected an integer pixel");
        }
        const SceneSpec spec = parseScene(body["scene"], options.meshDir);
        const PreparedScene prepared = prepareScene(spec, cache);
        const int x = body["x"], y = body["y"];
        const Camera& cam = prepared.scene.camera;
        if (x < 0 || y < 0 || x >= cam.width || y >= cam.height) throw SchemaError("x", "pixel outside the image");
        const auto hit = pick(prepared.scene, x, y);
        json out = nullptr;
        if (hit) {
          out = {{"vertexIndex", hit->vertexIndex},
                 {"worldPosition", vec(hit->worldPosition)},
                 {"mesh", hit->instance},
                 {"meshId", prepared.meshIds[static_cast<std::size_t>(hit->instance)]}};
        }
        res.set_content(out.dump(), "application/json");
      });
    });
    http.Get(R"(/api/mesh/([^/]+)/meta)", [this](const httplib::Request& req, httplib::Response& res) {
      guarded(res, [&] {
        const std::string id = req.matches[1];
        const auto path = findMesh(id);
        if (!path) {
          res.status = 404;
          res.set_content(json{{"error", "unknown mesh '" + id + "'"}}.dump(), "application/json");
          return;
        }
        MeshSpec ms;
        ms.path = *path;
        const auto mesh = cache.get(ms);
        const BoundingBox box = mesh->boundingBox();
        json out;
        out["id"] = id;
        out["vertexCount"] = mesh->vertexCount();
        out["faceCount"] = mesh->faceCount();
        out["bbox"] = {{"min", vec(box.min)}, {"max", vec(box.max)}};
        out["endpoints"] = nullptr;
        const auto cachePath = endpointCachePath(*path);
        bool valid = false;
        if (std::filesystem::exists(cachePath)) {
          try {
            const SkeletonResult r = loadEndpoints(cachePath, mesh.get());
            json anchors = json::array();
            for (int v : r.endpoints) anchors.push_back({{"vertexIndex", v}, {"worldPosition", vec(mesh->vertex(v))}});
            out["endpoints"] = {{"vertices", r.endpoints}, {"root", r.root}, {"anchors", anchors}};
            valid = true;
          } catch (const Error&) {
          }
        }
        out["endpointJob"] = valid ? "done" : enqueue(*path);
        res.set_content(out.dump(), "application/json");
      });
    });
  }
};

Server::Server(ServeOptions options) : impl_(std::make_unique<Impl>(std::move(options))) {}

Server::~Server() { stop(); }

int Server::bind(int port) {
  impl_->port = port == 0 ? impl_->http.bind_to_any_port(impl_->options.host)
                          : (impl_->http.bind_to_port(impl_->options.host, port) ? port : -1);
  if (impl_->port < 0) throw Error(ErrorCode::IOError, "cannot bind port " + std::to_string(port));
  return impl_->port;
}

void Server::run() { impl_->http.listen_after_bind(); }

int Server::start(int port) {
  const int bound = bind(port);
  impl_->listener = std::thread([this] { run(); });
  impl_->http.wait_until_ready();
  return bound;
}

void Server::stop() {
  if (!impl_) return;
  impl_->http.stop();
  if (impl_->listener.joinable()) impl_->listener.join();
}

void Server::waitForJobs() {
  std::unique_lock lock(impl_->jobMutex);
  impl_->jobCv.wait(lock, [&] { return impl_->jobs.empty() && !impl_->busy; });
}

}  // namespace vdk
