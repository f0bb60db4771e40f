#pragma once

#include <filesystem>
#include <memory>
#include <string>

namespace vdk {

struct ServeOptions {
  std::string host = "127.0.0.1";
  std::filesystem::path meshDir = ".";  ///< mesh ids are file stems here; scene paths resolve here too
};

/// HTTP API:
///   GET  /api/techniques        registry as JSON
///   POST /api/render            scene JSON -> image/png (?width=&height=)
///   POST /api/pick              {scene, x, y} -> {vertexIndex, worldPosition, mesh} or null
///   GET  /api/mesh/{id}/meta    vertex count, bbox, cached endpoints (queues a job when absent)
///   GET  /api/health
/// SchemaError -> 400 with the field path, unknown mesh -> 404, other
/// failures -> 500.
class Server {
 public:
  explicit Server(ServeOptions options);
  ~Server();

  Server(const Server&) = delete;
  Server& operator=(const Server&) = delete;

  /// Binds to `port` (0 picks a free one) and returns the bound port.
  int bind(int port);
  /// Serves until stop(); blocks.
  void run();
  /// bind + run on a background thread; returns the bound port.
  int start(int port = 0);
  void stop();

  /// Blocks until queued endpoint jobs are done (tests).
  void waitForJobs();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace vdk
