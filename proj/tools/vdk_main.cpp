#include <CLI11.hpp>
#include <csignal>
#include <iostream>

#include "vdk/core/error.hpp"
#include "vdk/scene/batch.hpp"
#include "vdk/scene/registry.hpp"
#include "vdk/scene/render.hpp"
#include "vdk/scene/serve.hpp"

namespace {

int report(const std::exception& e) {
  std::cerr << "error: " << e.what() << '\n';
  if (const auto* s = dynamic_cast<const vdk::SchemaError*>(&e)) std::cerr << "field: " << s->field() << '\n';
  return 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Distance-encoding vessel renderer"};
  app.require_subcommand(1);

  std::string scene, out, manifest, outDir, mesh, format = "table", meshDir = ".";
  int width = 0, height = 0, port = 8080;

  auto* render = app.add_subcommand("render", "Render a scene file to PNG");
  render->add_option("--scene", scene, "Scene JSON")->required();
  render->add_option("--out", out, "Output PNG")->required();
  render->add_option("--width", width, "Width in pixels (default: scene camera)")->check(CLI::Range(1, 8192));
  render->add_option("--height", height, "Height in pixels (default: scene camera)")->check(CLI::Range(1, 8192));

  auto* batch = app.add_subcommand("batch", "Render a manifest of scenes and parameter sweeps");
  batch->add_option("--manifest", manifest, "Manifest JSON")->required();
  batch->add_option("--out-dir", outDir, "Output directory")->required();

  auto* endpoints = app.add_subcommand("endpoints", "Compute and cache skeleton endpoints of a mesh");
  endpoints->add_option("--mesh", mesh, "Mesh file (OBJ/PLY)")->required();
  endpoints->add_option("--out", out, "Cache file (default: <mesh>.endpoints.json)");

  auto* reg = app.add_subcommand("registry", "Print the technique registry");
  reg->add_option("--format", format, "json or table")->check(CLI::IsMember({"json", "table"}));

  auto* serve = app.add_subcommand("serve", "Run the HTTP API");
  serve->add_option("--port", port, "Port")->check(CLI::Range(0, 65535));
  serve->add_option("--mesh-dir", meshDir, "Mesh directory");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*render) {
      vdk::MeshCache cache;
      const vdk::RenderOutput result = vdk::renderScene(vdk::loadSceneFile(scene), cache, width, height);
      vdk::writeBytes(out, result.png);
      std::cout << out << " scene=" << result.sceneHash << " seed=" << result.seed << '\n';
    } else if (*batch) {
      vdk::MeshCache cache;
      const vdk::BatchReport r = vdk::runBatch(vdk::loadManifest(manifest), outDir, cache, &std::cout);
      std::cout << r.rows.size() - r.failures() << " rendered, " << r.failures() << " failed\n";
      return r.failures() == 0 ? 0 : 2;
    } else if (*endpoints) {
      const std::string target = out.empty() ? vdk::endpointCachePath(mesh).string() : out;
      vdk::updateEndpointCache(mesh, target, &std::cout);
    } else if (*reg) {
      if (format == "json") {
        std::cout << vdk::registryJson().dump(2) << '\n';
      } else {
        std::cout << vdk::registryTable();
      }
    } else if (*serve) {
      vdk::ServeOptions options;
      options.meshDir = meshDir;
      vdk::Server server(options);
      const int bound = server.bind(port);
      std::cout << "listening on http://" << options.host << ':' << bound << '\n' << std::flush;
      server.run();
    }
  } catch (const std::exception& e) {
    return report(e);
  }
  return 0;
}
