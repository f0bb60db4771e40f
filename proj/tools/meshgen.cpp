#include <CLI11.hpp>
#include <iostream>
#include <nlohmann/json.hpp>

#include "vdk/mesh/mesh_io.hpp"
#include "vdk/scene/scene_file.hpp"

// Writes a built-in test mesh, e.g.
//   vdk_meshgen --generator '{"kind":"vesselTree","cell":1.2}' --out vessels.obj
int main(int argc, char** argv) {
  CLI::App app{"Generate a synthetic mesh"};
  std::string generator, out;
  app.add_option("--generator", generator, "Generator JSON {kind, ...}")->required();
  app.add_option("--out", out, "Output .obj or .ply")->required();
  CLI11_PARSE(app, argc, argv);
  try {
    const vdk::TriMesh mesh = vdk::generateMesh(nlohmann::json::parse(generator), "generator");
    if (out.ends_with(".ply")) {
      vdk::saveBinaryPly(mesh, out);
    } else {
      vdk::saveObj(mesh, out);
    }
    std::cout << out << ": " << mesh.vertexCount() << " vertices, " << mesh.faceCount() << " faces\n";
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
