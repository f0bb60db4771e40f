#include "vdk/skeleton/endpoints.hpp"

#include <nlohmann/json.hpp>

#include <chrono>
#include <fstream>

#include "vdk/core/error.hpp"

namespace vdk {

double endpointAlignment(const TriMesh& mesh, std::span<const Vec3> contracted, int v, int rings) {
  Vec3 mean = Vec3::Zero();
  std::vector<Vec3> dirs;
  for (int u : kRing(mesh, v, rings)) {
    const Vec3 off = contracted[u] - contracted[v];
    const double len = off.norm();
    if (!(len > 0.0)) continue;
    mean += off;
    dirs.push_back(off / len);
  }
  const double mlen = mean.norm();
  if (dirs.empty() || !(mlen > 0.0)) return -1.0;
  const Vec3 d = mean / mlen;
  double lowest = 1.0;
  for (const Vec3& u : dirs) lowest = std::min(lowest, u.dot(d));
  return lowest;
}

std::vector<int> detectEndpoints(const TriMesh& mesh, std::span<const Vec3> contracted,
                                 const EndpointOptions& options) {
  if (contracted.size() != mesh.vertexCount()) {
    throw Error(ErrorCode::LengthMismatch, "contracted positions do not match the mesh vertex count");
  }
  std::vector<int> endpoints;
  for (int v = 0; v < static_cast<int>(mesh.vertexCount()); ++v) {
    if (endpointAlignment(mesh, contracted, v, options.vicinityRings) > options.minAlignment) endpoints.push_back(v);
  }
  return endpoints;
}

std::vector<int> detectEndpoints(const TriMesh& mesh, const ContractionState& contracted,
                                 const EndpointOptions& options) {
  return detectEndpoints(mesh, contracted.positions, options);
}

int selectRoot(const TriMesh& mesh, const CurvatureField& curvature, std::span<const int> endpoints) {
  if (endpoints.empty()) throw Error(ErrorCode::EmptyEndpoints, "no endpoints to select a root from");
  int best = -1;
  double bestValue = 0.0;
  for (int e : endpoints) {
    if (e < 0 || static_cast<std::size_t>(e) >= mesh.vertexCount()) {
      throw Error(ErrorCode::InvalidArgument, "endpoint index out of range");
    }
    const double h = std::abs(curvature.meanCurvature[e]);
    if (best < 0 || h < bestValue || (h == bestValue && e < best)) {
      best = e;
      bestValue = h;
    }
  }
  return best;
}

SkeletonResult computeSkeleton(const TriMesh& mesh, const ContractionOptions& options,
                               const EndpointOptions& endpointOptions, const ContractionProgress& progress,
                               std::stop_token stop) {
  const auto start = std::chrono::steady_clock::now();
  ContractionResult contraction = contractToSkeleton(mesh, options, progress, stop);
  if (contraction.stop == ContractionStop::Cancelled) throw Error(ErrorCode::Cancelled, "endpoint job cancelled");
  SkeletonResult result;
  result.meshHash = meshHash(mesh);
  result.endpoints = detectEndpoints(mesh, contraction.state, endpointOptions);
  if (!result.endpoints.empty()) result.root = selectRoot(mesh, estimateCurvature(mesh), result.endpoints);
  result.contractedPositions = std::move(contraction.state.positions);
  result.iterations = contraction.state.iteration;
  result.stop = contraction.stop;
  result.log = std::move(contraction.log);
  result.elapsedSeconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return result;
}

std::string toString(ContractionStop stop) {
  switch (stop) {
    case ContractionStop::VolumeConverged: return "volume-converged";
    case ContractionStop::ResidualExceeded: return "residual-exceeded";
    case ContractionStop::IterationCap: return "iteration-cap";
    case ContractionStop::Cancelled: return "cancelled";
  }
  return "unknown";
}

void saveEndpoints(const std::filesystem::path& path, const SkeletonResult& result) {
  nlohmann::json j;
  j["meshHash"] = result.meshHash;
  j["endpoints"] = result.endpoints;
  j["root"] = result.root;
  auto positions = nlohmann::json::array();
  for (const Vec3& p : result.contractedPositions) positions.push_back({p.x(), p.y(), p.z()});
  j["contractedPositions"] = std::move(positions);
  j["iterations"] = result.iterations;
  j["elapsedSeconds"] = result.elapsedSeconds;
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  const auto tmp = std::filesystem::path(path.string() + ".tmp");
  {
    std::ofstream out(tmp);
    if (!out) throw Error(ErrorCode::IOError, "cannot write " + tmp.string());
    out << j.dump(1) << '\n';
    if (!out) throw Error(ErrorCode::IOError, "write failed for " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

namespace {

const nlohmann::json& field(const nlohmann::json& j, const char* name) {
  auto it = j.find(name);
  if (it == j.end()) throw Error(ErrorCode::SchemaMismatch, std::string("endpoint cache is missing field '") + name + "'");
  return *it;
}

[[noreturn]] void badField(const char* name, const std::string& why) {
  throw Error(ErrorCode::SchemaMismatch, std::string("endpoint cache field '") + name + "' " + why);
}

}  // namespace

SkeletonResult loadEndpoints(const std::filesystem::path& path, const TriMesh* expectedMesh) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IOError, "cannot open " + path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::SchemaMismatch, std::string("endpoint cache is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw Error(ErrorCode::SchemaMismatch, "endpoint cache must be a JSON object");

  SkeletonResult r;
  const auto& hash = field(j, "meshHash");
  const auto& endpoints = field(j, "endpoints");
  const auto& root = field(j, "root");
  const auto& positions = field(j, "contractedPositions");
  const auto& iterations = field(j, "iterations");
  const auto& elapsed = field(j, "elapsedSeconds");
  if (!hash.is_string()) badField("meshHash", "must be a string");
  if (!endpoints.is_array()) badField("endpoints", "must be an array");
  if (!root.is_number_integer()) badField("root", "must be an integer");
  if (!positions.is_array()) badField("contractedPositions", "must be an array");
  if (!iterations.is_number_integer()) badField("iterations", "must be an integer");
  if (!elapsed.is_number()) badField("elapsedSeconds", "must be a number");

  r.meshHash = hash.get<std::string>();
  r.root = root.get<int>();
  r.iterations = iterations.get<int>();
  r.elapsedSeconds = elapsed.get<double>();
  r.contractedPositions.reserve(positions.size());
  for (const auto& p : positions) {
    if (!p.is_array() || p.size() != 3 || !p[0].is_number() || !p[1].is_number() || !p[2].is_number()) {
      badField("contractedPositions", "entries must be [x, y, z]");
    }
    r.contractedPositions.emplace_back(p[0].get<double>(), p[1].get<double>(), p[2].get<double>());
  }
  const auto n = static_cast<long long>(r.contractedPositions.size());
  for (const auto& e : endpoints) {
    if (!e.is_number_integer()) badField("endpoints", "entries must be integers");
    const long long idx = e.get<long long>();
    if (idx < 0 || idx >= n) badField("endpoints", "index " + std::to_string(idx) + " out of range");
    r.endpoints.push_back(static_cast<int>(idx));
  }
  if (r.endpoints.empty()) {
    if (r.root != -1) badField("root", "must be -1 when there are no endpoints");
  } else if (std::find(r.endpoints.begin(), r.endpoints.end(), r.root) == r.endpoints.end()) {
    badField("root", "is not one of the endpoints");
  }
  if (expectedMesh) {
    if (r.meshHash != meshHash(*expectedMesh)) badField("meshHash", "does not match the mesh");
    if (static_cast<std::size_t>(n) != expectedMesh->vertexCount()) {
      badField("contractedPositions", "length does not match the mesh vertex count");
    }
  }
  return r;
}

}  // namespace vdk
