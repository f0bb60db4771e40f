#include "vdk/mesh/mesh_io.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <cstring>
#include <fstream>
#include <sstream>

#include "vdk/core/error.hpp"

namespace vdk {
namespace {

std::string readFile(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IOError, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<std::string_view> splitWs(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    std::size_t j = i;
    while (j < line.size() && !std::isspace(static_cast<unsigned char>(line[j]))) ++j;
    if (j > i) out.push_back(line.substr(i, j - i));
    i = j;
  }
  return out;
}

double parseDouble(std::string_view tok, std::size_t lineNo) {
  // GCC 11 lacks floating-point from_chars on some targets; strtod is fine here.
  std::string s(tok);
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (end == s.c_str() || *end != '\0') {
    throw Error(ErrorCode::ParseError, "line " + std::to_string(lineNo) + ": bad number '" + s + "'");
  }
  return v;
}

long parseLong(std::string_view tok, std::size_t lineNo) {
  long v = 0;
  auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (ec != std::errc{} || ptr != tok.data() + tok.size()) {
    throw Error(ErrorCode::ParseError, "line " + std::to_string(lineNo) + ": bad index '" + std::string(tok) + "'");
  }
  return v;
}

void addPolygon(const std::vector<int>& poly, std::size_t lineNo, const MeshLoadOptions& options,
                std::vector<Face>& faces) {
  if (poly.size() < 3) {
    throw Error(ErrorCode::ParseError, "line " + std::to_string(lineNo) + ": face with fewer than 3 vertices");
  }
  if (poly.size() > 3 && !options.triangulate) {
    throw Error(ErrorCode::NonTriangulated,
                "line " + std::to_string(lineNo) + ": polygon with " + std::to_string(poly.size()) + " vertices");
  }
  for (std::size_t k = 1; k + 1 < poly.size(); ++k) faces.push_back({poly[0], poly[k], poly[k + 1]});
}

void noteNonManifold(const TriMesh& mesh, MeshLoadReport* report) {
  if (!report) return;
  if (const auto n = mesh.nonManifoldEdgeCount(); n > 0) {
    report->warnings.push_back(std::to_string(n) + " non-manifold edges");
  }
}

}  // namespace

TriMesh parseObj(std::string_view text, const MeshLoadOptions& options, MeshLoadReport* report) {
  std::vector<Vec3> vertices;
  std::vector<Face> faces;
  bool sawTexcoords = false;
  std::size_t lineNo = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t eol = text.find('\n', pos);
    if (eol == std::string_view::npos) eol = text.size();
    std::string_view line = text.substr(pos, eol - pos);
    pos = eol + 1;
    ++lineNo;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    const auto tok = splitWs(line);
    if (tok.empty()) continue;
    if (tok[0] == "v") {
      if (tok.size() < 4) throw Error(ErrorCode::ParseError, "line " + std::to_string(lineNo) + ": vertex needs 3 coordinates");
      vertices.emplace_back(parseDouble(tok[1], lineNo), parseDouble(tok[2], lineNo), parseDouble(tok[3], lineNo));
    } else if (tok[0] == "f") {
      std::vector<int> poly;
      for (std::size_t i = 1; i < tok.size(); ++i) {
        const auto slash = tok[i].find('/');
        const long raw = parseLong(tok[i].substr(0, slash), lineNo);
        const long idx = raw > 0 ? raw - 1 : static_cast<long>(vertices.size()) + raw;
        if (raw == 0 || idx < 0 || idx >= static_cast<long>(vertices.size())) {
          throw Error(ErrorCode::ParseError, "line " + std::to_string(lineNo) + ": vertex index out of range");
        }
        poly.push_back(static_cast<int>(idx));
      }
      addPolygon(poly, lineNo, options, faces);
    } else if (tok[0] == "vt") {
      sawTexcoords = true;
    }
    if (eol == text.size()) break;
  }
  if (sawTexcoords && report) report->warnings.push_back("texture coordinates ignored");
  if (vertices.empty()) throw Error(ErrorCode::ParseError, "no vertices");
  TriMesh mesh(std::move(vertices), std::move(faces));
  noteNonManifold(mesh, report);
  return mesh;
}

namespace {

struct PlyProperty {
  std::string name;
  std::string type;       // scalar type, or list item type
  std::string countType;  // non-empty for list properties
};

struct PlyElement {
  std::string name;
  std::size_t count = 0;
  std::vector<PlyProperty> props;
};

std::size_t plyTypeSize(const std::string& t) {
  if (t == "char" || t == "uchar" || t == "int8" || t == "uint8") return 1;
  if (t == "short" || t == "ushort" || t == "int16" || t == "uint16") return 2;
  if (t == "int" || t == "uint" || t == "float" || t == "int32" || t == "uint32" || t == "float32") return 4;
  if (t == "double" || t == "float64") return 8;
  throw Error(ErrorCode::ParseError, "unknown PLY type '" + t + "'");
}

double readBinary(const std::string& t, const char* p) {
  auto get = [p]<class T>(T) {
    T v;
    std::memcpy(&v, p, sizeof(T));
    return static_cast<double>(v);
  };
  static_assert(std::endian::native == std::endian::little, "binary PLY reader assumes little-endian host");
  if (t == "char" || t == "int8") return get(std::int8_t{});
  if (t == "uchar" || t == "uint8") return get(std::uint8_t{});
  if (t == "short" || t == "int16") return get(std::int16_t{});
  if (t == "ushort" || t == "uint16") return get(std::uint16_t{});
  if (t == "int" || t == "int32") return get(std::int32_t{});
  if (t == "uint" || t == "uint32") return get(std::uint32_t{});
  if (t == "float" || t == "float32") return get(float{});
  return get(double{});
}

}  // namespace

TriMesh parsePly(std::string_view bytes, const MeshLoadOptions& options, MeshLoadReport* report) {
  std::size_t pos = 0;
  auto nextLine = [&]() -> std::string_view {
    if (pos >= bytes.size()) throw Error(ErrorCode::ParseError, "unexpected end of PLY header");
    std::size_t eol = bytes.find('\n', pos);
    if (eol == std::string_view::npos) eol = bytes.size();
    std::string_view line = bytes.substr(pos, eol - pos);
    pos = eol + 1;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    return line;
  };
  if (nextLine() != "ply") throw Error(ErrorCode::ParseError, "missing 'ply' magic");
  std::string format;
  std::vector<PlyElement> elements;
  for (;;) {
    const auto tok = splitWs(nextLine());
    if (tok.empty() || tok[0] == "comment" || tok[0] == "obj_info") continue;
    if (tok[0] == "end_header") break;
    if (tok[0] == "format" && tok.size() >= 2) {
      format = tok[1];
    } else if (tok[0] == "element" && tok.size() == 3) {
      elements.push_back(PlyElement{std::string(tok[1]), static_cast<std::size_t>(parseLong(tok[2], 0)), {}});
    } else if (tok[0] == "property" && !elements.empty()) {
      if (tok.size() == 5 && tok[1] == "list") {
        elements.back().props.push_back({std::string(tok[4]), std::string(tok[3]), std::string(tok[2])});
      } else if (tok.size() == 3) {
        elements.back().props.push_back({std::string(tok[2]), std::string(tok[1]), {}});
      } else {
        throw Error(ErrorCode::ParseError, "malformed PLY property line");
      }
    } else {
      throw Error(ErrorCode::ParseError, "unexpected PLY header line '" + std::string(tok[0]) + "'");
    }
  }
  const bool ascii = format == "ascii";
  if (!ascii && format != "binary_little_endian") {
    throw Error(ErrorCode::ParseError, "unsupported PLY format '" + format + "'");
  }

  std::vector<Vec3> vertices;
  std::vector<Face> faces;
  std::vector<std::string_view> asciiTokens;
  std::size_t tokenIdx = 0;
  if (ascii) asciiTokens = splitWs(bytes.substr(pos));
  auto readValue = [&](const std::string& type) -> double {
    if (ascii) {
      if (tokenIdx >= asciiTokens.size()) throw Error(ErrorCode::ParseError, "PLY body truncated");
      return parseDouble(asciiTokens[tokenIdx++], 0);
    }
    const std::size_t sz = plyTypeSize(type);
    if (pos + sz > bytes.size()) throw Error(ErrorCode::ParseError, "PLY body truncated");
    const double v = readBinary(type, bytes.data() + pos);
    pos += sz;
    return v;
  };

  for (const auto& el : elements) {
    for (std::size_t i = 0; i < el.count; ++i) {
      Vec3 p = Vec3::Zero();
      std::vector<int> poly;
      for (const auto& prop : el.props) {
        if (!prop.countType.empty()) {
          const auto n = static_cast<std::size_t>(readValue(prop.countType));
          std::vector<int> items;
          for (std::size_t k = 0; k < n; ++k) items.push_back(static_cast<int>(readValue(prop.type)));
          if (el.name == "face" && (prop.name == "vertex_indices" || prop.name == "vertex_index")) poly = std::move(items);
        } else {
          const double v = readValue(prop.type);
          if (el.name == "vertex") {
            if (prop.name == "x") p.x() = v;
            if (prop.name == "y") p.y() = v;
            if (prop.name == "z") p.z() = v;
          }
        }
      }
      if (el.name == "vertex") vertices.push_back(p);
      if (el.name == "face") {
        for (int idx : poly) {
          if (idx < 0 || idx >= static_cast<int>(vertices.size())) {
            throw Error(ErrorCode::ParseError, "PLY face index out of range");
          }
        }
        addPolygon(poly, i, options, faces);
      }
    }
  }
  if (vertices.empty()) throw Error(ErrorCode::ParseError, "no vertices");
  TriMesh mesh(std::move(vertices), std::move(faces));
  noteNonManifold(mesh, report);
  return mesh;
}

TriMesh loadMesh(const std::filesystem::path& path, MeshFormat format, const MeshLoadOptions& options,
                 MeshLoadReport* report) {
  if (format == MeshFormat::Auto) {
    auto ext = path.extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
    if (ext == ".obj") format = MeshFormat::Obj;
    else if (ext == ".ply") format = MeshFormat::Ply;
    else throw Error(ErrorCode::ParseError, "cannot infer mesh format from '" + path.string() + "'");
  }
  const std::string data = readFile(path);
  return format == MeshFormat::Obj ? parseObj(data, options, report) : parsePly(data, options, report);
}

void saveObj(const TriMesh& mesh, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::IOError, "cannot write " + path.string());
  out.precision(17);
  for (const Vec3& p : mesh.vertices()) out << "v " << p.x() << ' ' << p.y() << ' ' << p.z() << '\n';
  for (const Face& f : mesh.faces()) out << "f " << f[0] + 1 << ' ' << f[1] + 1 << ' ' << f[2] + 1 << '\n';
}

void saveBinaryPly(const TriMesh& mesh, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::IOError, "cannot write " + path.string());
  out << "ply\nformat binary_little_endian 1.0\n"
      << "element vertex " << mesh.vertexCount() << "\nproperty double x\nproperty double y\nproperty double z\n"
      << "element face " << mesh.faceCount() << "\nproperty list uchar int vertex_indices\nend_header\n";
  for (const Vec3& p : mesh.vertices()) out.write(reinterpret_cast<const char*>(p.data()), 3 * sizeof(double));
  for (const Face& f : mesh.faces()) {
    const std::uint8_t n = 3;
    out.write(reinterpret_cast<const char*>(&n), 1);
    for (int i : f) {
      const std::int32_t v = i;
      out.write(reinterpret_cast<const char*>(&v), 4);
    }
  }
}

}  // namespace vdk
