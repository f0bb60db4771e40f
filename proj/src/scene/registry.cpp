#include "vdk/scene/registry.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <sstream>

#include "vdk/core/error.hpp"

namespace vdk {

std::string toString(Flag flag) {
  switch (flag) {
    case Flag::No:
      return "no";
    case Flag::Yes:
      return "yes";
    case Flag::Partial:
      return "partial";
  }
  return "no";
}

const ParamSpec* TechniqueDescriptor::param(std::string_view n) const {
  for (const ParamSpec& p : params) {
    if (p.name == n) return &p;
  }
  return nullptr;
}

namespace {

constexpr Flag Y = Flag::Yes;
constexpr Flag N = Flag::No;
constexpr Flag P = Flag::Partial;

ParamSpec number(std::string name, double lo, double hi, double def, std::string description) {
  return {std::move(name), ParamType::Number, lo, hi, def, {}, std::move(description)};
}

ParamSpec integer(std::string name, int lo, int hi, int def, std::string description) {
  return {std::move(name), ParamType::Integer, static_cast<double>(lo), static_cast<double>(hi), def, {},
          std::move(description)};
}

ParamSpec boolean(std::string name, bool def, std::string description) {
  return {std::move(name), ParamType::Boolean, 0.0, 1.0, def, {}, std::move(description)};
}

ParamSpec choice(std::string name, std::vector<std::string> choices, std::string description) {
  const std::string def = choices.front();
  return {std::move(name), ParamType::Enum, 0.0, 0.0, def, std::move(choices), std::move(description)};
}

TechniqueDescriptor make(std::string id, std::string name, std::vector<ParamSpec> params, VisualCues cues,
                         PhaseFlags phase, DistanceFlags distance, Flag realtime) {
  return {std::move(id), std::move(name), std::move(params), cues, phase, distance, realtime};
}

std::vector<ParamSpec> phongParams() {
  return {number("shininess", 1, 512, 32, "specular exponent"),
          number("specular", 0, 1, 0.6, "specular intensity"),
          number("ambient", 0, 1, 0.1, "ambient fraction of the base colour")};
}

std::vector<TechniqueDescriptor> buildRegistry() {
  std::vector<TechniqueDescriptor> r;
  r.push_back(make("phong", "Phong", phongParams(), {Y, Y, N, N, N, N}, {Y, N}, {Y, N}, Y));
  r.push_back(make("toon", "Toon",
                   {integer("bands", 2, 16, 3, "diffuse levels"), number("shininess", 1, 512, 32, "specular exponent"),
                    number("rimAmount", 0, 1, 0.7, "rim where 1 - N.V exceeds this"),
                    number("rimThreshold", 0, 1, 0.1, "specular on above this")},
                   {Y, Y, N, N, N, N}, {Y, N}, {Y, N}, Y));
  r.push_back(make("fresnel", "Fresnel", {number("exponent", 0.1, 16, 3, "rim falloff exponent")}, {Y, Y, N, N, N, N},
                   {Y, N}, {Y, N}, Y));
  r.push_back(make("supporting-lines", "Supporting Lines",
                   {number("planeGap", 0, 1000, 10, "mm between the scene and the shadow plane"),
                    number("planeMargin", 0, 1000, 20, "mm of plane around the shadow footprint"),
                    number("shadowOpacity", 0, 1, 0.45, "darkening of shadowed plane cells"),
                    number("lineWidth", 0.5, 10, 1.5, "px")},
                   {Y, Y, N, N, N, Y}, {N, Y}, {Y, Y}, Y));
  r.push_back(make("supporting-anchors", "Supporting Anchors",
                   {number("radiusFactor", 0.1, 3, 0.6, "cylinder radius over the scene half diagonal"),
                    number("binDegrees", 1, 90, 10, "angular bin for thinning"),
                    number("arcDegrees", 1, 90, 14, "arc extent"),
                    number("cylinderOpacity", 0, 1, 0.6, "cylinder wall opacity"),
                    number("fogFalloff", 0.1, 16, 2, "cylinder depth fog exponent"),
                    number("lineWidth", 0.5, 10, 1.5, "px")},
                   {Y, N, N, P, N, Y}, {N, Y}, {Y, Y}, Y));
  r.push_back(make("concentric-circle-glyphs", "Concentric Circle Glyphs",
                   {number("baseSizeFraction", 0.005, 0.25, 0.04, "nearest glyph size over image height"),
                    number("proximityRange", 0, 10000, 0, "mm mapped to the full colour ramp; 0 = largest distance"),
                    number("emptyAlpha", 0, 1, 0.55, "opacity of unfilled rings")},
                   {Y, N, Y, N, N, P}, {N, Y}, {Y, Y}, Y));
  r.push_back(make("void-space", "Void Space Surfaces",
                   {integer("isolineCount", 0, 64, 10, "depth isolines in the void"),
                    number("reliefScale", 0, 100, 4, "relief height for shading"),
                    integer("maxContourPoints", 16, 1000000, 2048, "contour subsampling limit")},
                   {Y, N, Y, N, N, Y}, {N, Y}, {Y, N}, Y));
  r.push_back(make("arrow-glyphs", "Arrow Glyphs",
                   {number("maxLength", 1, 1000, 40, "mm"), number("switchingDistance", 0, 10000, 35, "mm"),
                    number("thickness", 0.1, 50, 1.6, "mm"), number("tickSpacing", 0.5, 1000, 20, "mm"),
                    number("denseSpacing", 0.5, 100, 4, "Poisson radius near the tumor, mm"),
                    number("sparseSpacing", 0.5, 100, 10, "Poisson radius elsewhere, mm")},
                   {N, N, Y, Y, N, Y}, {Y, Y}, {N, Y}, Y));
  r.push_back(make("heatmap", "Heatmaps", {number("heatRadius", 0.1, 10000, 30, "mm")}, {N, N, Y, N, Y, N}, {Y, Y},
                   {N, Y}, Y));
  r.push_back(make("isolines", "Isolines",
                   {number("isolineRadius", 0.1, 10000, 40, "mm"), integer("isolineCount", 1, 64, 4, "bands"),
                    number("isolineThickness", 0.05, 100, 1.5, "mm")},
                   {N, N, N, N, Y, N}, {Y, Y}, {N, Y}, Y));
  r.push_back(make("pseudo-chromadepth", "Pseudo-Chromadepth", {}, {Y, N, Y, N, Y, N}, {Y, N}, {Y, N}, Y));
  r.push_back(make("fog", "Fog", {number("fogFalloff", 0.01, 16, 2, "exponent of (1 - depth)")},
                   {Y, N, N, Y, Y, N}, {Y, N}, {Y, N}, Y));
  r.push_back(make("hatching", "Hatching",
                   {number("offset", 0, 10, 1, "mm along the normals"), number("spacing", 0.1, 50, 1.6, "mm"),
                    number("lineFraction", 0.05, 0.95, 0.4, "ink fraction of a period")},
                   {N, N, N, N, N, N}, {Y, N}, {Y, N}, Y));
  r.push_back(make("hatching-hz", "Hatching by H. and Z.",
                   {number("dSep", 2, 64, 6, "px between strokes"), number("dTestRatio", 0.1, 1, 0.5, "dTest / dSep"),
                    boolean("crossHatch", true, "second family in dark regions"),
                    number("toneScale", 0, 1, 0.8, "tone = 1 - toneScale * diffuse"),
                    number("contourWidth", 0.5, 8, 2, "px")},
                   {N, Y, N, N, N, N}, {Y, N}, {Y, N}, P));
  r.push_back(make("scalar-field", "Scalar field",
                   {choice("source", {"meanCurvature", "mesh", "height"}, "per-vertex values"),
                    choice("colormap", {"viridis", "heat", "diverging"}, "built-in ramp")},
                   {N, N, Y, N, Y, N}, {Y, Y}, {P, P}, Y));
  r.push_back(make("vector-field", "Vector fields",
                   {choice("field", {"illuminationGradient", "curvature"}, "convolved direction field"),
                    integer("halfLength", 0, 200, 15, "px"), integer("ssaoSamples", 0, 64, 16, "hemisphere samples"),
                    number("ssaoRadius", 0, 1, 0.05, "fraction of the bounding-sphere radius"),
                    number("contrast", 0, 10, 3, "texture gain"),
                    choice("lut", {"default", "neutral"}, "look-up table")},
                   {N, Y, N, N, Y, N}, {Y, Y}, {P, P}, Y));
  return r;
}

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) { return std::tolower(c); });
  return out;
}

}  // namespace

const std::vector<TechniqueDescriptor>& registry() {
  static const std::vector<TechniqueDescriptor> r = buildRegistry();
  return r;
}

const TechniqueDescriptor& descriptor(std::string_view nameOrId) {
  const std::string key = lower(nameOrId);
  for (const TechniqueDescriptor& t : registry()) {
    if (t.id == key || lower(t.name) == key) return t;
  }
  throw Error(ErrorCode::UnknownTechnique, "unknown technique '" + std::string(nameOrId) + "'");
}

nlohmann::json resolveParams(const TechniqueDescriptor& technique, const nlohmann::json& params,
                             const std::string& pathPrefix) {
  if (!params.is_null() && !params.is_object()) throw SchemaError(pathPrefix, "must be an object");
  nlohmann::json out = nlohmann::json::object();
  if (params.is_object()) {
    for (const auto& [key, value] : params.items()) {
      const std::string path = pathPrefix + "." + key;
      const ParamSpec* spec = technique.param(key);
      if (!spec) throw SchemaError(path, "unknown parameter for " + technique.id);
      switch (spec->type) {
        case ParamType::Number:
        case ParamType::Integer: {
          if (!value.is_number()) throw SchemaError(path, "must be a number");
          const double v = value.get<double>();
          if (!std::isfinite(v)) throw SchemaError(path, "must be finite");
          if (spec->type == ParamType::Integer && v != std::floor(v)) throw SchemaError(path, "must be an integer");
          if (v < spec->min || v > spec->max) {
            std::ostringstream msg;
            msg << "out of range [" << spec->min << ", " << spec->max << "]";
            throw SchemaError(path, msg.str());
          }
          out[key] = spec->type == ParamType::Integer ? nlohmann::json(static_cast<int>(v)) : nlohmann::json(v);
          break;
        }
        case ParamType::Boolean:
          if (!value.is_boolean()) throw SchemaError(path, "must be a boolean");
          out[key] = value;
          break;
        case ParamType::Enum:
          if (!value.is_string() ||
              std::find(spec->choices.begin(), spec->choices.end(), value.get<std::string>()) == spec->choices.end()) {
            std::string all;
            for (const auto& c : spec->choices) all += (all.empty() ? "" : ", ") + c;
            throw SchemaError(path, "must be one of " + all);
          }
          out[key] = value;
          break;
      }
    }
  }
  for (const ParamSpec& p : technique.params) {
    if (!out.contains(p.name)) out[p.name] = p.defaultValue;
  }
  return out;
}

namespace {

std::string typeName(ParamType t) {
  switch (t) {
    case ParamType::Number:
      return "number";
    case ParamType::Integer:
      return "integer";
    case ParamType::Boolean:
      return "boolean";
    case ParamType::Enum:
      return "enum";
  }
  return "number";
}

}  // namespace

nlohmann::json toJson(const TechniqueDescriptor& t) {
  nlohmann::json j;
  j["id"] = t.id;
  j["name"] = t.name;
  auto params = nlohmann::json::array();
  for (const ParamSpec& p : t.params) {
    nlohmann::json q{{"name", p.name}, {"type", typeName(p.type)}, {"default", p.defaultValue},
                     {"description", p.description}};
    if (p.type == ParamType::Number || p.type == ParamType::Integer) {
      q["min"] = p.min;
      q["max"] = p.max;
    }
    if (p.type == ParamType::Enum) q["choices"] = p.choices;
    params.push_back(std::move(q));
  }
  j["params"] = std::move(params);
  j["cues"] = {{"shading", toString(t.cues.shading)},
               {"shadow", toString(t.cues.shadow)},
               {"color", toString(t.cues.color)},
               {"transparency", toString(t.cues.transparency)},
               {"surface", toString(t.cues.surface)},
               {"voidSpace", toString(t.cues.voidSpace)}};
  j["phase"] = {{"preattentive", toString(t.phase.preattentive)}, {"attentive", toString(t.phase.attentive)}};
  j["distance"] = {{"egocentric", toString(t.distance.egocentric)}, {"exocentric", toString(t.distance.exocentric)}};
  j["realtime"] = toString(t.realtime);
  return j;
}

nlohmann::json registryJson() {
  auto out = nlohmann::json::array();
  for (const TechniqueDescriptor& t : registry()) out.push_back(toJson(t));
  return out;
}

std::string registryTable() {
  auto mark = [](Flag f) { return f == Flag::Yes ? "x" : f == Flag::Partial ? "o" : "."; };
  std::ostringstream out;
  char line[256];
  std::snprintf(line, sizeof line, "%-26s %-26s %s\n", "id", "name", "Sh Sd Co Tr Su Vo | Pre Att | Ego Exo | RT");
  out << line;
  for (const TechniqueDescriptor& t : registry()) {
    std::snprintf(line, sizeof line, "%-26s %-26s %s  %s  %s  %s  %s  %s  |  %s   %s  |  %s   %s  | %s\n", t.id.c_str(),
                  t.name.c_str(), mark(t.cues.shading), mark(t.cues.shadow), mark(t.cues.color),
                  mark(t.cues.transparency), mark(t.cues.surface), mark(t.cues.voidSpace), mark(t.phase.preattentive),
                  mark(t.phase.attentive), mark(t.distance.egocentric), mark(t.distance.exocentric), mark(t.realtime));
    out << line;
  }
  return out.str();
}

}  // namespace vdk
