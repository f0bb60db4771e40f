#pragma once

#include <nlohmann/json.hpp>
#include <string>
#include <string_view>
#include <vector>

namespace vdk {

enum class Flag { No, Yes, Partial };

std::string toString(Flag flag);

enum class ParamType { Number, Integer, Boolean, Enum };

struct ParamSpec {
  std::string name;
  ParamType type = ParamType::Number;
  double min = 0.0;
  double max = 0.0;
  nlohmann::json defaultValue;
  std::vector<std::string> choices;  ///< Enum only
  std::string description;
};

struct VisualCues {
  Flag shading = Flag::No;
  Flag shadow = Flag::No;
  Flag color = Flag::No;
  Flag transparency = Flag::No;
  Flag surface = Flag::No;
  Flag voidSpace = Flag::No;
};

struct PhaseFlags {
  Flag preattentive = Flag::No;
  Flag attentive = Flag::No;
};

struct DistanceFlags {
  Flag egocentric = Flag::No;
  Flag exocentric = Flag::No;
};

struct TechniqueDescriptor {
  std::string id;    ///< scene-file key, e.g. "pseudo-chromadepth"
  std::string name;  ///< display name, e.g. "Pseudo-Chromadepth"
  std::vector<ParamSpec> params;
  VisualCues cues;
  PhaseFlags phase;
  DistanceFlags distance;
  Flag realtime = Flag::Yes;

  const ParamSpec* param(std::string_view name) const;
};

/// The sixteen techniques in table order.
const std::vector<TechniqueDescriptor>& registry();

/// Lookup by id or display name (case-insensitive). Throws UnknownTechnique.
const TechniqueDescriptor& descriptor(std::string_view nameOrId);

/// Validates a parameter object against the schema and fills defaults.
/// Unknown names, wrong types and out-of-range values raise SchemaError with
/// the dotted path `pathPrefix.name`.
nlohmann::json resolveParams(const TechniqueDescriptor& technique, const nlohmann::json& params,
                             const std::string& pathPrefix);

nlohmann::json toJson(const TechniqueDescriptor& technique);
nlohmann::json registryJson();
/// Fixed-width text table of the flag matrix.
std::string registryTable();

}  // namespace vdk
