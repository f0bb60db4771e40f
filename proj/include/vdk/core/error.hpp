#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace vdk {

enum class ErrorCode {
  ParseError,
  DegenerateGeometry,
  NonTriangulated,
  NonManifold,
  SolverFailure,
  NumericalCollapse,
  EmptyEndpoints,
  IOError,
  SchemaMismatch,
  EmptyScene,
  NoTumor,
  LengthMismatch,
  NonFiniteScalar,
  SelectionBelowPlane,
  LUTMissing,
  EmptyMask,
  MissingOverlay,
  SchemaError,
  UnknownTechnique,
  RenderError,
  InvalidArgument,
  Cancelled,
};

std::string_view toString(ErrorCode code);

/// Every recoverable failure in the toolkit surfaces as this type; callers
/// dispatch on code().
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(toString(code)) + ": " + message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

/// Schema violations carry the dotted path of the offending field, e.g.
/// "technique.params.fogFalloff".
class SchemaError : public Error {
 public:
  SchemaError(std::string fieldPath, const std::string& message)
      : Error(ErrorCode::SchemaError, fieldPath + ": " + message), field_(std::move(fieldPath)) {}

  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

}  // namespace vdk
