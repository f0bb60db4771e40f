#include "vdk/core/error.hpp"

namespace vdk {

std::string_view toString(ErrorCode code) {
  switch (code) {
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::DegenerateGeometry: return "DegenerateGeometry";
    case ErrorCode::NonTriangulated: return "NonTriangulated";
    case ErrorCode::NonManifold: return "NonManifold";
    case ErrorCode::SolverFailure: return "SolverFailure";
    case ErrorCode::NumericalCollapse: return "NumericalCollapse";
    case ErrorCode::EmptyEndpoints: return "EmptyEndpoints";
    case ErrorCode::IOError: return "IOError";
    case ErrorCode::SchemaMismatch: return "SchemaMismatch";
    case ErrorCode::EmptyScene: return "EmptyScene";
    case ErrorCode::NoTumor: return "NoTumor";
    case ErrorCode::LengthMismatch: return "LengthMismatch";
    case ErrorCode::NonFiniteScalar: return "NonFiniteScalar";
    case ErrorCode::SelectionBelowPlane: return "SelectionBelowPlane";
    case ErrorCode::LUTMissing: return "LUTMissing";
    case ErrorCode::EmptyMask: return "EmptyMask";
    case ErrorCode::MissingOverlay: return "MissingOverlay";
    case ErrorCode::SchemaError: return "SchemaError";
    case ErrorCode::UnknownTechnique: return "UnknownTechnique";
    case ErrorCode::RenderError: return "RenderError";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::Cancelled: return "Cancelled";
  }
  return "Unknown";
}

}  // namespace vdk
