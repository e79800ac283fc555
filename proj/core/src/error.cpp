#include "torsion_forge/error.hpp"

namespace torsion_forge {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::NonInvolutiveGluing: return "NonInvolutiveGluing";
    case ErrorCode::OpenFace: return "OpenFace";
    case ErrorCode::NonManifoldEdge: return "NonManifoldEdge";
    case ErrorCode::NonManifoldVertex: return "NonManifoldVertex";
    case ErrorCode::NonOrientable: return "NonOrientable";
    case ErrorCode::SiteMismatch: return "SiteMismatch";
    case ErrorCode::InvalidDecoration: return "InvalidDecoration";
    case ErrorCode::DegenerateTetrahedron: return "DegenerateTetrahedron";
    case ErrorCode::InadmissibleColoring: return "InadmissibleColoring";
    case ErrorCode::ZeroVolume: return "ZeroVolume";
    case ErrorCode::NotAComplex: return "NotAComplex";
    case ErrorCode::NotAcyclic: return "NotAcyclic";
    case ErrorCode::SelectionFailed: return "SelectionFailed";
    case ErrorCode::SingularMinor: return "SingularMinor";
    case ErrorCode::GeneralPositionFailed: return "GeneralPositionFailed";
    case ErrorCode::InvalidParams: return "InvalidParams";
    case ErrorCode::StructureMismatch: return "StructureMismatch";
    case ErrorCode::ParseError: return "ParseError";
  }
  return "Unknown";
}

bool is_validation_error(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::NonInvolutiveGluing:
    case ErrorCode::OpenFace:
    case ErrorCode::NonManifoldEdge:
    case ErrorCode::NonManifoldVertex:
    case ErrorCode::NonOrientable:
    case ErrorCode::SiteMismatch:
    case ErrorCode::InvalidDecoration:
    case ErrorCode::InvalidParams:
    case ErrorCode::ParseError:
      return true;
    default:
      return false;
  }
}

Error::Error(ErrorCode code, const std::string& what)
    : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

}  // namespace torsion_forge
