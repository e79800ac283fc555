#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace torsion_forge {

enum class ErrorCode {
  // simplicial
  NonInvolutiveGluing,
  OpenFace,
  NonManifoldEdge,
  NonManifoldVertex,
  NonOrientable,
  SiteMismatch,
  InvalidDecoration,
  // geometry
  DegenerateTetrahedron,
  InadmissibleColoring,
  ZeroVolume,
  // torsion
  NotAComplex,
  NotAcyclic,
  SelectionFailed,
  SingularMinor,
  // pipeline / lens
  GeneralPositionFailed,
  InvalidParams,
  StructureMismatch,
  // io
  ParseError,
};

std::string_view to_string(ErrorCode code) noexcept;

/// True for errors caused by bad input (as opposed to numerical trouble).
bool is_validation_error(ErrorCode code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what);

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace torsion_forge
