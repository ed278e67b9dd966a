#pragma once

#include <stdexcept>
#include <string>

namespace siflab {

enum class ErrorCode {
  InvalidArgument,
  NotReentrant,
  MultipleReentrant,
  DegenerateEdge,
  UnsupportedPolygon,
  ParseError,
  NonConforming,
  NegativeArea,
  UntaggedBoundaryEdge,
  NoRootInBracket,
  MultipleRootsInBracket,
  IndexOutOfRange,
  FamilyMismatch,
  NonpositiveRadius,
  QuadratureNotConverged,
  GammaNearZero,
  EmptyMesh,
  MissingEdgeData,
  InconsistentEdgeData,
  SolverBreakdown,
  SingularSystem,
  MeshMismatch,
  CornerDataNonzero,
  ZetaCornerNonzero,
  SyntaxError,
  UnknownIdentifier,
  EvalDomainError,
  ConfigError,
  IoError,
};

const char* error_name(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(error_name(code)) + ": " + what), code_(code) {}
  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace siflab
