#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace canonrep {

enum class ErrorKind {
  NonPositiveProb,
  ProbSumNotOne,
  RaggedDepth,
  DimensionMismatch,
  UnreachablePrefix,
  UnreachablePath,
  XOutOfRange,
  NotAnAtom,
  NotMartingaleDifference,
  NotTangent,
  DegenerateBatch,
  TooCloseToBoundary,
  StepTooCoarse,
  SizeGuard,
  InvalidArgument,
  Parse,
  Io,
};

std::string_view to_string(ErrorKind kind);

/// Every failure the library reports. `where` names the offending location
/// (a node path, a prefix, an argument) when there is one.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message, std::string where = {});

  ErrorKind kind() const noexcept { return kind_; }
  const std::string& where() const noexcept { return where_; }

 private:
  ErrorKind kind_;
  std::string where_;
};

}  // namespace canonrep
