#include "canonrep/error.hpp"

namespace canonrep {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::NonPositiveProb: return "NonPositiveProb";
    case ErrorKind::ProbSumNotOne: return "ProbSumNotOne";
    case ErrorKind::RaggedDepth: return "RaggedDepth";
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::UnreachablePrefix: return "UnreachablePrefix";
    case ErrorKind::UnreachablePath: return "UnreachablePath";
    case ErrorKind::XOutOfRange: return "XOutOfRange";
    case ErrorKind::NotAnAtom: return "NotAnAtom";
    case ErrorKind::NotMartingaleDifference: return "NotMartingaleDifference";
    case ErrorKind::NotTangent: return "NotTangent";
    case ErrorKind::DegenerateBatch: return "DegenerateBatch";
    case ErrorKind::TooCloseToBoundary: return "TooCloseToBoundary";
    case ErrorKind::StepTooCoarse: return "StepTooCoarse";
    case ErrorKind::SizeGuard: return "SizeGuard";
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::Parse: return "Parse";
    case ErrorKind::Io: return "Io";
  }
  return "Unknown";
}

namespace {
std::string compose(ErrorKind kind, const std::string& message, const std::string& where) {
  std::string out(to_string(kind));
  out += ": ";
  out += message;
  if (!where.empty()) {
    out += " at ";
    out += where;
  }
  return out;
}
}  // namespace

Error::Error(ErrorKind kind, const std::string& message, std::string where)
    : std::runtime_error(compose(kind, message, where)), kind_(kind), where_(std::move(where)) {}

}  // namespace canonrep
