#include "vmadmm/error.hpp"

namespace vmadmm {

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kDimensionMismatch: return "dimension mismatch";
    case ErrorCode::kInvalidArgument: return "invalid argument";
    case ErrorCode::kNotPositiveSemidefinite: return "not positive semidefinite";
    case ErrorCode::kNotConverged: return "not converged";
    case ErrorCode::kUnsupported: return "unsupported";
    case ErrorCode::kSingularSystem: return "singular system";
    case ErrorCode::kNonFinite: return "non-finite value";
    case ErrorCode::kParse: return "parse error";
    case ErrorCode::kIo: return "i/o error";
    case ErrorCode::kAssumptionViolated: return "assumption violated";
  }
  return "unknown";
}

Error::Error(ErrorCode code, const std::string& what)
    : std::runtime_error(what), code_(code) {}

DimensionMismatch::DimensionMismatch(const std::string& context,
                                     std::ptrdiff_t expected,
                                     std::ptrdiff_t actual)
    : Error(ErrorCode::kDimensionMismatch,
            context + ": expected dimension " + std::to_string(expected) +
                ", got " + std::to_string(actual)),
      expected_(expected),
      actual_(actual) {}

NotConverged::NotConverged(const std::string& what, double last_estimate)
    : Error(ErrorCode::kNotConverged,
            what + " (last estimate " + std::to_string(last_estimate) + ")"),
      last_estimate_(last_estimate) {}

NonFiniteIterate::NonFiniteIterate(std::size_t iteration,
                                   const std::string& component)
    : Error(ErrorCode::kNonFinite, "non-finite value in " + component +
                                       " at iteration " +
                                       std::to_string(iteration)),
      iteration_(iteration) {}

ParseError::ParseError(const std::string& path, std::size_t line,
                       const std::string& msg)
    : Error(ErrorCode::kParse, path + ":" + std::to_string(line) + ": " + msg),
      path_(path),
      line_(line) {}

}  // namespace vmadmm
