#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace vmadmm {

enum class ErrorCode {
  kDimensionMismatch,
  kInvalidArgument,
  kNotPositiveSemidefinite,
  kNotConverged,
  kUnsupported,
  kSingularSystem,
  kNonFinite,
  kParse,
  kIo,
  kAssumptionViolated,
};

const char* to_string(ErrorCode code);

/// Base class of every error thrown by the library. Carries a machine-readable
/// code next to the human-readable message.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what);
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

class DimensionMismatch : public Error {
 public:
  DimensionMismatch(const std::string& context, std::ptrdiff_t expected,
                    std::ptrdiff_t actual);
  std::ptrdiff_t expected() const noexcept { return expected_; }
  std::ptrdiff_t actual() const noexcept { return actual_; }

 private:
  std::ptrdiff_t expected_;
  std::ptrdiff_t actual_;
};

/// Iterative routine ran out of iterations. `last_estimate` holds whatever
/// the routine had when it gave up (an operator norm, a KKT residual, ...).
class NotConverged : public Error {
 public:
  NotConverged(const std::string& what, double last_estimate);
  double last_estimate() const noexcept { return last_estimate_; }

 private:
  double last_estimate_;
};

class NonFiniteIterate : public Error {
 public:
  NonFiniteIterate(std::size_t iteration, const std::string& component);
  std::size_t iteration() const noexcept { return iteration_; }

 private:
  std::size_t iteration_;
};

class ParseError : public Error {
 public:
  ParseError(const std::string& path, std::size_t line, const std::string& msg);
  const std::string& path() const noexcept { return path_; }
  std::size_t line() const noexcept { return line_; }

 private:
  std::string path_;
  std::size_t line_;
};

}  // namespace vmadmm
