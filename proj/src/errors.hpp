#pragma once

#include <stdexcept>
#include <string>

namespace kle {

enum class ErrorCode {
  InvalidArgument = 1,
  Numeric = 2,
  InadmissibleKernel = 3,
  DegenerateMode = 4,
  InsufficientSpectrum = 5,
};

/// Base class for all library failures; carries a stable code so the C API
/// can translate without string matching.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

class InvalidArgument : public Error {
 public:
  explicit InvalidArgument(const std::string& what)
      : Error(ErrorCode::InvalidArgument, what) {}
};

class NumericError : public Error {
 public:
  explicit NumericError(const std::string& what)
      : Error(ErrorCode::Numeric, what) {}
};

class InadmissibleKernel : public Error {
 public:
  explicit InadmissibleKernel(const std::string& what)
      : Error(ErrorCode::InadmissibleKernel, what) {}
};

class DegenerateMode : public Error {
 public:
  explicit DegenerateMode(const std::string& what)
      : Error(ErrorCode::DegenerateMode, what) {}
};

class InsufficientSpectrum : public Error {
 public:
  explicit InsufficientSpectrum(const std::string& what)
      : Error(ErrorCode::InsufficientSpectrum, what) {}
};

}  // namespace kle
