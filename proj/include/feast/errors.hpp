// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace feast {

/// Base class of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

#define FEAST_DEFINE_ERROR(Name)          \
  class Name : public Error {             \
   public:                                \
    using Error::Error;                   \
  }

FEAST_DEFINE_ERROR(NotHermitian);
FEAST_DEFINE_ERROR(IndefiniteB);
FEAST_DEFINE_ERROR(ZeroMatrix);
FEAST_DEFINE_ERROR(RankDeficientInput);
FEAST_DEFINE_ERROR(DimensionMismatch);
FEAST_DEFINE_ERROR(UnsupportedFormat);
FEAST_DEFINE_ERROR(InvalidParams);
FEAST_DEFINE_ERROR(UnsupportedOrder);
FEAST_DEFINE_ERROR(InvalidAspect);
FEAST_DEFINE_ERROR(PoleOnContour);
FEAST_DEFINE_ERROR(Breakdown);
FEAST_DEFINE_ERROR(SingularSystem);
FEAST_DEFINE_ERROR(InvalidStartingBasis);
FEAST_DEFINE_ERROR(ZeroScale);

#undef FEAST_DEFINE_ERROR

/// Matrix Market syntax error; carries the 1-based line number.
class ParseError : public Error {
 public:
  ParseError(std::size_t line, const std::string& reason)
      : Error("line " + std::to_string(line) + ": " + reason), line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

}  // namespace feast
