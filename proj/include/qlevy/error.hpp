#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace qlevy {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

#define QLEVY_DEFINE_ERROR(Name)            \
  class Name : public Error {               \
   public:                                  \
    using Error::Error;                     \
  }

QLEVY_DEFINE_ERROR(RewriteBudgetExceeded);
QLEVY_DEFINE_ERROR(TermBudgetExceeded);
QLEVY_DEFINE_ERROR(UnknownGenerator);
QLEVY_DEFINE_ERROR(LengthMismatch);
QLEVY_DEFINE_ERROR(DimCapExceeded);
QLEVY_DEFINE_ERROR(DegreeCapExceeded);
QLEVY_DEFINE_ERROR(NonConvergence);
QLEVY_DEFINE_ERROR(MeshTooCoarse);
QLEVY_DEFINE_ERROR(InvalidParameter);
QLEVY_DEFINE_ERROR(PositivityViolation);
QLEVY_DEFINE_ERROR(RankDeficiency);
QLEVY_DEFINE_ERROR(TailBoundExceeded);
QLEVY_DEFINE_ERROR(DimensionMismatch);
QLEVY_DEFINE_ERROR(InvalidSpec);

#undef QLEVY_DEFINE_ERROR

/// Malformed polynomial text; `offset` is the byte offset of the failure.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t offset)
      : Error(what + " at offset " + std::to_string(offset)), offset_(offset) {}
  std::size_t offset() const noexcept { return offset_; }

 private:
  std::size_t offset_;
};

/// Configuration problem; `pointer` is a JSON pointer into the document.
class SchemaError : public Error {
 public:
  SchemaError(const std::string& pointer, const std::string& what)
      : Error(pointer + ": " + what), pointer_(pointer) {}
  const std::string& pointer() const noexcept { return pointer_; }

 private:
  std::string pointer_;
};

}  // namespace qlevy
