#pragma once

#include <stdexcept>
#include <string>

namespace ssmctl {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

#define SSMCTL_DEFINE_ERROR(Name)        \
  class Name : public Error {            \
   public:                               \
    using Error::Error;                  \
  }

SSMCTL_DEFINE_ERROR(InvalidParameter);
SSMCTL_DEFINE_ERROR(NumericalFailure);
SSMCTL_DEFINE_ERROR(ShapeError);
SSMCTL_DEFINE_ERROR(ResourceLimit);
SSMCTL_DEFINE_ERROR(IndexError);
SSMCTL_DEFINE_ERROR(InvalidInput);
SSMCTL_DEFINE_ERROR(ParseError);
SSMCTL_DEFINE_ERROR(CorruptArchive);
SSMCTL_DEFINE_ERROR(SchemaError);
SSMCTL_DEFINE_ERROR(InvalidArchive);

#undef SSMCTL_DEFINE_ERROR

/// Raised when a closed-form Gramian is requested for a state whose
/// denominator 1 - a^2 + eps is not positive.
class UnstableSystem : public Error {
 public:
  UnstableSystem(const std::string& what, long position, long state)
      : Error(what), position_(position), state_(state) {}

  long position() const noexcept { return position_; }
  long state() const noexcept { return state_; }

 private:
  long position_;
  long state_;
};

}  // namespace ssmctl
