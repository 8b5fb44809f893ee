#pragma once

#include <stdexcept>
#include <string>

namespace gazeguard {

// Base of all library errors. `kind()` is a stable machine-readable class
// token; the CLI prints it verbatim on failure.
class Error : public std::runtime_error {
 public:
  Error(std::string kind, const std::string& message)
      : std::runtime_error(kind + ": " + message), kind_(std::move(kind)) {}

  const std::string& kind() const noexcept { return kind_; }

 private:
  std::string kind_;
};

#define GAZEGUARD_DEFINE_ERROR(Name)                     \
  class Name : public Error {                            \
   public:                                               \
    explicit Name(const std::string& message)            \
        : Error(#Name, message) {}                       \
  }

GAZEGUARD_DEFINE_ERROR(InsufficientData);
GAZEGUARD_DEFINE_ERROR(InvalidParameter);
GAZEGUARD_DEFINE_ERROR(InvalidSegment);
GAZEGUARD_DEFINE_ERROR(DegenerateVector);
GAZEGUARD_DEFINE_ERROR(DimensionMismatch);
GAZEGUARD_DEFINE_ERROR(ProtocolError);
GAZEGUARD_DEFINE_ERROR(StreamMismatch);
GAZEGUARD_DEFINE_ERROR(ParseError);
GAZEGUARD_DEFINE_ERROR(SchemaError);
GAZEGUARD_DEFINE_ERROR(EmptySet);
GAZEGUARD_DEFINE_ERROR(IoError);
GAZEGUARD_DEFINE_ERROR(DivergenceError);
GAZEGUARD_DEFINE_ERROR(ModelNotTrained);

#undef GAZEGUARD_DEFINE_ERROR

}  // namespace gazeguard
