#pragma once

#include <stdexcept>
#include <string>

namespace parahoric {

enum class ErrorKind {
  InvalidSpec,
  ParseError,
  MixedRings,
  NotAUnit,
  DepthOne,
  BadDepth,
  TooLarge,
  UnsupportedType,
  NotAdditivePair,
  Reducible,
  InvalidConcave,
  NotComparable,
  IllFormedWindows,
  UnsupportedFamily,
  MixedGroups,
  OutOfWindow,
  NotAvailable,
  SingularLambda,
  NoFactorization,
  FactorizationFailed,
  NotInProduct,
  NonCommutingInputs,
  NotTransitive,
  NoSuchH,
  IncompatibleRings,
};

const char* error_kind_name(ErrorKind kind);

// Every failure raised by the library carries one of the kinds above so the
// CLI can map it to an exit code without string matching.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(error_kind_name(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace parahoric
