#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace netequil {

enum class ErrorKind {
  NegativeCost,
  DanglingEndpoint,
  InvalidCoordinate,
  ParseError,
  EmptyGraph,
  Unbalanced,
  Disconnected,
  DimensionMismatch,
  TooLarge,
  UnknownNode,
  MixedSellerModes,
  ModeMismatch,
  TauOutOfRange,
  NegativeAlpha,
  Infeasible,
  EmptyArea,
  EmptyRegionSide,
  InvalidArgument,
};

std::string_view to_string(ErrorKind kind);

// All library failures are reported through this exception; `kind()` is the
// stable, machine-checkable part and `what()` carries the details.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& detail)
      : std::runtime_error(std::string(to_string(kind)) + ": " + detail), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace netequil
