#include "netequil/error.hpp"

namespace netequil {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::NegativeCost: return "NegativeCost";
    case ErrorKind::DanglingEndpoint: return "DanglingEndpoint";
    case ErrorKind::InvalidCoordinate: return "InvalidCoordinate";
    case ErrorKind::ParseError: return "ParseError";
    case ErrorKind::EmptyGraph: return "EmptyGraph";
    case ErrorKind::Unbalanced: return "Unbalanced";
    case ErrorKind::Disconnected: return "Disconnected";
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::TooLarge: return "TooLarge";
    case ErrorKind::UnknownNode: return "UnknownNode";
    case ErrorKind::MixedSellerModes: return "MixedSellerModes";
    case ErrorKind::ModeMismatch: return "ModeMismatch";
    case ErrorKind::TauOutOfRange: return "TauOutOfRange";
    case ErrorKind::NegativeAlpha: return "NegativeAlpha";
    case ErrorKind::Infeasible: return "Infeasible";
    case ErrorKind::EmptyArea: return "EmptyArea";
    case ErrorKind::EmptyRegionSide: return "EmptyRegionSide";
    case ErrorKind::InvalidArgument: return "InvalidArgument";
  }
  return "Unknown";
}

}  // namespace netequil
