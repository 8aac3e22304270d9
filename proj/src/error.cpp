#include "rmirl/error.hpp"

namespace rmirl {

std::string_view to_string(Errc code) {
  switch (code) {
    case Errc::RowSumMismatch: return "RowSumMismatch";
    case Errc::UnknownLabel: return "UnknownLabel";
    case Errc::BadIndex: return "BadIndex";
    case Errc::AlphabetMismatch: return "AlphabetMismatch";
    case Errc::UnknownSymbol: return "UnknownSymbol";
    case Errc::BadState: return "BadState";
    case Errc::ResampleLimitExceeded: return "ResampleLimitExceeded";
    case Errc::DegenerateSpace: return "DegenerateSpace";
    case Errc::NonFiniteValue: return "NonFiniteValue";
    case Errc::MissingQ: return "MissingQ";
    case Errc::UnknownEnvironment: return "UnknownEnvironment";
    case Errc::NonRectangular: return "NonRectangular";
    case Errc::NoStart: return "NoStart";
    case Errc::UnknownChar: return "UnknownChar";
    case Errc::ParseError: return "ParseError";
    case Errc::InvalidArgument: return "InvalidArgument";
  }
  return "Unknown";
}

Error::Error(Errc code, const std::string& message)
    : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

}  // namespace rmirl
