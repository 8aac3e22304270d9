#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace rmirl {

enum class Errc {
  RowSumMismatch,
  UnknownLabel,
  BadIndex,
  AlphabetMismatch,
  UnknownSymbol,
  BadState,
  ResampleLimitExceeded,
  DegenerateSpace,
  NonFiniteValue,
  MissingQ,
  UnknownEnvironment,
  NonRectangular,
  NoStart,
  UnknownChar,
  ParseError,
  InvalidArgument,
};

std::string_view to_string(Errc code);

/// Every failure raised by the library carries one of the codes above.
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& message);

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

}  // namespace rmirl
