#include "rmirl/alphabet.hpp"

#include <algorithm>

#include "rmirl/error.hpp"

namespace rmirl {

Alphabet::Alphabet(std::vector<std::string> symbols) : symbols_(std::move(symbols)) {
  if (symbols_.empty()) throw Error(Errc::InvalidArgument, "alphabet must not be empty");
  for (std::size_t i = 0; i < symbols_.size(); ++i) {
    if (symbols_[i].empty()) throw Error(Errc::InvalidArgument, "empty symbol name");
    for (std::size_t j = 0; j < i; ++j) {
      if (symbols_[i] == symbols_[j]) {
        throw Error(Errc::InvalidArgument, "duplicate symbol '" + symbols_[i] + "'");
      }
    }
  }
}

const std::string& Alphabet::name(Symbol symbol) const {
  if (symbol >= symbols_.size()) {
    throw Error(Errc::UnknownSymbol, "symbol index " + std::to_string(symbol) + " out of range");
  }
  return symbols_[symbol];
}

std::optional<Symbol> Alphabet::find(std::string_view name) const noexcept {
  auto it = std::find(symbols_.begin(), symbols_.end(), name);
  if (it == symbols_.end()) return std::nullopt;
  return static_cast<Symbol>(it - symbols_.begin());
}

Symbol Alphabet::at(std::string_view name) const {
  if (auto found = find(name)) return *found;
  throw Error(Errc::UnknownSymbol, "symbol '" + std::string(name) + "' not in alphabet");
}

}  // namespace rmirl
