#pragma once

#include <cstddef>
#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <vector>

namespace rmirl {

using Rng = std::mt19937_64;

/// Index of a symbol within an Alphabet.
using Symbol = std::size_t;

/// Ordered, duplicate-free set of label symbols. Declaration order is
/// significant: it fixes matrix column order and canonical encodings.
class Alphabet {
 public:
  /// Name of the designated symbol for unlabeled states.
  static constexpr std::string_view kBlank = "eps";

  Alphabet() = default;
  explicit Alphabet(std::vector<std::string> symbols);

  std::size_t size() const noexcept { return symbols_.size(); }
  const std::string& name(Symbol symbol) const;
  std::optional<Symbol> find(std::string_view name) const noexcept;
  /// Throws Errc::UnknownSymbol when absent.
  Symbol at(std::string_view name) const;
  bool contains(Symbol symbol) const noexcept { return symbol < symbols_.size(); }
  const std::vector<std::string>& symbols() const noexcept { return symbols_; }

  bool operator==(const Alphabet&) const = default;

 private:
  std::vector<std::string> symbols_;
};

}  // namespace rmirl
