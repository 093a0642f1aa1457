#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace xsl {

using SymbolId = std::uint32_t;

inline constexpr SymbolId kNoSymbol = static_cast<SymbolId>(-1);

// Dense string interning. Ids are assigned in first-seen order, which keeps
// every downstream iteration order a function of the input stream alone.
class SymbolTable {
public:
  SymbolId intern(std::string_view name);
  SymbolId find(std::string_view name) const;
  const std::string& name(SymbolId id) const { return names_[id]; }
  std::size_t size() const noexcept { return names_.size(); }
  const std::vector<std::string>& names() const noexcept { return names_; }

  bool operator==(const SymbolTable& other) const { return names_ == other.names_; }

private:
  struct Hash {
    using is_transparent = void;
    std::size_t operator()(std::string_view s) const noexcept {
      return std::hash<std::string_view>{}(s);
    }
  };
  std::vector<std::string> names_;
  std::unordered_map<std::string, SymbolId, Hash, std::equal_to<>> index_;
};

} // namespace xsl
