#include "xsl/symbols.hpp"

namespace xsl {

SymbolId SymbolTable::intern(std::string_view name) {
  if (auto it = index_.find(name); it != index_.end())
    return it->second;
  auto id = static_cast<SymbolId>(names_.size());
  names_.emplace_back(name);
  index_.emplace(names_.back(), id);
  return id;
}

SymbolId SymbolTable::find(std::string_view name) const {
  auto it = index_.find(name);
  return it == index_.end() ? kNoSymbol : it->second;
}

} // namespace xsl
