#pragma once

#include <algorithm>
#include <cctype>
#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "folgrade/syntax.hpp"

namespace folgrade {

class SignatureError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Identifiers of the form `sk<digits>` are reserved for Skolem symbols.
inline bool isReservedName(std::string_view name) {
  if (name == "all" || name == "exists") return true;
  if (name.size() < 3 || name.substr(0, 2) != "sk") return false;
  return std::all_of(name.begin() + 2, name.end(), [](char c) { return std::isdigit(static_cast<unsigned char>(c)); });
}

inline bool isIdentifier(std::string_view name) {
  if (name.empty() || !std::isalpha(static_cast<unsigned char>(name.front()))) return false;
  return std::all_of(name.begin(), name.end(),
                     [](char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; });
}

/// The constants, functions and predicates an exercise allows.
/// Declaration order is kept; it drives deterministic naming downstream.
class Signature {
 public:
  enum class SymbolClass { Undeclared, Constant, Function, Predicate };

  Signature& addConstant(std::string name) {
    if (!hasConstant(name)) constants_.push_back(std::move(name));
    return *this;
  }
  Signature& addFunction(std::string name, std::size_t arity) {
    upsert(functions_, std::move(name), arity);
    return *this;
  }
  Signature& addPredicate(std::string name, std::size_t arity) {
    upsert(predicates_, std::move(name), arity);
    return *this;
  }

  const std::vector<std::string>& constants() const { return constants_; }
  const std::vector<std::pair<std::string, std::size_t>>& functions() const { return functions_; }
  const std::vector<std::pair<std::string, std::size_t>>& predicates() const { return predicates_; }

  bool hasConstant(std::string_view name) const {
    return std::find(constants_.begin(), constants_.end(), name) != constants_.end();
  }
  std::optional<std::size_t> functionArity(std::string_view name) const { return lookup(functions_, name); }
  std::optional<std::size_t> predicateArity(std::string_view name) const { return lookup(predicates_, name); }

  SymbolClass classify(std::string_view name) const {
    if (hasConstant(name)) return SymbolClass::Constant;
    if (functionArity(name)) return SymbolClass::Function;
    if (predicateArity(name)) return SymbolClass::Predicate;
    return SymbolClass::Undeclared;
  }

  bool declares(std::string_view name) const { return classify(name) != SymbolClass::Undeclared; }

  bool empty() const { return constants_.empty() && functions_.empty() && predicates_.empty(); }

  /// Throws SignatureError on overlapping names, zero arities, or names that
  /// are not uppercase-initial identifiers.
  void validate() const {
    std::vector<std::string> seen;
    auto check = [&](const std::string& name, std::string_view what) {
      if (!isIdentifier(name) || isVariableName(name)) {
        throw SignatureError(std::string(what) + " name must be an identifier starting with an uppercase letter: '" +
                             name + "'");
      }
      if (std::find(seen.begin(), seen.end(), name) != seen.end()) {
        throw SignatureError("symbol declared more than once: " + name);
      }
      seen.push_back(name);
    };
    for (const auto& c : constants_) check(c, "constant");
    for (const auto& [name, arity] : functions_) {
      check(name, "function");
      if (arity == 0) throw SignatureError("function arity must be at least 1: " + name);
    }
    for (const auto& [name, arity] : predicates_) {
      check(name, "predicate");
      if (arity == 0) throw SignatureError("predicate arity must be at least 1: " + name);
    }
  }

  friend bool operator==(const Signature&, const Signature&) = default;

 private:
  using ArityList = std::vector<std::pair<std::string, std::size_t>>;

  static void upsert(ArityList& list, std::string name, std::size_t arity) {
    for (auto& entry : list) {
      if (entry.first == name) {
        entry.second = arity;
        return;
      }
    }
    list.emplace_back(std::move(name), arity);
  }

  static std::optional<std::size_t> lookup(const ArityList& list, std::string_view name) {
    for (const auto& [n, arity] : list) {
      if (n == name) return arity;
    }
    return std::nullopt;
  }

  std::vector<std::string> constants_;
  ArityList functions_;
  ArityList predicates_;
};

/// Signature made of exactly the symbols a formula uses.
inline Signature signatureOf(const Formula& f) {
  SymbolUsage usage = symbolsOf(f);
  Signature sig;
  for (const auto& c : usage.constants) sig.addConstant(c);
  for (const auto& [name, arity] : usage.functions) sig.addFunction(name, arity);
  for (const auto& [name, arity] : usage.predicates) sig.addPredicate(name, arity);
  return sig;
}

/// Union of two signatures; symbols of `extra` are appended after those of `base`.
inline Signature merge(Signature base, const Signature& extra) {
  for (const auto& c : extra.constants()) base.addConstant(c);
  for (const auto& [name, arity] : extra.functions()) base.addFunction(name, arity);
  for (const auto& [name, arity] : extra.predicates()) base.addPredicate(name, arity);
  return base;
}

}  // namespace folgrade
