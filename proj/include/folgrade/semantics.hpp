#pragma once

// Tarskian semantics over finite domains.

#include <cstddef>
#include <cstdint>
#include <map>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "folgrade/signature.hpp"
#include "folgrade/syntax.hpp"

namespace folgrade {

using Element = std::uint32_t;

class UnmappedSymbol : public std::runtime_error {
 public:
  explicit UnmappedSymbol(const std::string& name) : std::runtime_error("unmapped symbol: " + name), name_(name) {}
  const std::string& name() const { return name_; }

 private:
  std::string name_;
};

/// A finite structure: domain {0, ..., domainSize-1} with total tables for
/// every mapped symbol.
class Interpretation {
 public:
  /// Table of a function or predicate, indexed by the mixed-radix encoding of
  /// the argument tuple (first argument most significant).
  struct Table {
    std::size_t arity = 0;
    std::vector<Element> values;
  };

  explicit Interpretation(std::size_t domainSize) : domainSize_(domainSize) {
    if (domainSize == 0) throw std::invalid_argument("domain must be non-empty");
  }

  std::size_t domainSize() const { return domainSize_; }

  void setConstant(const std::string& name, Element value) {
    checkElement(value);
    constants_[name] = value;
  }

  void defineFunction(const std::string& name, std::size_t arity, Element fill = 0) {
    functions_[name] = Table{arity, std::vector<Element>(tableSize(arity), fill)};
  }
  void definePredicate(const std::string& name, std::size_t arity) {
    predicates_[name] = Table{arity, std::vector<Element>(tableSize(arity), 0)};
  }

  void setFunction(const std::string& name, std::span<const Element> args, Element value) {
    checkElement(value);
    Table& t = table(functions_, name);
    t.values[index(t, args)] = value;
  }
  void setPredicate(const std::string& name, std::span<const Element> args, bool value) {
    Table& t = table(predicates_, name);
    t.values[index(t, args)] = value ? 1 : 0;
  }

  Element constant(const std::string& name) const {
    auto it = constants_.find(name);
    if (it == constants_.end()) throw UnmappedSymbol(name);
    return it->second;
  }
  bool hasConstant(const std::string& name) const { return constants_.contains(name); }

  Element applyFunction(const std::string& name, std::span<const Element> args) const {
    const Table& t = table(functions_, name);
    return t.values[index(t, args)];
  }
  bool holds(const std::string& name, std::span<const Element> args) const {
    const Table& t = table(predicates_, name);
    return t.values[index(t, args)] != 0;
  }

  const std::map<std::string, Element>& constants() const { return constants_; }
  const std::map<std::string, Table>& functions() const { return functions_; }
  const std::map<std::string, Table>& predicates() const { return predicates_; }

  /// True when every symbol of `sig` is mapped with the declared arity.
  bool covers(const Signature& sig) const {
    for (const auto& c : sig.constants()) {
      if (!constants_.contains(c)) return false;
    }
    for (const auto& [name, arity] : sig.functions()) {
      auto it = functions_.find(name);
      if (it == functions_.end() || it->second.arity != arity) return false;
    }
    for (const auto& [name, arity] : sig.predicates()) {
      auto it = predicates_.find(name);
      if (it == predicates_.end() || it->second.arity != arity) return false;
    }
    return true;
  }

  std::size_t tableSize(std::size_t arity) const {
    std::size_t size = 1;
    for (std::size_t i = 0; i < arity; ++i) size *= domainSize_;
    return size;
  }

  /// Inverse of the table index encoding.
  std::vector<Element> decodeTuple(std::size_t index, std::size_t arity) const {
    std::vector<Element> tuple(arity);
    for (std::size_t i = arity; i-- > 0;) {
      tuple[i] = static_cast<Element>(index % domainSize_);
      index /= domainSize_;
    }
    return tuple;
  }

 private:
  void checkElement(Element e) const {
    if (e >= domainSize_) throw std::out_of_range("domain element out of range");
  }

  static const Table& table(const std::map<std::string, Table>& tables, const std::string& name) {
    auto it = tables.find(name);
    if (it == tables.end()) throw UnmappedSymbol(name);
    return it->second;
  }
  static Table& table(std::map<std::string, Table>& tables, const std::string& name) {
    auto it = tables.find(name);
    if (it == tables.end()) throw UnmappedSymbol(name);
    return it->second;
  }

  std::size_t index(const Table& t, std::span<const Element> args) const {
    if (args.size() != t.arity) throw std::invalid_argument("arity mismatch in table lookup");
    std::size_t idx = 0;
    for (Element a : args) {
      checkElement(a);
      idx = idx * domainSize_ + a;
    }
    return idx;
  }

  std::size_t domainSize_;
  std::map<std::string, Element> constants_;
  std::map<std::string, Table> functions_;
  std::map<std::string, Table> predicates_;
};

/// Variable assignment.
using Environment = std::map<std::string, Element>;

namespace detail {

// Innermost binding is at the back.
using Bindings = std::vector<std::pair<std::string, Element>>;

inline Element evaluateTerm(const Term& t, const Interpretation& interp, const Bindings& env) {
  switch (t.kind()) {
    case Term::Kind::Variable:
      for (auto it = env.rbegin(); it != env.rend(); ++it) {
        if (it->first == t.name()) return it->second;
      }
      throw UnmappedSymbol(t.name());
    case Term::Kind::Constant:
      return interp.constant(t.name());
    case Term::Kind::Application: {
      std::vector<Element> args;
      args.reserve(t.arity());
      for (const Term& a : t.args()) args.push_back(evaluateTerm(a, interp, env));
      return interp.applyFunction(t.name(), args);
    }
  }
  return 0;
}

inline bool evaluate(const Formula& f, const Interpretation& interp, Bindings& env) {
  using K = Formula::Kind;
  switch (f.kind()) {
    case K::Atom: {
      std::vector<Element> args;
      args.reserve(f.terms().size());
      for (const Term& t : f.terms()) args.push_back(evaluateTerm(t, interp, env));
      return interp.holds(f.predicate(), args);
    }
    case K::Equality:
      return evaluateTerm(f.left(), interp, env) == evaluateTerm(f.right(), interp, env);
    case K::Not:
      return !evaluate(f.operand(), interp, env);
    case K::And:
      return evaluate(f.lhs(), interp, env) && evaluate(f.rhs(), interp, env);
    case K::Or:
      return evaluate(f.lhs(), interp, env) || evaluate(f.rhs(), interp, env);
    case K::Implies:
      return !evaluate(f.lhs(), interp, env) || evaluate(f.rhs(), interp, env);
    case K::Iff:
      return evaluate(f.lhs(), interp, env) == evaluate(f.rhs(), interp, env);
    case K::ForAll:
    case K::Exists: {
      const bool universal = f.kind() == K::ForAll;
      env.emplace_back(f.variable(), 0);
      bool result = universal;
      for (Element e = 0; e < interp.domainSize(); ++e) {
        env.back().second = e;
        if (evaluate(f.body(), interp, env) != universal) {
          result = !universal;
          break;
        }
      }
      env.pop_back();
      return result;
    }
  }
  return false;
}

}  // namespace detail

/// Truth value of `f` in `interp` under `env`. Throws UnmappedSymbol when a
/// symbol or free variable has no value.
inline bool evaluate(const Formula& f, const Interpretation& interp, const Environment& env = {}) {
  detail::Bindings bindings(env.begin(), env.end());
  return detail::evaluate(f, interp, bindings);
}

inline Element evaluate(const Term& t, const Interpretation& interp, const Environment& env = {}) {
  detail::Bindings bindings(env.begin(), env.end());
  return detail::evaluateTerm(t, interp, bindings);
}

}  // namespace folgrade
