#pragma once

// Finite model search. Interpretations of domain size 1..maxDomain are
// explored exhaustively; partial structures are pruned with three-valued
// (Kleene) evaluation, so a branch is cut as soon as every completion of it
// is known to falsify the formula.

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "folgrade/deadline.hpp"
#include "folgrade/semantics.hpp"
#include "folgrade/signature.hpp"
#include "folgrade/syntax.hpp"

namespace folgrade {

class SearchSpaceTooLarge : public std::runtime_error {
 public:
  explicit SearchSpaceTooLarge(std::size_t cap)
      : std::runtime_error("finite model search exceeded " + std::to_string(cap) + " search nodes") {}
};

enum class Truth : std::int8_t { False = 0, True = 1, Unknown = 2 };

inline Truth negate(Truth t) {
  if (t == Truth::Unknown) return t;
  return t == Truth::True ? Truth::False : Truth::True;
}

/// Symbols of a formula (and optionally a signature) numbered densely.
struct SymbolTable {
  std::vector<std::string> constants;
  std::vector<std::pair<std::string, std::size_t>> functions;
  std::vector<std::pair<std::string, std::size_t>> predicates;

  static SymbolTable of(const Formula& f, const Signature* sig = nullptr) {
    Signature merged = sig ? merge(*sig, signatureOf(f)) : signatureOf(f);
    SymbolTable t;
    t.constants = merged.constants();
    t.functions = merged.functions();
    t.predicates = merged.predicates();
    return t;
  }

  std::optional<std::size_t> constantId(const std::string& n) const { return find(constants, n); }
  std::optional<std::size_t> functionId(const std::string& n) const { return findPair(functions, n); }
  std::optional<std::size_t> predicateId(const std::string& n) const { return findPair(predicates, n); }

 private:
  static std::optional<std::size_t> find(const std::vector<std::string>& v, const std::string& n) {
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (v[i] == n) return i;
    }
    return std::nullopt;
  }
  static std::optional<std::size_t> findPair(const std::vector<std::pair<std::string, std::size_t>>& v,
                                             const std::string& n) {
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (v[i].first == n) return i;
    }
    return std::nullopt;
  }
};

/// A structure in which predicate and function cells may be unknown.
/// Constants are always assigned.
class PartialStructure {
 public:
  static constexpr std::int32_t kUnknown = -1;

  struct CellRef {
    bool isFunction;
    std::size_t symbol;
    std::size_t index;
  };

  PartialStructure(const SymbolTable& symbols, std::size_t domainSize)
      : domainSize_(domainSize), constants_(symbols.constants.size(), 0) {
    for (const auto& [name, arity] : symbols.functions) {
      functionArity_.push_back(arity);
      functions_.emplace_back(power(arity), kUnknown);
    }
    for (const auto& [name, arity] : symbols.predicates) {
      predicateArity_.push_back(arity);
      predicates_.emplace_back(power(arity), kUnknown);
    }
  }

  /// Fully known structure copied from an interpretation.
  static PartialStructure from(const Interpretation& interp, const SymbolTable& symbols) {
    PartialStructure s(symbols, interp.domainSize());
    for (std::size_t i = 0; i < symbols.constants.size(); ++i) s.constants_[i] = interp.constant(symbols.constants[i]);
    for (std::size_t i = 0; i < symbols.functions.size(); ++i) {
      const auto& table = interp.functions().at(symbols.functions[i].first).values;
      for (std::size_t j = 0; j < table.size(); ++j) s.functions_[i][j] = static_cast<std::int32_t>(table[j]);
    }
    for (std::size_t i = 0; i < symbols.predicates.size(); ++i) {
      const auto& table = interp.predicates().at(symbols.predicates[i].first).values;
      for (std::size_t j = 0; j < table.size(); ++j) s.predicates_[i][j] = static_cast<std::int32_t>(table[j]);
    }
    return s;
  }

  std::size_t domainSize() const { return domainSize_; }
  std::vector<Element>& constants() { return constants_; }
  const std::vector<Element>& constants() const { return constants_; }

  std::int32_t cell(const CellRef& c) const {
    return c.isFunction ? functions_[c.symbol][c.index] : predicates_[c.symbol][c.index];
  }
  void setCell(const CellRef& c, std::int32_t value) {
    (c.isFunction ? functions_[c.symbol][c.index] : predicates_[c.symbol][c.index]) = value;
  }
  std::size_t cellCount(bool isFunction, std::size_t symbol) const {
    return isFunction ? functions_[symbol].size() : predicates_[symbol].size();
  }

  std::size_t encode(std::span<const Element> args) const {
    std::size_t idx = 0;
    for (Element a : args) idx = idx * domainSize_ + a;
    return idx;
  }

  /// Total interpretation; unknown cells become false / element 0.
  Interpretation complete(const SymbolTable& symbols) const {
    Interpretation out(domainSize_);
    for (std::size_t i = 0; i < symbols.constants.size(); ++i) out.setConstant(symbols.constants[i], constants_[i]);
    for (std::size_t i = 0; i < symbols.functions.size(); ++i) {
      const auto& [name, arity] = symbols.functions[i];
      out.defineFunction(name, arity);
      for (std::size_t j = 0; j < functions_[i].size(); ++j) {
        if (functions_[i][j] != kUnknown) {
          out.setFunction(name, out.decodeTuple(j, arity), static_cast<Element>(functions_[i][j]));
        }
      }
    }
    for (std::size_t i = 0; i < symbols.predicates.size(); ++i) {
      const auto& [name, arity] = symbols.predicates[i];
      out.definePredicate(name, arity);
      for (std::size_t j = 0; j < predicates_[i].size(); ++j) {
        if (predicates_[i][j] == 1) out.setPredicate(name, out.decodeTuple(j, arity), true);
      }
    }
    return out;
  }

 private:
  std::size_t power(std::size_t arity) const {
    std::size_t p = 1;
    for (std::size_t i = 0; i < arity; ++i) p *= domainSize_;
    return p;
  }

  std::size_t domainSize_;
  std::vector<Element> constants_;
  std::vector<std::size_t> functionArity_;
  std::vector<std::size_t> predicateArity_;
  std::vector<std::vector<std::int32_t>> functions_;
  std::vector<std::vector<std::int32_t>> predicates_;
};

/// A formula with symbols resolved to table ids and variables to slots.
class CompiledFormula {
 public:
  CompiledFormula(const Formula& f, const SymbolTable& symbols) : root_(compile(f, symbols)) {}

  /// Three-valued truth value. When the result is Unknown, `firstUnknown`
  /// (if non-null and unset) receives a cell whose value was needed.
  Truth evaluate(const PartialStructure& s, std::optional<PartialStructure::CellRef>* firstUnknown = nullptr) const {
    std::vector<Element> env;
    return eval(root_, s, env, firstUnknown);
  }

 private:
  struct CTerm {
    Term::Kind kind;
    std::size_t id;  // variable slot, constant id or function id
    std::vector<CTerm> args;
  };
  struct CNode {
    Formula::Kind kind;
    std::size_t id = 0;  // predicate id
    std::vector<CTerm> terms;
    std::vector<CNode> children;
  };

  static CTerm compileTerm(const Term& t, const SymbolTable& symbols, const std::vector<std::string>& scope) {
    switch (t.kind()) {
      case Term::Kind::Variable:
        for (std::size_t i = scope.size(); i-- > 0;) {
          if (scope[i] == t.name()) return CTerm{t.kind(), i, {}};
        }
        throw UnmappedSymbol(t.name());
      case Term::Kind::Constant: {
        auto id = symbols.constantId(t.name());
        if (!id) throw UnmappedSymbol(t.name());
        return CTerm{t.kind(), *id, {}};
      }
      case Term::Kind::Application: {
        auto id = symbols.functionId(t.name());
        if (!id) throw UnmappedSymbol(t.name());
        CTerm out{t.kind(), *id, {}};
        for (const Term& a : t.args()) out.args.push_back(compileTerm(a, symbols, scope));
        return out;
      }
    }
    throw std::logic_error("unreachable");
  }

  static CNode compile(const Formula& f, const SymbolTable& symbols) {
    std::vector<std::string> scope;
    return compile(f, symbols, scope);
  }

  static CNode compile(const Formula& f, const SymbolTable& symbols, std::vector<std::string>& scope) {
    CNode node{f.kind()};
    switch (f.kind()) {
      case Formula::Kind::Atom: {
        auto id = symbols.predicateId(f.predicate());
        if (!id) throw UnmappedSymbol(f.predicate());
        node.id = *id;
        [[fallthrough]];
      }
      case Formula::Kind::Equality:
        for (const Term& t : f.terms()) node.terms.push_back(compileTerm(t, symbols, scope));
        break;
      case Formula::Kind::Not:
        node.children.push_back(compile(f.operand(), symbols, scope));
        break;
      case Formula::Kind::ForAll:
      case Formula::Kind::Exists:
        scope.push_back(f.variable());
        node.children.push_back(compile(f.body(), symbols, scope));
        scope.pop_back();
        break;
      default:
        node.children.push_back(compile(f.lhs(), symbols, scope));
        node.children.push_back(compile(f.rhs(), symbols, scope));
        break;
    }
    return node;
  }

  // Returns -1 when the value depends on an unknown function cell.
  static std::int64_t evalTerm(const CTerm& t, const PartialStructure& s, const std::vector<Element>& env,
                               std::optional<PartialStructure::CellRef>* firstUnknown) {
    switch (t.kind) {
      case Term::Kind::Variable: return env[t.id];
      case Term::Kind::Constant: return s.constants()[t.id];
      case Term::Kind::Application: {
        std::vector<Element> args;
        args.reserve(t.args.size());
        for (const CTerm& a : t.args) {
          std::int64_t v = evalTerm(a, s, env, firstUnknown);
          if (v < 0) return -1;
          args.push_back(static_cast<Element>(v));
        }
        PartialStructure::CellRef ref{true, t.id, s.encode(args)};
        std::int32_t v = s.cell(ref);
        if (v == PartialStructure::kUnknown) {
          if (firstUnknown && !*firstUnknown) *firstUnknown = ref;
          return -1;
        }
        return v;
      }
    }
    return -1;
  }

  static Truth eval(const CNode& n, const PartialStructure& s, std::vector<Element>& env,
                    std::optional<PartialStructure::CellRef>* firstUnknown) {
    using K = Formula::Kind;
    switch (n.kind) {
      case K::Atom: {
        std::vector<Element> args;
        args.reserve(n.terms.size());
        for (const CTerm& t : n.terms) {
          std::int64_t v = evalTerm(t, s, env, firstUnknown);
          if (v < 0) return Truth::Unknown;
          args.push_back(static_cast<Element>(v));
        }
        PartialStructure::CellRef ref{false, n.id, s.encode(args)};
        std::int32_t v = s.cell(ref);
        if (v == PartialStructure::kUnknown) {
          if (firstUnknown && !*firstUnknown) *firstUnknown = ref;
          return Truth::Unknown;
        }
        return v ? Truth::True : Truth::False;
      }
      case K::Equality: {
        std::int64_t l = evalTerm(n.terms[0], s, env, firstUnknown);
        std::int64_t r = evalTerm(n.terms[1], s, env, firstUnknown);
        if (l < 0 || r < 0) return Truth::Unknown;
        return l == r ? Truth::True : Truth::False;
      }
      case K::Not:
        return negate(eval(n.children[0], s, env, firstUnknown));
      case K::And:
      case K::Or: {
        const Truth dominant = n.kind == K::And ? Truth::False : Truth::True;
        Truth l = eval(n.children[0], s, env, firstUnknown);
        if (l == dominant) return dominant;
        Truth r = eval(n.children[1], s, env, firstUnknown);
        if (r == dominant) return dominant;
        return (l == Truth::Unknown || r == Truth::Unknown) ? Truth::Unknown : negate(dominant);
      }
      case K::Implies: {
        Truth l = eval(n.children[0], s, env, firstUnknown);
        if (l == Truth::False) return Truth::True;
        Truth r = eval(n.children[1], s, env, firstUnknown);
        if (r == Truth::True) return Truth::True;
        return (l == Truth::Unknown || r == Truth::Unknown) ? Truth::Unknown : Truth::False;
      }
      case K::Iff: {
        Truth l = eval(n.children[0], s, env, firstUnknown);
        Truth r = eval(n.children[1], s, env, firstUnknown);
        if (l == Truth::Unknown || r == Truth::Unknown) return Truth::Unknown;
        return l == r ? Truth::True : Truth::False;
      }
      case K::ForAll:
      case K::Exists: {
        const Truth dominant = n.kind == K::ForAll ? Truth::False : Truth::True;
        bool unknown = false;
        env.push_back(0);
        for (Element e = 0; e < s.domainSize(); ++e) {
          env.back() = e;
          Truth t = eval(n.children[0], s, env, firstUnknown);
          if (t == dominant) {
            env.pop_back();
            return dominant;
          }
          unknown = unknown || t == Truth::Unknown;
        }
        env.pop_back();
        return unknown ? Truth::Unknown : negate(dominant);
      }
    }
    return Truth::Unknown;
  }

  CNode root_;
};

struct ModelSearchOptions {
  Deadline deadline;
  std::size_t maxNodes = 2'000'000;
};

struct ModelSearchResult {
  enum class Status { Found, NoneFound, Interrupted };
  Status status;
  std::optional<Interpretation> model;

  bool found() const { return status == Status::Found; }
};

namespace detail {

class ModelSearch {
 public:
  ModelSearch(const Formula& f, const SymbolTable& symbols, const ModelSearchOptions& options)
      : symbols_(symbols), formula_(f, symbols), options_(options) {}

  ModelSearchResult run(std::size_t maxDomain) {
    for (std::size_t n = 1; n <= maxDomain; ++n) {
      PartialStructure s(symbols_, n);
      if (assignConstants(s, 0, 0)) return {ModelSearchResult::Status::Found, s.complete(symbols_)};
      if (interrupted_) return {ModelSearchResult::Status::Interrupted, std::nullopt};
    }
    return {ModelSearchResult::Status::NoneFound, std::nullopt};
  }

 private:
  // Constants take values in restricted-growth order: each constant is either
  // an element already used by an earlier constant or the next unused one.
  // Every structure is isomorphic to one of this shape.
  bool assignConstants(PartialStructure& s, std::size_t index, std::size_t used) {
    if (index == s.constants().size()) return search(s);
    const std::size_t limit = std::min(used + 1, s.domainSize());
    for (std::size_t e = 0; e < limit; ++e) {
      s.constants()[index] = static_cast<Element>(e);
      if (assignConstants(s, index + 1, std::max(used, e + 1))) return true;
      if (interrupted_) return false;
    }
    return false;
  }

  bool search(PartialStructure& s) {
    if (++nodes_ > options_.maxNodes) throw SearchSpaceTooLarge(options_.maxNodes);
    if ((nodes_ & 0xff) == 0 && options_.deadline.expired()) {
      interrupted_ = true;
      return false;
    }
    std::optional<PartialStructure::CellRef> next;
    Truth t = formula_.evaluate(s, &next);
    if (t == Truth::True) return true;
    if (t == Truth::False) return false;
    if (!next) throw std::logic_error("unknown truth value without an unknown cell");
    const std::int32_t values = next->isFunction ? static_cast<std::int32_t>(s.domainSize()) : 2;
    for (std::int32_t v = 0; v < values; ++v) {
      s.setCell(*next, v);
      if (search(s)) return true;
      if (interrupted_) break;
    }
    s.setCell(*next, PartialStructure::kUnknown);
    return false;
  }

  const SymbolTable& symbols_;
  CompiledFormula formula_;
  ModelSearchOptions options_;
  std::size_t nodes_ = 0;
  bool interrupted_ = false;
};

}  // namespace detail

/// Searches for a model of the sentence `f` with at most `maxDomain`
/// elements. Every symbol of `sig` and of `f` is interpreted; symbols that do
/// not occur in `f` get default values. Throws SearchSpaceTooLarge when the
/// node cap is hit.
inline ModelSearchResult enumerateModels(const Formula& f, const Signature& sig, std::size_t maxDomain,
                                         const ModelSearchOptions& options = {}) {
  // Only symbols of `f` are searched; the rest are filled in afterwards.
  SymbolTable symbols = SymbolTable::of(f);
  ModelSearchResult result = detail::ModelSearch(f, symbols, options).run(maxDomain);
  if (result.model) {
    Interpretation& m = *result.model;
    for (const auto& c : sig.constants()) {
      if (!m.hasConstant(c)) m.setConstant(c, 0);
    }
    for (const auto& [name, arity] : sig.functions()) {
      if (!m.functions().contains(name)) m.defineFunction(name, arity);
    }
    for (const auto& [name, arity] : sig.predicates()) {
      if (!m.predicates().contains(name)) m.definePredicate(name, arity);
    }
  }
  return result;
}

}  // namespace folgrade
