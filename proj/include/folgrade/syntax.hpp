#pragma once

// Abstract syntax of first-order logic with equality.
//
// Terms and formulas are immutable values backed by shared nodes; copying is
// cheap and instances may be shared freely across threads.

#include <cctype>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace folgrade {

namespace detail {

inline std::size_t hashCombine(std::size_t seed, std::size_t value) {
  return seed ^ (value + 0x9e3779b97f4a7c15ULL + (seed << 6) + (seed >> 2));
}

}  // namespace detail

/// Lowercase-initial identifiers are variables; everything else names a
/// constant, function or predicate.
inline bool isVariableName(std::string_view name) {
  return !name.empty() && std::islower(static_cast<unsigned char>(name.front()));
}

class Term {
 public:
  enum class Kind : std::uint8_t { Variable, Constant, Application };

  Term() = delete;

  static Term variable(std::string name) { return Term(Kind::Variable, std::move(name), {}); }
  static Term constant(std::string name) { return Term(Kind::Constant, std::move(name), {}); }
  static Term apply(std::string function, std::vector<Term> args) {
    if (args.empty()) {
      throw std::invalid_argument("function application needs at least one argument: " + function);
    }
    return Term(Kind::Application, std::move(function), std::move(args));
  }

  Kind kind() const { return node_->kind; }
  bool isVariable() const { return node_->kind == Kind::Variable; }
  bool isConstant() const { return node_->kind == Kind::Constant; }
  bool isApplication() const { return node_->kind == Kind::Application; }

  const std::string& name() const { return node_->name; }
  std::span<const Term> args() const { return node_->args; }
  std::size_t arity() const { return node_->args.size(); }

  bool isGround() const { return node_->ground; }
  /// Number of symbol occurrences.
  std::size_t weight() const { return node_->weight; }
  std::size_t hash() const { return node_->hash; }

  bool sameNode(const Term& other) const { return node_ == other.node_; }

  friend bool operator==(const Term& a, const Term& b) {
    if (a.node_ == b.node_) return true;
    if (a.node_->hash != b.node_->hash || a.node_->kind != b.node_->kind ||
        a.node_->name != b.node_->name || a.node_->args.size() != b.node_->args.size()) {
      return false;
    }
    for (std::size_t i = 0; i < a.node_->args.size(); ++i) {
      if (!(a.node_->args[i] == b.node_->args[i])) return false;
    }
    return true;
  }

  /// Total structural order: kind, then name, then arguments.
  friend int compare(const Term& a, const Term& b) {
    if (a.node_ == b.node_) return 0;
    if (a.kind() != b.kind()) return a.kind() < b.kind() ? -1 : 1;
    if (int c = a.name().compare(b.name()); c != 0) return c < 0 ? -1 : 1;
    if (a.arity() != b.arity()) return a.arity() < b.arity() ? -1 : 1;
    for (std::size_t i = 0; i < a.arity(); ++i) {
      if (int c = compare(a.args()[i], b.args()[i]); c != 0) return c;
    }
    return 0;
  }
  friend bool operator<(const Term& a, const Term& b) { return compare(a, b) < 0; }

 private:
  struct Node {
    Kind kind;
    std::string name;
    std::vector<Term> args;
    std::size_t hash;
    std::size_t weight;
    bool ground;
  };

  Term(Kind kind, std::string name, std::vector<Term> args) {
    std::size_t h = detail::hashCombine(std::hash<std::string>{}(name), static_cast<std::size_t>(kind));
    std::size_t weight = 1;
    bool ground = kind != Kind::Variable;
    for (const Term& a : args) {
      h = detail::hashCombine(h, a.hash());
      weight += a.weight();
      ground = ground && a.isGround();
    }
    node_ = std::make_shared<const Node>(Node{kind, std::move(name), std::move(args), h, weight, ground});
  }

  std::shared_ptr<const Node> node_;
};

struct TermHash {
  std::size_t operator()(const Term& t) const { return t.hash(); }
};

class Formula {
 public:
  enum class Kind : std::uint8_t { Atom, Equality, Not, And, Or, Implies, Iff, ForAll, Exists };

  Formula() = delete;

  static Formula atom(std::string predicate, std::vector<Term> args) {
    return Formula(Kind::Atom, std::move(predicate), std::move(args), {});
  }
  static Formula equality(Term left, Term right) {
    return Formula(Kind::Equality, {}, {std::move(left), std::move(right)}, {});
  }
  static Formula negation(Formula f) { return Formula(Kind::Not, {}, {}, {std::move(f)}); }
  static Formula conjunction(Formula l, Formula r) { return binary(Kind::And, std::move(l), std::move(r)); }
  static Formula disjunction(Formula l, Formula r) { return binary(Kind::Or, std::move(l), std::move(r)); }
  static Formula implication(Formula l, Formula r) { return binary(Kind::Implies, std::move(l), std::move(r)); }
  static Formula biconditional(Formula l, Formula r) { return binary(Kind::Iff, std::move(l), std::move(r)); }
  static Formula forAll(std::string var, Formula body) { return quantified(Kind::ForAll, std::move(var), std::move(body)); }
  static Formula exists(std::string var, Formula body) { return quantified(Kind::Exists, std::move(var), std::move(body)); }

  static Formula binary(Kind kind, Formula l, Formula r) {
    return Formula(kind, {}, {}, {std::move(l), std::move(r)});
  }
  static Formula quantified(Kind kind, std::string var, Formula body) {
    if (!isVariableName(var)) throw std::invalid_argument("quantified name is not a variable: " + var);
    return Formula(kind, std::move(var), {}, {std::move(body)});
  }

  Kind kind() const { return node_->kind; }
  bool isAtom() const { return kind() == Kind::Atom; }
  bool isEquality() const { return kind() == Kind::Equality; }
  bool isAtomic() const { return isAtom() || isEquality(); }
  bool isQuantifier() const { return kind() == Kind::ForAll || kind() == Kind::Exists; }
  bool isBinary() const {
    return kind() == Kind::And || kind() == Kind::Or || kind() == Kind::Implies || kind() == Kind::Iff;
  }
  /// An atom, an equality, or the negation of either.
  bool isLiteral() const { return isAtomic() || (kind() == Kind::Not && operand().isAtomic()); }

  /// Predicate name of an atom.
  const std::string& predicate() const { return node_->name; }
  /// Bound variable of a quantifier.
  const std::string& variable() const { return node_->name; }
  /// Atom arguments, or {left, right} of an equality.
  std::span<const Term> terms() const { return node_->terms; }
  const Term& left() const { return node_->terms[0]; }
  const Term& right() const { return node_->terms[1]; }

  const Formula& operand() const { return node_->children[0]; }
  const Formula& body() const { return node_->children[0]; }
  const Formula& lhs() const { return node_->children[0]; }
  const Formula& rhs() const { return node_->children[1]; }

  std::size_t hash() const { return node_->hash; }
  std::size_t size() const { return node_->size; }

  friend bool operator==(const Formula& a, const Formula& b) {
    if (a.node_ == b.node_) return true;
    if (a.node_->hash != b.node_->hash || a.kind() != b.kind() || a.node_->name != b.node_->name ||
        a.node_->terms.size() != b.node_->terms.size() ||
        a.node_->children.size() != b.node_->children.size()) {
      return false;
    }
    for (std::size_t i = 0; i < a.node_->terms.size(); ++i) {
      if (!(a.node_->terms[i] == b.node_->terms[i])) return false;
    }
    for (std::size_t i = 0; i < a.node_->children.size(); ++i) {
      if (!(a.node_->children[i] == b.node_->children[i])) return false;
    }
    return true;
  }

 private:
  struct Node {
    Kind kind;
    std::string name;
    std::vector<Term> terms;
    std::vector<Formula> children;
    std::size_t hash;
    std::size_t size;
  };

  Formula(Kind kind, std::string name, std::vector<Term> terms, std::vector<Formula> children) {
    std::size_t h = detail::hashCombine(std::hash<std::string>{}(name), static_cast<std::size_t>(kind) + 17);
    std::size_t size = 1;
    for (const Term& t : terms) {
      h = detail::hashCombine(h, t.hash());
      size += t.weight();
    }
    for (const Formula& c : children) {
      h = detail::hashCombine(h, c.hash());
      size += c.size();
    }
    node_ = std::make_shared<const Node>(Node{kind, std::move(name), std::move(terms), std::move(children), h, size});
  }

  std::shared_ptr<const Node> node_;
};

struct FormulaHash {
  std::size_t operator()(const Formula& f) const { return f.hash(); }
};

// ---------------------------------------------------------------------------
// Variables and substitution

inline void collectVariables(const Term& t, std::set<std::string>& out) {
  if (t.isVariable()) {
    out.insert(t.name());
    return;
  }
  for (const Term& a : t.args()) collectVariables(a, out);
}

inline std::set<std::string> variablesOf(const Term& t) {
  std::set<std::string> out;
  collectVariables(t, out);
  return out;
}

inline bool occursIn(const std::string& var, const Term& t) {
  if (t.isVariable()) return t.name() == var;
  for (const Term& a : t.args()) {
    if (occursIn(var, a)) return true;
  }
  return false;
}

namespace detail {

inline void freeVariables(const Formula& f, std::set<std::string>& bound, std::set<std::string>& out) {
  switch (f.kind()) {
    case Formula::Kind::Atom:
    case Formula::Kind::Equality:
      for (const Term& t : f.terms()) {
        for (const std::string& v : variablesOf(t)) {
          if (!bound.contains(v)) out.insert(v);
        }
      }
      return;
    case Formula::Kind::Not:
      freeVariables(f.operand(), bound, out);
      return;
    case Formula::Kind::ForAll:
    case Formula::Kind::Exists: {
      bool inserted = bound.insert(f.variable()).second;
      freeVariables(f.body(), bound, out);
      if (inserted) bound.erase(f.variable());
      return;
    }
    default:
      freeVariables(f.lhs(), bound, out);
      freeVariables(f.rhs(), bound, out);
      return;
  }
}

inline void boundVariables(const Formula& f, std::set<std::string>& out) {
  if (f.isAtomic()) return;
  if (f.isQuantifier()) out.insert(f.variable());
  if (f.kind() == Formula::Kind::Not || f.isQuantifier()) {
    boundVariables(f.operand(), out);
  } else {
    boundVariables(f.lhs(), out);
    boundVariables(f.rhs(), out);
  }
}

}  // namespace detail

inline std::set<std::string> freeVariables(const Formula& f) {
  std::set<std::string> bound;
  std::set<std::string> out;
  detail::freeVariables(f, bound, out);
  return out;
}

inline bool isSentence(const Formula& f) { return freeVariables(f).empty(); }

/// Every variable name occurring in f, free or bound.
inline std::set<std::string> allVariables(const Formula& f) {
  std::set<std::string> out;
  detail::boundVariables(f, out);
  for (const std::string& v : freeVariables(f)) out.insert(v);
  return out;
}

/// First name of the form `base`, `base1`, `base2`, ... not in `taken`.
inline std::string freshName(const std::string& base, const std::set<std::string>& taken) {
  std::string stem = base;
  while (!stem.empty() && std::isdigit(static_cast<unsigned char>(stem.back()))) stem.pop_back();
  if (stem.empty()) stem = "v";
  if (!taken.contains(base)) return base;
  for (std::size_t i = 1;; ++i) {
    std::string candidate = stem + std::to_string(i);
    if (!taken.contains(candidate)) return candidate;
  }
}

inline Term substitute(const Term& t, const std::string& var, const Term& replacement) {
  if (t.isVariable()) return t.name() == var ? replacement : t;
  if (t.isGround() || !occursIn(var, t)) return t;
  std::vector<Term> args;
  args.reserve(t.arity());
  for (const Term& a : t.args()) args.push_back(substitute(a, var, replacement));
  return Term::apply(t.name(), std::move(args));
}

/// Capture-avoiding substitution of `replacement` for the free occurrences of
/// `var`. Binders that would capture a variable of `replacement` are renamed.
inline Formula substitute(const Formula& f, const std::string& var, const Term& replacement) {
  using K = Formula::Kind;
  switch (f.kind()) {
    case K::Atom: {
      std::vector<Term> args;
      args.reserve(f.terms().size());
      for (const Term& t : f.terms()) args.push_back(substitute(t, var, replacement));
      return Formula::atom(f.predicate(), std::move(args));
    }
    case K::Equality:
      return Formula::equality(substitute(f.left(), var, replacement), substitute(f.right(), var, replacement));
    case K::Not:
      return Formula::negation(substitute(f.operand(), var, replacement));
    case K::ForAll:
    case K::Exists: {
      if (f.variable() == var) return f;
      if (!freeVariables(f.body()).contains(var)) return f;
      std::set<std::string> replacementVars = variablesOf(replacement);
      if (!replacementVars.contains(f.variable())) {
        return Formula::quantified(f.kind(), f.variable(), substitute(f.body(), var, replacement));
      }
      std::set<std::string> taken = allVariables(f.body());
      taken.insert(replacementVars.begin(), replacementVars.end());
      taken.insert(var);
      std::string renamed = freshName(f.variable(), taken);
      Formula body = substitute(f.body(), f.variable(), Term::variable(renamed));
      return Formula::quantified(f.kind(), renamed, substitute(body, var, replacement));
    }
    default:
      return Formula::binary(f.kind(), substitute(f.lhs(), var, replacement), substitute(f.rhs(), var, replacement));
  }
}

namespace detail {

inline bool alphaEqual(const Term& a, const Term& b, std::map<std::string, std::string>& left,
                       std::map<std::string, std::string>& right, std::size_t& depth) {
  if (a.kind() != b.kind()) return false;
  if (a.isVariable()) {
    auto la = left.find(a.name());
    auto rb = right.find(b.name());
    if (la == left.end() && rb == right.end()) return a.name() == b.name();
    if (la == left.end() || rb == right.end()) return false;
    return la->second == rb->second;
  }
  if (a.name() != b.name() || a.arity() != b.arity()) return false;
  for (std::size_t i = 0; i < a.arity(); ++i) {
    if (!alphaEqual(a.args()[i], b.args()[i], left, right, depth)) return false;
  }
  return true;
}

inline bool alphaEqual(const Formula& a, const Formula& b, std::map<std::string, std::string>& left,
                       std::map<std::string, std::string>& right, std::size_t& depth) {
  if (a.kind() != b.kind()) return false;
  switch (a.kind()) {
    case Formula::Kind::Atom:
      if (a.predicate() != b.predicate()) return false;
      [[fallthrough]];
    case Formula::Kind::Equality: {
      if (a.terms().size() != b.terms().size()) return false;
      for (std::size_t i = 0; i < a.terms().size(); ++i) {
        if (!alphaEqual(a.terms()[i], b.terms()[i], left, right, depth)) return false;
      }
      return true;
    }
    case Formula::Kind::Not:
      return alphaEqual(a.operand(), b.operand(), left, right, depth);
    case Formula::Kind::ForAll:
    case Formula::Kind::Exists: {
      // Bind both variables to a common de Bruijn-style marker.
      std::string marker = "#" + std::to_string(depth++);
      auto savedLeft = left.find(a.variable()) != left.end() ? std::optional(left[a.variable()]) : std::nullopt;
      auto savedRight = right.find(b.variable()) != right.end() ? std::optional(right[b.variable()]) : std::nullopt;
      left[a.variable()] = marker;
      right[b.variable()] = marker;
      bool result = alphaEqual(a.body(), b.body(), left, right, depth);
      if (savedLeft) left[a.variable()] = *savedLeft; else left.erase(a.variable());
      if (savedRight) right[b.variable()] = *savedRight; else right.erase(b.variable());
      return result;
    }
    default:
      return alphaEqual(a.lhs(), b.lhs(), left, right, depth) && alphaEqual(a.rhs(), b.rhs(), left, right, depth);
  }
}

}  // namespace detail

/// Structural equality modulo consistent renaming of bound variables.
inline bool alphaEquivalent(const Formula& a, const Formula& b) {
  std::map<std::string, std::string> left;
  std::map<std::string, std::string> right;
  std::size_t depth = 0;
  return detail::alphaEqual(a, b, left, right, depth);
}

// ---------------------------------------------------------------------------
// Symbol usage

/// Non-variable symbols occurring in a formula, with the arity of each use.
struct SymbolUsage {
  std::set<std::string> constants;
  std::map<std::string, std::size_t> functions;
  std::map<std::string, std::size_t> predicates;
  bool hasEquality = false;
};

namespace detail {

inline void collectSymbols(const Term& t, SymbolUsage& out) {
  if (t.isConstant()) out.constants.insert(t.name());
  if (t.isApplication()) {
    out.functions.emplace(t.name(), t.arity());
    for (const Term& a : t.args()) collectSymbols(a, out);
  }
}

}  // namespace detail

inline void collectSymbols(const Formula& f, SymbolUsage& out) {
  switch (f.kind()) {
    case Formula::Kind::Atom:
      out.predicates.emplace(f.predicate(), f.terms().size());
      for (const Term& t : f.terms()) detail::collectSymbols(t, out);
      return;
    case Formula::Kind::Equality:
      out.hasEquality = true;
      for (const Term& t : f.terms()) detail::collectSymbols(t, out);
      return;
    case Formula::Kind::Not:
    case Formula::Kind::ForAll:
    case Formula::Kind::Exists:
      collectSymbols(f.operand(), out);
      return;
    default:
      collectSymbols(f.lhs(), out);
      collectSymbols(f.rhs(), out);
      return;
  }
}

inline SymbolUsage symbolsOf(const Formula& f) {
  SymbolUsage out;
  collectSymbols(f, out);
  return out;
}

}  // namespace folgrade
