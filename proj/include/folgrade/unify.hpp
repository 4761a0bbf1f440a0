#pragma once

// Syntactic unification and matching with occurs check.

#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "folgrade/printer.hpp"
#include "folgrade/syntax.hpp"

namespace folgrade {

class Substitution {
 public:
  bool empty() const { return bindings_.empty(); }
  std::size_t size() const { return bindings_.size(); }
  const std::map<std::string, Term>& bindings() const { return bindings_; }

  const Term* lookup(const std::string& var) const {
    auto it = bindings_.find(var);
    return it == bindings_.end() ? nullptr : &it->second;
  }

  /// Adds var -> t without any consistency check.
  void bind(const std::string& var, Term t) { bindings_.insert_or_assign(var, std::move(t)); }

  /// Applies the substitution, following chains of bindings.
  Term apply(const Term& t) const {
    if (bindings_.empty() || t.isGround()) return t;
    if (t.isVariable()) {
      const Term* bound = lookup(t.name());
      return bound ? apply(*bound) : t;
    }
    std::vector<Term> args;
    args.reserve(t.arity());
    bool changed = false;
    for (const Term& a : t.args()) {
      args.push_back(apply(a));
      changed = changed || !args.back().sameNode(a);
    }
    return changed ? Term::apply(t.name(), std::move(args)) : t;
  }

  /// Applies to an atom or an equality.
  Formula apply(const Formula& atomic) const {
    if (atomic.isEquality()) return Formula::equality(apply(atomic.left()), apply(atomic.right()));
    std::vector<Term> args;
    args.reserve(atomic.terms().size());
    for (const Term& t : atomic.terms()) args.push_back(apply(t));
    return Formula::atom(atomic.predicate(), std::move(args));
  }

  /// Rewrites every binding to its fully applied form, which makes the
  /// substitution idempotent.
  void normalize() {
    std::map<std::string, Term> resolved;
    for (const auto& [var, t] : bindings_) resolved.insert_or_assign(var, apply(t));
    bindings_ = std::move(resolved);
  }

  friend std::ostream& operator<<(std::ostream& out, const Substitution& s) {
    out << '{';
    bool first = true;
    for (const auto& [var, t] : s.bindings_) {
      if (!first) out << ", ";
      first = false;
      out << var << " -> " << t;
    }
    return out << '}';
  }

  std::string toString() const {
    std::ostringstream out;
    out << *this;
    return out.str();
  }

 private:
  std::map<std::string, Term> bindings_;
};

namespace detail {

inline Term walk(const Term& t, const Substitution& s) {
  Term current = t;
  while (current.isVariable()) {
    const Term* next = s.lookup(current.name());
    if (!next) break;
    current = *next;
  }
  return current;
}

inline bool occurs(const std::string& var, const Term& t, const Substitution& s) {
  Term w = walk(t, s);
  if (w.isVariable()) return w.name() == var;
  for (const Term& a : w.args()) {
    if (occurs(var, a, s)) return true;
  }
  return false;
}

}  // namespace detail

/// Extends `s` (kept in triangular form) to unify a and b.
/// On failure `s` may hold partial bindings.
inline bool unifyInto(const Term& a, const Term& b, Substitution& s) {
  Term x = detail::walk(a, s);
  Term y = detail::walk(b, s);
  if (x.isVariable() && y.isVariable() && x.name() == y.name()) return true;
  if (x.isVariable()) {
    if (detail::occurs(x.name(), y, s)) return false;
    s.bind(x.name(), y);
    return true;
  }
  if (y.isVariable()) {
    if (detail::occurs(y.name(), x, s)) return false;
    s.bind(y.name(), x);
    return true;
  }
  if (x.kind() != y.kind() || x.name() != y.name() || x.arity() != y.arity()) return false;
  for (std::size_t i = 0; i < x.arity(); ++i) {
    if (!unifyInto(x.args()[i], y.args()[i], s)) return false;
  }
  return true;
}

inline bool unifyInto(const Formula& a, const Formula& b, Substitution& s) {
  if (a.kind() != b.kind() || !a.isAtomic()) return false;
  if (a.isAtom() && a.predicate() != b.predicate()) return false;
  if (a.terms().size() != b.terms().size()) return false;
  for (std::size_t i = 0; i < a.terms().size(); ++i) {
    if (!unifyInto(a.terms()[i], b.terms()[i], s)) return false;
  }
  return true;
}

/// Most general unifier of two terms, or nullopt. The result is idempotent.
inline std::optional<Substitution> unify(const Term& a, const Term& b) {
  Substitution s;
  if (!unifyInto(a, b, s)) return std::nullopt;
  s.normalize();
  return s;
}

/// Most general unifier of two atoms (or two equalities).
inline std::optional<Substitution> unify(const Formula& a, const Formula& b) {
  Substitution s;
  if (!unifyInto(a, b, s)) return std::nullopt;
  s.normalize();
  return s;
}

/// One-way matching: extends `s` so that s(pattern) == target, binding only
/// variables of `pattern`. Variables of `target` are treated as constants.
inline bool matchInto(const Term& pattern, const Term& target, Substitution& s) {
  if (pattern.isVariable()) {
    if (const Term* bound = s.lookup(pattern.name())) return *bound == target;
    s.bind(pattern.name(), target);
    return true;
  }
  if (pattern.kind() != target.kind() || pattern.name() != target.name() || pattern.arity() != target.arity()) {
    return false;
  }
  for (std::size_t i = 0; i < pattern.arity(); ++i) {
    if (!matchInto(pattern.args()[i], target.args()[i], s)) return false;
  }
  return true;
}

inline bool matchInto(const Formula& pattern, const Formula& target, Substitution& s) {
  if (pattern.kind() != target.kind() || !pattern.isAtomic()) return false;
  if (pattern.isAtom() && pattern.predicate() != target.predicate()) return false;
  if (pattern.terms().size() != target.terms().size()) return false;
  for (std::size_t i = 0; i < pattern.terms().size(); ++i) {
    if (!matchInto(pattern.terms()[i], target.terms()[i], s)) return false;
  }
  return true;
}

}  // namespace folgrade
