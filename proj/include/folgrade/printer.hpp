#pragma once

#include <ostream>
#include <sstream>
#include <string>

#include "folgrade/syntax.hpp"

namespace folgrade {

inline void format(std::ostream& out, const Term& t) {
  out << t.name();
  if (!t.isApplication()) return;
  out << '(';
  for (std::size_t i = 0; i < t.arity(); ++i) {
    if (i > 0) out << ", ";
    format(out, t.args()[i]);
  }
  out << ')';
}

inline std::string format(const Term& t) {
  if (!t.isApplication()) return t.name();
  std::ostringstream out;
  format(out, t);
  return out.str();
}

namespace detail {

enum Precedence : int { kIff = 1, kImplies = 2, kOr = 3, kAnd = 4, kUnary = 5 };

inline int precedence(const Formula& f) {
  switch (f.kind()) {
    case Formula::Kind::Iff: return kIff;
    case Formula::Kind::Implies: return kImplies;
    case Formula::Kind::Or: return kOr;
    case Formula::Kind::And: return kAnd;
    default: return kUnary;
  }
}

inline const char* connective(Formula::Kind kind) {
  switch (kind) {
    case Formula::Kind::Iff: return " <-> ";
    case Formula::Kind::Implies: return " -> ";
    case Formula::Kind::Or: return " | ";
    case Formula::Kind::And: return " & ";
    default: return "";
  }
}

// `rightOpen` is true when nothing follows the printed text inside its
// enclosing group, so a quantifier body may extend to the end.
inline void format(std::ostream& out, const Formula& f, int minPrecedence, bool rightOpen) {
  using K = Formula::Kind;
  const bool parens = precedence(f) < minPrecedence || (f.isQuantifier() && !rightOpen);
  if (parens) {
    out << '(';
    rightOpen = true;
  }
  switch (f.kind()) {
    case K::Atom:
      out << f.predicate() << '(';
      for (std::size_t i = 0; i < f.terms().size(); ++i) {
        if (i > 0) out << ", ";
        format(out, f.terms()[i]);
      }
      out << ')';
      break;
    case K::Equality:
      format(out, f.left());
      out << " = ";
      format(out, f.right());
      break;
    case K::Not:
      if (f.operand().isEquality()) {
        format(out, f.operand().left());
        out << " != ";
        format(out, f.operand().right());
      } else {
        out << '-';
        format(out, f.operand(), kUnary, rightOpen);
      }
      break;
    case K::ForAll:
    case K::Exists:
      out << (f.kind() == K::ForAll ? "all " : "exists ") << f.variable() << ' ';
      // Binary bodies are always bracketed for readability.
      format(out, f.body(), f.body().isBinary() ? kUnary + 1 : kUnary, true);
      break;
    case K::Iff:
      // Chained biconditionals are always bracketed.
      format(out, f.lhs(), kImplies, false);
      out << connective(f.kind());
      format(out, f.rhs(), kImplies, rightOpen);
      break;
    case K::Implies:
      format(out, f.lhs(), kOr, false);
      out << connective(f.kind());
      format(out, f.rhs(), kImplies, rightOpen);
      break;
    case K::Or:
    case K::And: {
      const int p = precedence(f);
      format(out, f.lhs(), p, false);
      out << connective(f.kind());
      format(out, f.rhs(), p + 1, rightOpen);
      break;
    }
  }
  if (parens) out << ')';
}

}  // namespace detail

/// Renders `f` in the concrete syntax accepted by `parse`, with the fewest
/// parentheses the precedence rules allow.
inline void format(std::ostream& out, const Formula& f) { detail::format(out, f, 0, true); }

inline std::string format(const Formula& f) {
  std::ostringstream out;
  format(out, f);
  return out.str();
}

inline std::ostream& operator<<(std::ostream& out, const Term& t) {
  format(out, t);
  return out;
}

inline std::ostream& operator<<(std::ostream& out, const Formula& f) {
  format(out, f);
  return out;
}

}  // namespace folgrade
