#pragma once

// Clausal normal form: NNF, Skolemization, CNF distribution and clause
// extraction, plus the equality axioms used in place of paramodulation.

#include <cstddef>
#include <map>
#include <ostream>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "folgrade/printer.hpp"
#include "folgrade/signature.hpp"
#include "folgrade/syntax.hpp"

namespace folgrade {

/// Prefix of generated Skolem symbols; `sk<digits>` is rejected by the parser.
inline constexpr const char* kSkolemPrefix = "sk";

/// A possibly negated atom or equality.
struct Literal {
  bool positive;
  Formula atom;

  Literal(bool positive, Formula atom) : positive(positive), atom(std::move(atom)) {
    if (!this->atom.isAtomic()) throw std::invalid_argument("literal atom must be an atom or an equality");
  }

  Literal complement() const { return Literal(!positive, atom); }
  Formula toFormula() const { return positive ? atom : Formula::negation(atom); }
  bool isEquality() const { return atom.isEquality(); }

  friend bool operator==(const Literal& a, const Literal& b) { return a.positive == b.positive && a.atom == b.atom; }
};

/// Disjunction of literals; variables are implicitly universal.
struct Clause {
  std::vector<Literal> literals;

  bool empty() const { return literals.empty(); }
  std::size_t size() const { return literals.size(); }
};

struct ClauseSet {
  std::vector<Clause> clauses;
  std::size_t skolemCounter = 0;
  /// Skolem constants and functions introduced while clausifying.
  Signature skolemSymbols;
};

class ClauseExplosion : public std::runtime_error {
 public:
  ClauseExplosion(std::size_t count, std::size_t cap)
      : std::runtime_error("clause normal form exceeds " + std::to_string(cap) + " clauses (" + std::to_string(count) +
                           " needed)"),
        count_(count) {}
  std::size_t count() const { return count_; }

 private:
  std::size_t count_;
};

inline constexpr std::size_t kDefaultClauseCap = 10'000;

// ---------------------------------------------------------------------------
// Printing

inline Formula toFormula(const Clause& c) {
  if (c.literals.empty()) throw std::invalid_argument("the empty clause has no formula form");
  Formula f = c.literals.front().toFormula();
  for (std::size_t i = 1; i < c.literals.size(); ++i) f = Formula::disjunction(f, c.literals[i].toFormula());
  return f;
}

inline std::ostream& operator<<(std::ostream& out, const Literal& l) { return out << l.toFormula(); }

inline std::ostream& operator<<(std::ostream& out, const Clause& c) {
  if (c.empty()) return out << "$F";
  return out << toFormula(c);
}

inline std::string format(const Clause& c) {
  std::ostringstream out;
  out << c;
  return out.str();
}

// ---------------------------------------------------------------------------
// Negation normal form

namespace detail {

inline Formula nnf(const Formula& f, bool positive) {
  using K = Formula::Kind;
  switch (f.kind()) {
    case K::Atom:
    case K::Equality:
      return positive ? f : Formula::negation(f);
    case K::Not:
      return nnf(f.operand(), !positive);
    case K::And:
    case K::Or: {
      const bool conj = (f.kind() == K::And) == positive;
      Formula l = nnf(f.lhs(), positive);
      Formula r = nnf(f.rhs(), positive);
      return conj ? Formula::conjunction(std::move(l), std::move(r)) : Formula::disjunction(std::move(l), std::move(r));
    }
    case K::Implies:
      if (positive) return Formula::disjunction(nnf(f.lhs(), false), nnf(f.rhs(), true));
      return Formula::conjunction(nnf(f.lhs(), true), nnf(f.rhs(), false));
    case K::Iff:
      if (positive) {
        return Formula::conjunction(Formula::disjunction(nnf(f.lhs(), false), nnf(f.rhs(), true)),
                                    Formula::disjunction(nnf(f.rhs(), false), nnf(f.lhs(), true)));
      }
      return Formula::conjunction(Formula::disjunction(nnf(f.lhs(), true), nnf(f.rhs(), true)),
                                  Formula::disjunction(nnf(f.lhs(), false), nnf(f.rhs(), false)));
    case K::ForAll:
    case K::Exists: {
      const bool universal = (f.kind() == K::ForAll) == positive;
      return Formula::quantified(universal ? K::ForAll : K::Exists, f.variable(), nnf(f.body(), positive));
    }
  }
  return f;
}

}  // namespace detail

/// Equivalent formula with no `->` or `<->` and negation only on atoms.
inline Formula toNNF(const Formula& f) { return detail::nnf(f, true); }

inline bool isNNF(const Formula& f) {
  using K = Formula::Kind;
  switch (f.kind()) {
    case K::Atom:
    case K::Equality: return true;
    case K::Not: return f.operand().isAtomic();
    case K::And:
    case K::Or: return isNNF(f.lhs()) && isNNF(f.rhs());
    case K::ForAll:
    case K::Exists: return isNNF(f.body());
    default: return false;
  }
}

// ---------------------------------------------------------------------------
// Renaming and Skolemization

namespace detail {

inline Term renameTerm(const Term& t, const std::map<std::string, std::string>& names) {
  if (t.isVariable()) {
    auto it = names.find(t.name());
    return it == names.end() ? t : Term::variable(it->second);
  }
  if (t.isConstant()) return t;
  std::vector<Term> args;
  for (const Term& a : t.args()) args.push_back(renameTerm(a, names));
  return Term::apply(t.name(), std::move(args));
}

inline Formula renameBound(const Formula& f, std::map<std::string, std::string>& names, std::set<std::string>& used) {
  using K = Formula::Kind;
  switch (f.kind()) {
    case K::Atom: {
      std::vector<Term> args;
      for (const Term& t : f.terms()) args.push_back(renameTerm(t, names));
      return Formula::atom(f.predicate(), std::move(args));
    }
    case K::Equality:
      return Formula::equality(renameTerm(f.left(), names), renameTerm(f.right(), names));
    case K::Not:
      return Formula::negation(renameBound(f.operand(), names, used));
    case K::ForAll:
    case K::Exists: {
      std::string fresh = freshName(f.variable(), used);
      used.insert(fresh);
      auto previous = names.find(f.variable()) != names.end() ? std::optional(names[f.variable()]) : std::nullopt;
      names[f.variable()] = fresh;
      Formula body = renameBound(f.body(), names, used);
      if (previous) names[f.variable()] = *previous; else names.erase(f.variable());
      return Formula::quantified(f.kind(), fresh, std::move(body));
    }
    default: {
      Formula lhs = renameBound(f.lhs(), names, used);
      Formula rhs = renameBound(f.rhs(), names, used);
      return Formula::binary(f.kind(), std::move(lhs), std::move(rhs));
    }
  }
}

}  // namespace detail

/// Renames bound variables so that every quantifier binds a distinct name
/// that is also distinct from the free variables.
inline Formula renameBoundApart(const Formula& f) {
  std::set<std::string> used = freeVariables(f);
  std::map<std::string, std::string> names;
  return detail::renameBound(f, names, used);
}

/// Counter and symbol table shared by the Skolemizations of one problem.
struct SkolemContext {
  std::size_t counter = 0;
  Signature symbols;

  std::string nextName() { return kSkolemPrefix + std::to_string(++counter); }
};

namespace detail {

inline Formula skolemize(const Formula& f, std::vector<std::string>& universals, SkolemContext& ctx) {
  using K = Formula::Kind;
  switch (f.kind()) {
    case K::ForAll: {
      universals.push_back(f.variable());
      Formula body = skolemize(f.body(), universals, ctx);
      universals.pop_back();
      return Formula::forAll(f.variable(), std::move(body));
    }
    case K::Exists: {
      std::vector<Term> args;
      std::set<std::string> seen;
      for (auto it = universals.rbegin(); it != universals.rend(); ++it) {
        if (seen.insert(*it).second) args.insert(args.begin(), Term::variable(*it));
      }
      std::string name = ctx.nextName();
      Term witness = args.empty() ? Term::constant(name) : Term::apply(name, args);
      if (args.empty()) {
        ctx.symbols.addConstant(name);
      } else {
        ctx.symbols.addFunction(name, args.size());
      }
      return skolemize(substitute(f.body(), f.variable(), witness), universals, ctx);
    }
    case K::And:
    case K::Or: {
      // Sequenced explicitly so Skolem symbols are numbered in pre-order.
      Formula lhs = skolemize(f.lhs(), universals, ctx);
      Formula rhs = skolemize(f.rhs(), universals, ctx);
      return Formula::binary(f.kind(), std::move(lhs), std::move(rhs));
    }
    default:
      return f;
  }
}

}  // namespace detail

/// Replaces each existential of an NNF formula by a fresh Skolem term over
/// the enclosing universal variables. The result is equisatisfiable.
inline Formula skolemize(const Formula& nnfFormula, SkolemContext& ctx) {
  if (!isNNF(nnfFormula)) throw std::invalid_argument("skolemize expects a formula in negation normal form");
  std::vector<std::string> universals;
  return detail::skolemize(nnfFormula, universals, ctx);
}

inline Formula skolemize(const Formula& nnfFormula) {
  SkolemContext ctx;
  return skolemize(nnfFormula, ctx);
}

// ---------------------------------------------------------------------------
// Clausification

namespace detail {

using RawClauses = std::vector<std::vector<Literal>>;

inline RawClauses distribute(const Formula& f, std::size_t cap) {
  using K = Formula::Kind;
  switch (f.kind()) {
    case K::Atom:
    case K::Equality:
      return {{Literal(true, f)}};
    case K::Not:
      return {{Literal(false, f.operand())}};
    case K::ForAll:
      return distribute(f.body(), cap);
    case K::And: {
      RawClauses left = distribute(f.lhs(), cap);
      RawClauses right = distribute(f.rhs(), cap);
      if (left.size() + right.size() > cap) throw ClauseExplosion(left.size() + right.size(), cap);
      left.insert(left.end(), std::make_move_iterator(right.begin()), std::make_move_iterator(right.end()));
      return left;
    }
    case K::Or: {
      RawClauses left = distribute(f.lhs(), cap);
      RawClauses right = distribute(f.rhs(), cap);
      if (left.size() * right.size() > cap) throw ClauseExplosion(left.size() * right.size(), cap);
      RawClauses out;
      out.reserve(left.size() * right.size());
      for (const auto& a : left) {
        for (const auto& b : right) {
          std::vector<Literal> merged = a;
          merged.insert(merged.end(), b.begin(), b.end());
          out.push_back(std::move(merged));
        }
      }
      return out;
    }
    default:
      throw std::logic_error("distribute: formula is not a Skolemized NNF matrix");
  }
}

inline Term standardizeTerm(const Term& t, std::map<std::string, std::string>& names, std::size_t& next) {
  if (t.isVariable()) {
    auto [it, inserted] = names.try_emplace(t.name());
    if (inserted) it->second = "v" + std::to_string(++next);
    return Term::variable(it->second);
  }
  if (t.isConstant()) return t;
  std::vector<Term> args;
  for (const Term& a : t.args()) args.push_back(standardizeTerm(a, names, next));
  return Term::apply(t.name(), std::move(args));
}

}  // namespace detail

/// Drops duplicate literals and `t != t`. Returns false when the clause is a
/// tautology (contains `t = t` or a complementary pair).
inline bool simplifyClause(std::vector<Literal>& literals) {
  std::vector<Literal> out;
  for (const Literal& l : literals) {
    if (l.isEquality() && l.atom.left() == l.atom.right()) {
      if (l.positive) return false;
      continue;
    }
    bool duplicate = false;
    for (const Literal& m : out) {
      if (m.atom == l.atom) {
        if (m.positive != l.positive) return false;
        duplicate = true;
        break;
      }
    }
    if (!duplicate) out.push_back(l);
  }
  literals = std::move(out);
  return true;
}

/// Renames the variables of `c` to `v<n>` names drawn from `counter`.
inline Clause standardizeApart(const Clause& c, std::size_t& counter) {
  std::map<std::string, std::string> names;
  Clause out;
  out.literals.reserve(c.literals.size());
  for (const Literal& l : c.literals) {
    if (l.isEquality()) {
      out.literals.emplace_back(l.positive,
                                Formula::equality(detail::standardizeTerm(l.atom.left(), names, counter),
                                                  detail::standardizeTerm(l.atom.right(), names, counter)));
    } else {
      std::vector<Term> args;
      for (const Term& t : l.atom.terms()) args.push_back(detail::standardizeTerm(t, names, counter));
      out.literals.emplace_back(l.positive, Formula::atom(l.atom.predicate(), std::move(args)));
    }
  }
  return out;
}

/// Sentence to an equisatisfiable clause set:
/// NNF, Skolemize, drop universals, distribute, split, delete tautologies.
inline ClauseSet clausify(const Formula& f, std::size_t cap = kDefaultClauseCap) {
  SkolemContext ctx;
  Formula matrix = skolemize(renameBoundApart(toNNF(f)), ctx);
  detail::RawClauses raw = detail::distribute(matrix, cap);
  ClauseSet out;
  std::size_t counter = 0;
  for (auto& literals : raw) {
    if (!simplifyClause(literals)) continue;
    out.clauses.push_back(standardizeApart(Clause{std::move(literals)}, counter));
  }
  out.skolemCounter = ctx.counter;
  out.skolemSymbols = std::move(ctx.symbols);
  return out;
}

// ---------------------------------------------------------------------------
// Equality axioms

/// Reflexivity, symmetry and transitivity, then one substitution clause per
/// argument position of every function and predicate of `sig`.
inline ClauseSet equalityAxioms(const Signature& sig) {
  auto var = [](const std::string& n) { return Term::variable(n); };
  auto eq = [](bool positive, Term a, Term b) { return Literal(positive, Formula::equality(std::move(a), std::move(b))); };
  ClauseSet out;
  out.clauses.push_back(Clause{{eq(true, var("x"), var("x"))}});
  out.clauses.push_back(Clause{{eq(false, var("x"), var("y")), eq(true, var("y"), var("x"))}});
  out.clauses.push_back(
      Clause{{eq(false, var("x"), var("y")), eq(false, var("y"), var("z")), eq(true, var("x"), var("z"))}});

  auto argumentLists = [&](std::size_t arity, std::size_t position) {
    std::vector<Term> left;
    std::vector<Term> right;
    for (std::size_t i = 0; i < arity; ++i) {
      if (i == position) {
        left.push_back(var("x"));
        right.push_back(var("y"));
      } else {
        left.push_back(var("z" + std::to_string(i + 1)));
        right.push_back(var("z" + std::to_string(i + 1)));
      }
    }
    return std::make_pair(left, right);
  };

  for (const auto& [name, arity] : sig.functions()) {
    for (std::size_t i = 0; i < arity; ++i) {
      auto [left, right] = argumentLists(arity, i);
      out.clauses.push_back(Clause{{eq(false, var("x"), var("y")),
                                    eq(true, Term::apply(name, std::move(left)), Term::apply(name, std::move(right)))}});
    }
  }
  for (const auto& [name, arity] : sig.predicates()) {
    for (std::size_t i = 0; i < arity; ++i) {
      auto [left, right] = argumentLists(arity, i);
      out.clauses.push_back(Clause{{eq(false, var("x"), var("y")), Literal(false, Formula::atom(name, std::move(left))),
                                    Literal(true, Formula::atom(name, std::move(right)))}});
    }
  }
  return out;
}

}  // namespace folgrade
