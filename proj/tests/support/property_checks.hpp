#pragma once

// Property checks shared by the GoogleTest suites and the acceptance binary.
// Each returns a report with the number of cases tried and the failures seen;
// nothing here asserts, so callers decide how to surface results.

#include <chrono>
#include <cstddef>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "folgrade/normalize.hpp"
#include "folgrade/parser.hpp"
#include "folgrade/printer.hpp"
#include "folgrade/semantics.hpp"
#include "folgrade/tableau.hpp"
#include "folgrade/unify.hpp"
#include "support/generators.hpp"
#include "support/oracle.hpp"

namespace props {

using folgrade::Formula;
using folgrade::Term;

struct Report {
  std::string name;
  std::size_t cases = 0;
  std::size_t checks = 0;
  std::size_t failures = 0;
  std::vector<std::string> examples;  // first few failures

  void fail(const std::string& what) {
    ++failures;
    if (examples.size() < 5) examples.push_back(what);
  }
  bool ok() const { return failures == 0; }
  std::string summary() const {
    std::ostringstream out;
    out << name << ": " << cases << " cases, " << checks << " checks, " << failures << " failures";
    for (const auto& e : examples) out << "\n    " << e;
    return out.str();
  }
};

// ---------------------------------------------------------------------------
// Parser round trip

inline Report parserRoundTrip(std::size_t count, std::uint32_t seed) {
  Report r{"parser round-trip"};
  gen::SentenceGenerator g(gen::richShape(), seed);
  const auto sig = g.shape().signature();
  for (std::size_t i = 0; i < count; ++i) {
    const Formula f = g.sentence();
    const std::string text = folgrade::format(f);
    ++r.cases;
    ++r.checks;
    try {
      const Formula back = folgrade::parse(text, sig);
      if (!(back == f) && !folgrade::alphaEquivalent(back, f)) r.fail("re-parsed differently: " + text);
      // Printing is a fixpoint after one round.
      if (folgrade::format(back) != text) r.fail("format not stable: " + text);
    } catch (const std::exception& e) {
      r.fail("did not re-parse: " + text + " (" + e.what() + ")");
    }
  }
  return r;
}

// ---------------------------------------------------------------------------
// NNF, renaming and Skolemization preserve meaning

namespace detail {

/// Expands a structure over `base` with Skolem tables to one over `full`.
inline oracle::Structure expand(const oracle::Structure& s, const oracle::Vocabulary& base,
                                const oracle::Vocabulary& full,
                                const std::vector<std::vector<std::uint32_t>>& skolemTables) {
  oracle::Structure out(full, s.size);
  auto skolemIndex = [](const std::string& name) { return std::stoul(name.substr(2)) - 1; };
  for (std::size_t i = 0; i < full.constants.size(); ++i) {
    const std::string& n = full.constants[i];
    const int b = base.constantId(n);
    out.constants[i] = b >= 0 ? s.constants[static_cast<std::size_t>(b)] : skolemTables.at(skolemIndex(n)).at(0);
  }
  for (std::size_t i = 0; i < full.functions.size(); ++i) {
    const std::string& n = full.functions[i].first;
    const int b = base.functionId(n);
    out.functions[i] = b >= 0 ? s.functions[static_cast<std::size_t>(b)] : skolemTables.at(skolemIndex(n));
  }
  for (std::size_t i = 0; i < full.predicates.size(); ++i) {
    out.predicates[i] = s.predicates[static_cast<std::size_t>(base.predicateId(full.predicates[i].first))];
  }
  return out;
}

}  // namespace detail

/// For every generated sentence f and every structure of size 1..3 over its
/// symbols: f, toNNF(f) and renameBoundApart(toNNF(f)) agree (under both the
/// oracle and the library's `evaluate`), and Skolemization is faithful in
/// both directions: a model of f expands (with witness-choosing Skolem
/// tables) to a model of sk(f), and in a non-model every sampled expansion
/// falsifies sk(f).
inline Report normalFormPreservation(std::size_t count, std::uint32_t seed, std::size_t maxDomain = 3) {
  Report r{"NNF/renaming/skolemization preservation"};
  gen::SentenceGenerator g(gen::twoPredicateShape(), seed);
  std::mt19937 rng(seed ^ 0x5bd1e995u);
  for (std::size_t i = 0; i < count; ++i) {
    const Formula f = g.sentence();
    const Formula n = folgrade::toNNF(f);
    const Formula renamed = folgrade::renameBoundApart(n);
    const Formula sk = folgrade::skolemize(renamed);
    ++r.cases;
    if (!folgrade::isNNF(n)) r.fail("not in NNF: " + folgrade::format(n));

    const oracle::Vocabulary base = oracle::Vocabulary::of({f});
    oracle::Vocabulary skVocabulary = base;
    skVocabulary.add(sk);
    const oracle::Compiled cf(f, base), cn(n, base), cr(renamed, base), cs(sk, skVocabulary);
    const auto& arities = cr.existentialArities();

    for (std::size_t size = 1; size <= maxDomain; ++size) {
      oracle::forEachStructure(base, size, [&](const oracle::Structure& s) {
        ++r.checks;
        const bool truth = cf.holds(s);
        const folgrade::Interpretation m = s.toInterpretation(base);
        if (folgrade::evaluate(f, m) != truth) {
          r.fail("oracle and evaluate disagree on " + folgrade::format(f));
        }
        if (cn.holds(s) != truth || folgrade::evaluate(n, m) != truth) {
          r.fail("NNF changed meaning: " + folgrade::format(f) + "  =>  " + folgrade::format(n));
          return false;
        }
        if (cr.holds(s) != truth || folgrade::evaluate(renamed, m) != truth) {
          r.fail("renaming changed meaning: " + folgrade::format(n) + "  =>  " + folgrade::format(renamed));
          return false;
        }
        std::vector<std::vector<std::uint32_t>> tables;
        for (std::size_t k : arities) tables.emplace_back(oracle::power(size, k), 0);
        if (truth) {
          cr.holdsChoosingWitnesses(s, tables);
          if (!cs.holds(detail::expand(s, base, skVocabulary, tables))) {
            r.fail("no Skolem expansion satisfies " + folgrade::format(sk) + " for model of " + folgrade::format(f));
            return false;
          }
        } else {
          for (int sample = 0; sample < 3; ++sample) {
            for (auto& t : tables) {
              for (auto& cell : t) cell = static_cast<std::uint32_t>(rng() % size);
            }
            if (cs.holds(detail::expand(s, base, skVocabulary, tables))) {
              r.fail("Skolem form satisfied where original fails: " + folgrade::format(f));
              return false;
            }
          }
        }
        return true;
      });
    }
  }
  return r;
}

// ---------------------------------------------------------------------------
// Unification

namespace detail {

/// Independent one-way matcher: extends `s` so that s(pattern) == target.
inline bool match(const Term& pattern, const Term& target, std::map<std::string, Term>& s) {
  if (pattern.isVariable()) {
    auto [it, inserted] = s.emplace(pattern.name(), target);
    return inserted || it->second == target;
  }
  if (pattern.kind() != target.kind() || pattern.name() != target.name() || pattern.arity() != target.arity()) {
    return false;
  }
  for (std::size_t i = 0; i < pattern.arity(); ++i) {
    if (!match(pattern.args()[i], target.args()[i], s)) return false;
  }
  return true;
}

inline Term applyAll(const Term& t, const std::map<std::string, Term>& s) {
  if (t.isVariable()) {
    auto it = s.find(t.name());
    return it == s.end() ? t : it->second;
  }
  if (t.isConstant()) return t;
  std::vector<Term> args;
  for (const Term& a : t.args()) args.push_back(applyAll(a, s));
  return Term::apply(t.name(), std::move(args));
}

/// Replaces random subterms of `t` by variables drawn from `pool`, recording
/// what each variable stood for in `gamma` (only when consistent).
inline Term generalize(const Term& t, std::mt19937& rng, const std::vector<std::string>& pool,
                       std::map<std::string, Term>& gamma) {
  if (rng() % 4 == 0) {
    const std::string& v = pool[rng() % pool.size()];
    auto it = gamma.find(v);
    if (it == gamma.end()) {
      gamma.emplace(v, t);
      return Term::variable(v);
    }
    if (it->second == t) return Term::variable(v);
  }
  if (!t.isApplication()) return t;
  std::vector<Term> args;
  for (const Term& a : t.args()) args.push_back(generalize(a, rng, pool, gamma));
  return Term::apply(t.name(), std::move(args));
}

}  // namespace detail

/// Two kinds of pairs: unifiable by construction (two independent
/// generalizations of one ground term, so a ground unifier gamma is known)
/// and arbitrary random pairs. On success, sigma(a) == sigma(b), sigma is
/// idempotent and gamma factors through sigma (sigma is at least as general).
/// Unifiable-by-construction pairs must succeed.
inline Report unifierProperties(std::size_t count, std::uint32_t seed) {
  Report r{"unifier correctness"};
  gen::Shape shape = gen::richShape();
  shape.variables = {"u", "v", "w", "x", "y", "z"};
  gen::SentenceGenerator g(shape, seed);
  std::mt19937& rng = g.rng();
  const std::vector<std::string> left = {"u", "v", "w"}, right = {"x", "y", "z"};
  const std::vector<std::string> all = {"u", "v", "w", "x", "y", "z"};

  for (std::size_t i = 0; i < count; ++i) {
    ++r.cases;
    const bool constructed = i % 2 == 0;
    Term a = Term::constant("A"), b = Term::constant("A");
    std::map<std::string, Term> gamma;
    if (constructed) {
      const Term ground = g.term(3, {});
      a = detail::generalize(ground, rng, left, gamma);
      b = detail::generalize(ground, rng, right, gamma);
    } else {
      a = g.term(3, all);
      b = g.term(3, all);
    }
    const std::string pair = folgrade::format(a) + " =? " + folgrade::format(b);
    const auto sigma = folgrade::unify(a, b);
    ++r.checks;
    if (!sigma) {
      if (constructed) r.fail("failed on unifiable pair " + pair);
      continue;
    }
    if (!(sigma->apply(a) == sigma->apply(b))) r.fail("sigma(a) != sigma(b) for " + pair);
    for (const auto& [v, t] : sigma->bindings()) {
      if (!(sigma->apply(t) == t)) r.fail("not idempotent on " + v + " for " + pair);
    }
    if (constructed) {
      // gamma = rho . sigma for some rho: match every sigma(v) against gamma(v).
      std::map<std::string, Term> rho;
      for (const std::string& v : all) {
        const Term target = detail::applyAll(Term::variable(v), gamma);
        if (!detail::match(sigma->apply(Term::variable(v)), target, rho)) {
          r.fail("not most general for " + pair + " (variable " + v + ")");
          break;
        }
      }
    }
  }
  return r;
}

// ---------------------------------------------------------------------------
// Countermodel certification

/// Checks a countermodel with the oracle's evaluator: every listed literal
/// holds and the falsified formula is false in the structure it induces.
inline bool oracleCertifies(const folgrade::Countermodel& cm, const folgrade::Signature& sig, std::string* why = nullptr) {
  const folgrade::InducedStructure induced = folgrade::induceStructure(cm, sig);
  oracle::Vocabulary v = oracle::Vocabulary::of({cm.falsifiedFormula});
  for (const auto& l : cm.literals) v.add(l.atom);
  const oracle::Structure s = oracle::fromInterpretation(induced.interpretation, v);
  if (oracle::Compiled(cm.falsifiedFormula, v).holds(s)) {
    if (why) *why = "formula holds in the induced structure";
    return false;
  }
  for (const auto& l : cm.literals) {
    if (oracle::Compiled(l.atom, v).holds(s) != l.positive) {
      if (why) *why = "literal fails: " + folgrade::format(l.toFormula());
      return false;
    }
  }
  return true;
}

/// Random pairs (f, mutation of f) go through findCountermodel; every
/// countermodel returned is re-verified by the oracle.
inline Report countermodelCertification(std::size_t count, std::uint32_t seed,
                                        std::chrono::milliseconds perCase = std::chrono::milliseconds(1000)) {
  Report r{"countermodel certification"};
  gen::Shape shape = gen::richShape();
  shape.maxDepth = 3;
  shape.maxTermDepth = 1;
  gen::SentenceGenerator g(shape, seed);
  const auto sig = shape.signature();
  std::size_t produced = 0;
  while (r.cases < count) {
    const Formula f = g.sentence();
    auto mutants = gen::allMutations(f);
    if (mutants.empty()) continue;
    const Formula m = mutants[g.rng()() % mutants.size()];
    ++r.cases;
    const Formula iff = Formula::biconditional(f, m);
    folgrade::TableauBudget budget;
    budget.deadline = folgrade::Deadline::after(perCase);
    auto cm = folgrade::findCountermodel(iff, sig, budget);
    if (!cm) continue;
    ++produced;
    ++r.checks;
    std::string why;
    if (!(cm->falsifiedFormula == iff)) r.fail("falsified formula differs from input");
    if (!oracleCertifies(*cm, sig, &why)) r.fail(folgrade::format(iff) + ": " + why);
  }
  r.name += " (" + std::to_string(produced) + " countermodels)";
  return r;
}

}  // namespace props
