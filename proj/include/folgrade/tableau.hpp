#pragma once

// Countermodel generation.
//
// The primary search is a ground analytic tableau for the negation of the
// input sentence, with iterative deepening on the number of instantiations
// of each universal formula per branch. Open branches are turned into
// Herbrand-style structures whose domain is the set of branch terms modulo
// the branch equalities. A bounded finite-model enumeration backs it up.
//
// Every countermodel leaving this module has been re-checked with
// `evaluate` against the structure its literal list induces.

#include <algorithm>
#include <cstddef>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "folgrade/congruence.hpp"
#include "folgrade/deadline.hpp"
#include "folgrade/model_finder.hpp"
#include "folgrade/normalize.hpp"
#include "folgrade/printer.hpp"
#include "folgrade/semantics.hpp"
#include "folgrade/signature.hpp"
#include "folgrade/syntax.hpp"

namespace folgrade {

struct Countermodel {
  enum class Source { Tableau, ModelSearch };

  /// One display name per domain element.
  std::vector<std::string> domain;
  /// Ground literals over signature symbols and witness names; predicate
  /// literals first, then equalities.
  std::vector<Literal> literals;
  Formula falsifiedFormula;
  Source source;
};

inline void printCountermodel(std::ostream& out, const Countermodel& cm) {
  out << "domain: ";
  for (std::size_t i = 0; i < cm.domain.size(); ++i) out << (i ? ", " : "") << cm.domain[i];
  out << '\n';
  for (const Literal& l : cm.literals) out << l << '\n';
}

struct TableauBudget {
  Deadline deadline;
  std::size_t maxGammaInstantiations = 4;
  std::size_t maxDomainSize = 4;
  /// Cap on tableau expansion steps across all deepening rounds.
  std::size_t maxSteps = 200'000;
  std::size_t maxModelSearchNodes = 2'000'000;
};

// ---------------------------------------------------------------------------
// Induced structures and certification

/// The structure a countermodel describes: elements are the domain names and
/// literal terms modulo the listed equalities, atoms listed positively are
/// true and every other atom is false. Signature constants the countermodel
/// does not mention denote the first element.
struct InducedStructure {
  Interpretation interpretation;
  std::map<std::string, Element> names;
};

inline InducedStructure induceStructure(const Countermodel& cm, const Signature& sig) {
  CongruenceClosure cc;
  // Elements named by a function term are introduced by the literals.
  for (const std::string& name : cm.domain) {
    if (isIdentifier(name)) cc.add(Term::constant(name));
  }
  for (const Literal& l : cm.literals) {
    for (const Term& t : l.atom.terms()) cc.add(t);
  }
  for (const Literal& l : cm.literals) {
    if (l.positive && l.isEquality()) cc.merge(l.atom.left(), l.atom.right());
  }
  cc.close();

  std::map<std::size_t, Element> elementOfClass;
  std::vector<Element> elementOfTerm;
  for (std::size_t id = 0; id < cc.terms().size(); ++id) {
    auto [it, inserted] = elementOfClass.try_emplace(cc.find(id), static_cast<Element>(elementOfClass.size()));
    elementOfTerm.push_back(it->second);
  }

  Signature symbols = merge(sig, signatureOf(cm.falsifiedFormula));
  for (const Literal& l : cm.literals) symbols = merge(std::move(symbols), signatureOf(l.atom));

  InducedStructure out{Interpretation(std::max<std::size_t>(1, elementOfClass.size())), {}};
  Interpretation& m = out.interpretation;
  for (const auto& [name, arity] : symbols.functions()) m.defineFunction(name, arity);
  for (const auto& [name, arity] : symbols.predicates()) m.definePredicate(name, arity);
  for (const std::string& c : symbols.constants()) m.setConstant(c, 0);
  for (std::size_t id = 0; id < cc.terms().size(); ++id) {
    const Term& t = cc.terms()[id];
    if (t.isConstant()) {
      m.setConstant(t.name(), elementOfTerm[id]);
      out.names[t.name()] = elementOfTerm[id];
    } else if (t.isApplication()) {
      std::vector<Element> args;
      for (const Term& a : t.args()) args.push_back(elementOfTerm[cc.add(a)]);
      m.setFunction(t.name(), args, elementOfTerm[id]);
    }
  }
  for (const Literal& l : cm.literals) {
    if (!l.positive || l.isEquality()) continue;
    std::vector<Element> args;
    for (const Term& t : l.atom.terms()) args.push_back(evaluate(t, m));
    m.setPredicate(l.atom.predicate(), args, true);
  }
  return out;
}

/// True when every listed literal holds in the induced structure and the
/// falsified formula is false there.
inline bool certify(const Countermodel& cm, const Signature& sig) {
  try {
    InducedStructure s = induceStructure(cm, sig);
    for (const Literal& l : cm.literals) {
      if (!evaluate(l.toFormula(), s.interpretation)) return false;
    }
    return !evaluate(cm.falsifiedFormula, s.interpretation);
  } catch (const std::exception&) {
    return false;
  }
}

// ---------------------------------------------------------------------------
// Witness naming

/// Fresh uppercase names B, C, ..., Z, B2, C2, ... avoiding taken names.
class WitnessNames {
 public:
  explicit WitnessNames(std::set<std::string> taken = {}) : taken_(std::move(taken)) {}

  std::string next() {
    while (true) {
      const std::size_t round = counter_ / 25;
      std::string name(1, static_cast<char>('B' + counter_ % 25));
      if (round > 0) name += std::to_string(round + 1);
      ++counter_;
      if (taken_.insert(name).second) return name;
    }
  }

 private:
  std::set<std::string> taken_;
  std::size_t counter_ = 0;
};

inline std::set<std::string> namesOf(const Signature& sig, const Formula& f) {
  std::set<std::string> taken;
  Signature all = merge(sig, signatureOf(f));
  for (const auto& c : all.constants()) taken.insert(c);
  for (const auto& [n, a] : all.functions()) taken.insert(n);
  for (const auto& [n, a] : all.predicates()) taken.insert(n);
  return taken;
}

namespace detail {

inline void sortForDisplay(std::vector<Literal>& literals) {
  std::stable_partition(literals.begin(), literals.end(), [](const Literal& l) { return !l.isEquality(); });
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Extraction from a finite interpretation

/// Builds a countermodel from a structure in which `f` is false. Elements are
/// named after the constants of `f` that denote them (signature order first)
/// or fresh witness names. Predicate facts are pruned to a set that forces
/// `f` false under three-valued evaluation, so only relevant facts are shown.
inline Countermodel extractCountermodel(const Interpretation& m, const Formula& f, const Signature& sig) {
  if (evaluate(f, m)) throw std::invalid_argument("extractCountermodel: the formula holds in the interpretation");

  SymbolUsage used = symbolsOf(f);
  SymbolTable symbols;
  for (const auto& c : sig.constants()) {
    if (used.constants.contains(c)) symbols.constants.push_back(c);
  }
  for (const auto& c : used.constants) {
    if (!sig.hasConstant(c)) symbols.constants.push_back(c);
  }
  for (const auto& [name, arity] : used.functions) symbols.functions.emplace_back(name, arity);
  for (const auto& [name, arity] : sig.predicates()) {
    if (used.predicates.contains(name)) symbols.predicates.emplace_back(name, arity);
  }

  std::vector<std::string> names(m.domainSize());
  std::vector<Literal> equalities;
  for (const std::string& c : symbols.constants) {
    Element e = m.constant(c);
    if (names[e].empty()) {
      names[e] = c;
    } else {
      equalities.emplace_back(true, Formula::equality(Term::constant(c), Term::constant(names[e])));
    }
  }
  WitnessNames fresh(namesOf(sig, f));
  for (std::string& n : names) {
    if (n.empty()) n = fresh.next();
  }
  auto nameTerms = [&](const std::vector<Element>& tuple) {
    std::vector<Term> out;
    for (Element e : tuple) out.push_back(Term::constant(names[e]));
    return out;
  };
  for (const auto& [name, arity] : symbols.functions) {
    const auto& table = m.functions().at(name).values;
    for (std::size_t j = 0; j < table.size(); ++j) {
      equalities.emplace_back(true, Formula::equality(Term::apply(name, nameTerms(m.decodeTuple(j, arity))),
                                                      Term::constant(names[table[j]])));
    }
  }

  auto build = [&](bool minimize) {
    PartialStructure partial = PartialStructure::from(m, symbols);
    if (minimize) {
      CompiledFormula compiled(f, symbols);
      for (std::size_t p = 0; p < symbols.predicates.size(); ++p) {
        for (std::size_t j = 0; j < partial.cellCount(false, p); ++j) {
          PartialStructure::CellRef ref{false, p, j};
          const std::int32_t value = partial.cell(ref);
          partial.setCell(ref, PartialStructure::kUnknown);
          if (compiled.evaluate(partial) != Truth::False) partial.setCell(ref, value);
        }
      }
    }
    Countermodel cm{names, {}, f, Countermodel::Source::ModelSearch};
    for (std::size_t p = 0; p < symbols.predicates.size(); ++p) {
      const auto& [name, arity] = symbols.predicates[p];
      for (std::size_t j = 0; j < partial.cellCount(false, p); ++j) {
        const std::int32_t value = partial.cell({false, p, j});
        if (value == PartialStructure::kUnknown) continue;
        cm.literals.emplace_back(value == 1, Formula::atom(name, nameTerms(m.decodeTuple(j, arity))));
      }
    }
    cm.literals.insert(cm.literals.end(), equalities.begin(), equalities.end());
    return cm;
  };

  Countermodel cm = build(true);
  if (certify(cm, sig)) return cm;
  cm = build(false);
  if (certify(cm, sig)) return cm;
  throw std::logic_error("extracted countermodel failed certification");
}

// ---------------------------------------------------------------------------
// Tableau

struct TableauResult {
  enum class Status {
    CountermodelFound,
    /// Every branch closed: the input sentence is valid.
    Closed,
    /// Instantiation limits were reached without a certified countermodel.
    Exhausted,
    /// Deadline, cancellation or the step cap stopped the search.
    Interrupted,
  };
  Status status;
  std::optional<Countermodel> countermodel;
  std::size_t steps = 0;
};

namespace detail {

// NNF in which biconditionals expand into disjunctions of conjunctions, so
// each tableau branch commits to one truth-value combination. The negated
// biconditional explores "right true, left false" first.
inline Formula tableauNNF(const Formula& f, bool positive) {
  using K = Formula::Kind;
  switch (f.kind()) {
    case K::Atom:
    case K::Equality:
      return positive ? f : Formula::negation(f);
    case K::Not:
      return tableauNNF(f.operand(), !positive);
    case K::And:
    case K::Or: {
      const bool conj = (f.kind() == K::And) == positive;
      Formula l = tableauNNF(f.lhs(), positive);
      Formula r = tableauNNF(f.rhs(), positive);
      return conj ? Formula::conjunction(std::move(l), std::move(r)) : Formula::disjunction(std::move(l), std::move(r));
    }
    case K::Implies:
      if (positive) return Formula::disjunction(tableauNNF(f.lhs(), false), tableauNNF(f.rhs(), true));
      return Formula::conjunction(tableauNNF(f.lhs(), true), tableauNNF(f.rhs(), false));
    case K::Iff:
      if (positive) {
        return Formula::disjunction(Formula::conjunction(tableauNNF(f.lhs(), true), tableauNNF(f.rhs(), true)),
                                    Formula::conjunction(tableauNNF(f.lhs(), false), tableauNNF(f.rhs(), false)));
      }
      return Formula::disjunction(Formula::conjunction(tableauNNF(f.rhs(), true), tableauNNF(f.lhs(), false)),
                                  Formula::conjunction(tableauNNF(f.rhs(), false), tableauNNF(f.lhs(), true)));
    case K::ForAll:
    case K::Exists: {
      const bool universal = (f.kind() == K::ForAll) == positive;
      return Formula::quantified(universal ? K::ForAll : K::Exists, f.variable(), tableauNNF(f.body(), positive));
    }
  }
  return f;
}

class Tableau {
 public:
  Tableau(const Formula& f, const Signature& sig, const TableauBudget& budget)
      : formula_(f), sig_(sig), budget_(budget), taken_(namesOf(sig, f)) {}

  TableauResult run() {
    Branch root{WitnessNames(taken_), {}, {}, {}, {}, {}};
    SymbolUsage used = symbolsOf(formula_);
    for (const auto& c : sig_.constants()) {
      if (used.constants.contains(c)) registerTerm(root, Term::constant(c));
    }
    for (const auto& c : used.constants) registerTerm(root, Term::constant(c));
    root.pending.push_back(tableauNNF(formula_, false));

    for (limit_ = 1; limit_ <= budget_.maxGammaInstantiations; ++limit_) {
      Branch branch = root;
      Outcome outcome = expand(branch);
      switch (outcome) {
        case Outcome::Model:
          return {TableauResult::Status::CountermodelFound, std::move(found_), steps_};
        case Outcome::Closed:
          return {TableauResult::Status::Closed, std::nullopt, steps_};
        case Outcome::Aborted:
          return {TableauResult::Status::Interrupted, std::nullopt, steps_};
        case Outcome::Limit:
          break;
      }
    }
    return {TableauResult::Status::Exhausted, std::nullopt, steps_};
  }

 private:
  enum class Outcome { Model, Closed, Limit, Aborted };

  struct Gamma {
    Formula formula;
    std::vector<Term> used;
  };

  struct Branch {
    WitnessNames witnesses;
    std::vector<Formula> pending;
    std::vector<Gamma> gammas;
    std::vector<Literal> literals;
    std::vector<Term> groundTerms;
    CongruenceClosure cc;
    std::size_t gammaCursor = 0;
  };

  void registerTerm(Branch& b, const Term& t) {
    for (const Term& a : t.args()) registerTerm(b, a);
    if (std::find(b.groundTerms.begin(), b.groundTerms.end(), t) == b.groundTerms.end()) {
      b.groundTerms.push_back(t);
      b.cc.add(t);
    }
  }

  static bool sameArguments(Branch& b, const Formula& x, const Formula& y) {
    for (std::size_t i = 0; i < x.terms().size(); ++i) {
      if (!b.cc.equivalent(x.terms()[i], y.terms()[i])) return false;
    }
    return true;
  }

  static bool isClosed(Branch& b) {
    for (std::size_t i = 0; i < b.literals.size(); ++i) {
      const Literal& l = b.literals[i];
      if (l.isEquality()) {
        if (!l.positive && b.cc.equivalent(l.atom.left(), l.atom.right())) return true;
        continue;
      }
      for (std::size_t j = i + 1; j < b.literals.size(); ++j) {
        const Literal& m = b.literals[j];
        if (m.isEquality() || m.positive == l.positive || m.atom.predicate() != l.atom.predicate()) continue;
        if (sameArguments(b, l.atom, m.atom)) return true;
      }
    }
    return false;
  }

  // Returns false when the branch closes.
  bool addLiteral(Branch& b, const Formula& f) {
    const bool positive = f.kind() != Formula::Kind::Not;
    Literal lit(positive, positive ? f : f.operand());
    if (std::find(b.literals.begin(), b.literals.end(), lit) != b.literals.end()) return true;
    if (lit.isEquality()) {
      const Literal mirrored(positive, Formula::equality(lit.atom.right(), lit.atom.left()));
      if (std::find(b.literals.begin(), b.literals.end(), mirrored) != b.literals.end()) return true;
    }
    if (lit.complement() == lit) return true;
    if (lit.isEquality() && lit.atom.left() == lit.atom.right()) return !positive ? false : true;
    for (const Term& t : lit.atom.terms()) registerTerm(b, t);
    b.literals.push_back(lit);
    if (lit.isEquality() && positive) b.cc.merge(lit.atom.left(), lit.atom.right());
    return !isClosed(b);
  }

  bool tick() {
    ++steps_;
    if (steps_ > budget_.maxSteps) return false;
    // The deadline is polled on the first step and every 64 after.
    return (steps_ & 0x3f) != 1 || !budget_.deadline.expired();
  }

  Outcome expand(Branch& b) {
    using K = Formula::Kind;
    while (true) {
      if (!tick()) return Outcome::Aborted;
      if (!b.pending.empty()) {
        auto it = std::find_if(b.pending.begin(), b.pending.end(), [](const Formula& f) { return f.kind() != K::Or; });
        if (it == b.pending.end()) it = b.pending.begin();
        Formula f = *it;
        b.pending.erase(it);
        switch (f.kind()) {
          case K::And:
            b.pending.insert(b.pending.begin(), {f.lhs(), f.rhs()});
            break;
          case K::Exists: {
            Term witness = Term::constant(b.witnesses.next());
            registerTerm(b, witness);
            b.pending.insert(b.pending.begin(), substitute(f.body(), f.variable(), witness));
            break;
          }
          case K::ForAll:
            b.gammas.push_back(Gamma{f, {}});
            break;
          case K::Or: {
            bool limited = false;
            for (const Formula& side : {f.lhs(), f.rhs()}) {
              Branch child = b;
              child.pending.insert(child.pending.begin(), side);
              Outcome o = expand(child);
              if (o == Outcome::Model || o == Outcome::Aborted) return o;
              limited = limited || o == Outcome::Limit;
            }
            return limited ? Outcome::Limit : Outcome::Closed;
          }
          default:
            if (!addLiteral(b, f)) return Outcome::Closed;
            break;
        }
        continue;
      }

      if (b.gammas.empty()) return finishOpen(b, false);
      if (b.groundTerms.empty()) registerTerm(b, Term::constant(b.witnesses.next()));

      bool instantiated = false;
      bool limited = false;
      for (std::size_t k = 0; k < b.gammas.size() && !instantiated; ++k) {
        const std::size_t index = (b.gammaCursor + k) % b.gammas.size();
        Gamma& g = b.gammas[index];
        std::optional<Term> candidate;
        for (const Term& t : b.groundTerms) {
          if (std::find(g.used.begin(), g.used.end(), t) == g.used.end()) {
            candidate = t;
            break;
          }
        }
        if (!candidate) continue;
        if (g.used.size() >= limit_) {
          limited = true;
          continue;
        }
        g.used.push_back(*candidate);
        b.pending.insert(b.pending.begin(), substitute(g.formula.body(), g.formula.variable(), *candidate));
        b.gammaCursor = index + 1;
        instantiated = true;
      }
      if (!instantiated) return finishOpen(b, limited);
    }
  }

  // An open branch with nothing left to expand (within the current limit).
  Outcome finishOpen(Branch& b, bool limited) {
    Countermodel cm = branchCountermodel(b);
    if (certify(cm, sig_)) {
      found_ = std::move(cm);
      return Outcome::Model;
    }
    // A saturated branch can still fail certification when function values
    // outside the branch terms had to be defaulted.
    (void)limited;
    return Outcome::Limit;
  }

  Countermodel branchCountermodel(Branch& b) {
    b.cc.close();
    std::vector<std::size_t> classOrder;
    std::map<std::size_t, std::string> className;
    for (const Term& t : b.groundTerms) {
      const std::size_t cls = b.cc.classOf(t);
      if (std::find(classOrder.begin(), classOrder.end(), cls) == classOrder.end()) classOrder.push_back(cls);
    }
    // Prefer signature constants, then witnesses, then any term.
    auto rank = [&](const Term& t) {
      if (t.isConstant() && sig_.hasConstant(t.name())) return 0;
      if (t.isConstant()) return 1;
      return 2;
    };
    std::map<std::size_t, std::pair<int, std::string>> best;
    for (const Term& t : b.groundTerms) {
      const std::size_t cls = b.cc.classOf(t);
      const int r = rank(t);
      auto it = best.find(cls);
      if (it == best.end() || r < it->second.first) best[cls] = {r, format(t)};
    }
    Countermodel cm{{}, {}, formula_, Countermodel::Source::Tableau};
    for (std::size_t cls : classOrder) cm.domain.push_back(best[cls].second);
    for (const Literal& l : b.literals) {
      if (l.isEquality() && l.positive && l.atom.left() == l.atom.right()) continue;
      cm.literals.push_back(l);
    }
    sortForDisplay(cm.literals);
    return cm;
  }

  Formula formula_;
  Signature sig_;
  TableauBudget budget_;
  std::set<std::string> taken_;
  std::size_t limit_ = 1;
  std::size_t steps_ = 0;
  std::optional<Countermodel> found_;
};

}  // namespace detail

/// Runs the tableau for the negation of `f`.
inline TableauResult runTableau(const Formula& f, const Signature& sig, const TableauBudget& budget = {}) {
  return detail::Tableau(f, sig, budget).run();
}

/// A certified countermodel of the sentence `f`, or nullopt when none was
/// found within the budget. nullopt does not mean `f` is valid.
inline std::optional<Countermodel> findCountermodel(const Formula& f, const Signature& sig,
                                                    const TableauBudget& budget = {}) {
  TableauResult tableau = runTableau(f, sig, budget);
  if (tableau.countermodel) return tableau.countermodel;
  if (tableau.status == TableauResult::Status::Closed || budget.deadline.expired()) return std::nullopt;
  try {
    ModelSearchOptions options{budget.deadline, budget.maxModelSearchNodes};
    ModelSearchResult search = enumerateModels(Formula::negation(f), sig, budget.maxDomainSize, options);
    if (search.model) return extractCountermodel(*search.model, f, sig);
  } catch (const SearchSpaceTooLarge&) {
  }
  return std::nullopt;
}

}  // namespace folgrade
