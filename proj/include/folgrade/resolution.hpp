#pragma once

// Given-clause refutation prover: binary resolution and factoring, with
// forward/backward subsumption and tautology deletion. Equality is handled
// by adding the equality axioms for the symbols of the input.

#include <cstddef>
#include <functional>
#include <optional>
#include <ostream>
#include <queue>
#include <string>
#include <utility>
#include <vector>

#include "folgrade/deadline.hpp"
#include "folgrade/normalize.hpp"
#include "folgrade/unify.hpp"

namespace folgrade {

struct ResolutionBudget {
  Deadline deadline;
  std::size_t maxClauses = 100'000;
};

struct InferenceStep {
  enum class Rule { Input, EqualityAxiom, Resolution, Factoring };

  std::size_t id;
  Rule rule;
  std::vector<std::size_t> parents;
  std::string unifier;
  Clause clause;
};

inline const char* toString(InferenceStep::Rule rule) {
  switch (rule) {
    case InferenceStep::Rule::Input: return "input";
    case InferenceStep::Rule::EqualityAxiom: return "equality axiom";
    case InferenceStep::Rule::Resolution: return "resolution";
    case InferenceStep::Rule::Factoring: return "factoring";
  }
  return "?";
}

struct ProofResult {
  enum class Status { Refuted, Saturated, BudgetExceeded };
  enum class Limit { None, ClauseLimit, Deadline };

  Status status;
  Limit limit = Limit::None;
  /// For Refuted: the derivation of the empty clause, in id order.
  std::vector<InferenceStep> steps;
  std::size_t generated = 0;
  std::size_t selected = 0;

  bool refuted() const { return status == Status::Refuted; }
};

inline const char* toString(ProofResult::Status status) {
  switch (status) {
    case ProofResult::Status::Refuted: return "Refuted";
    case ProofResult::Status::Saturated: return "Saturated";
    case ProofResult::Status::BudgetExceeded: return "BudgetExceeded";
  }
  return "?";
}

/// Numbered inference log, one step per line.
inline void printProof(std::ostream& out, const ProofResult& result) {
  for (const InferenceStep& step : result.steps) {
    out << step.id << ". " << step.clause << "  [" << toString(step.rule);
    if (!step.parents.empty()) {
      out << ' ';
      for (std::size_t i = 0; i < step.parents.size(); ++i) out << (i ? "," : "") << step.parents[i];
    }
    if (!step.unifier.empty() && step.unifier != "{}") out << ' ' << step.unifier;
    out << "]\n";
  }
}

/// True when some substitution maps every literal of `general` onto a literal
/// of `specific` with the same sign.
inline bool subsumes(const Clause& general, const Clause& specific) {
  if (general.size() > specific.size()) return false;
  std::function<bool(std::size_t, const Substitution&)> search = [&](std::size_t i, const Substitution& s) {
    if (i == general.size()) return true;
    const Literal& l = general.literals[i];
    for (const Literal& m : specific.literals) {
      if (m.positive != l.positive) continue;
      Substitution extended = s;
      if (matchInto(l.atom, m.atom, extended) && search(i + 1, extended)) return true;
    }
    return false;
  };
  return search(0, Substitution{});
}

/// Constants, functions and predicates occurring in a clause set.
inline Signature clauseSignature(const ClauseSet& cs) {
  Signature sig;
  for (const Clause& c : cs.clauses) {
    for (const Literal& l : c.literals) sig = merge(std::move(sig), signatureOf(l.atom));
  }
  return sig;
}

namespace detail {

inline std::size_t clauseWeight(const Clause& c) {
  std::size_t w = 0;
  for (const Literal& l : c.literals) w += l.atom.size();
  return w;
}

inline bool hasEquality(const ClauseSet& cs) {
  for (const Clause& c : cs.clauses) {
    for (const Literal& l : c.literals) {
      if (l.isEquality()) return true;
    }
  }
  return false;
}

class GivenClauseProver {
 public:
  explicit GivenClauseProver(const ResolutionBudget& budget) : budget_(budget) {}

  ProofResult run(const ClauseSet& cs) {
    for (const Clause& c : cs.clauses) {
      if (auto empty = add(c, InferenceStep::Rule::Input, {}, {})) return refuted(*empty);
    }
    if (hasEquality(cs)) {
      for (const Clause& c : equalityAxioms(clauseSignature(cs)).clauses) add(c, InferenceStep::Rule::EqualityAxiom, {}, {});
    }

    while (true) {
      if (budget_.deadline.expired()) return exhausted(ProofResult::Limit::Deadline);
      std::optional<std::size_t> next = selectGiven();
      if (!next) {
        ProofResult r{ProofResult::Status::Saturated};
        return finish(r);
      }
      const std::size_t given = *next;
      ++selected_;
      if (isForwardSubsumed(store_[given].step.clause)) continue;
      removeBackwardSubsumed(store_[given].step.clause);
      active_.push_back(given);

      if (auto empty = factor(given)) return refuted(*empty);
      // `active_` may grow while iterating; only pre-existing clauses matter.
      const std::size_t activeCount = active_.size();
      for (std::size_t k = 0; k < activeCount; ++k) {
        const std::size_t partner = active_[k];
        if (!store_[partner].alive) continue;
        if (auto empty = resolve(given, partner)) return refuted(*empty);
        if (budget_.deadline.expired()) return exhausted(ProofResult::Limit::Deadline);
        if (store_.size() > budget_.maxClauses) return exhausted(ProofResult::Limit::ClauseLimit);
      }
      if (store_.size() > budget_.maxClauses) return exhausted(ProofResult::Limit::ClauseLimit);
    }
  }

 private:
  struct Stored {
    InferenceStep step;
    std::size_t weight;
    bool alive = true;
    bool selected = false;
  };

  // Every fifth given clause is the oldest one, the rest are the lightest.
  static constexpr std::size_t kAgeRatio = 5;

  using HeapEntry = std::pair<std::size_t, std::size_t>;  // (weight, id)

  std::optional<std::size_t> selectGiven() {
    const bool byAge = selected_ % kAgeRatio == kAgeRatio - 1;
    while (true) {
      std::optional<std::size_t> id;
      if (byAge) {
        while (!byAge_.empty() && store_[byAge_.top()].selected) byAge_.pop();
        if (byAge_.empty()) break;
        id = byAge_.top();
        byAge_.pop();
      } else {
        while (!byWeight_.empty() && store_[byWeight_.top().second].selected) byWeight_.pop();
        if (byWeight_.empty()) break;
        id = byWeight_.top().second;
        byWeight_.pop();
      }
      store_[*id].selected = true;
      if (store_[*id].alive) return id;
    }
    // Heaps are kept in sync, so both are exhausted once one is.
    return std::nullopt;
  }

  // Returns the id of the clause when it is empty.
  std::optional<std::size_t> add(const Clause& raw, InferenceStep::Rule rule, std::vector<std::size_t> parents,
                                 std::string unifier) {
    std::vector<Literal> literals = raw.literals;
    if (!simplifyClause(literals)) return std::nullopt;
    Clause clause = standardizeApart(Clause{std::move(literals)}, variableCounter_);
    const std::size_t id = store_.size() + 1;
    const std::size_t weight = clauseWeight(clause);
    store_.push_back(Stored{InferenceStep{id, rule, std::move(parents), std::move(unifier), std::move(clause)}, weight});
    byWeight_.emplace(weight, id - 1);
    byAge_.push(id - 1);
    if (store_.back().step.clause.empty()) return id - 1;
    return std::nullopt;
  }

  std::optional<std::size_t> factor(std::size_t index) {
    const Clause given = store_[index].step.clause;
    for (std::size_t i = 0; i < given.size(); ++i) {
      for (std::size_t j = i + 1; j < given.size(); ++j) {
        const Literal& a = given.literals[i];
        const Literal& b = given.literals[j];
        if (a.positive != b.positive) continue;
        auto sigma = unify(a.atom, b.atom);
        if (!sigma) continue;
        Clause out;
        for (std::size_t k = 0; k < given.size(); ++k) {
          if (k == j) continue;
          out.literals.emplace_back(given.literals[k].positive, sigma->apply(given.literals[k].atom));
        }
        if (auto empty = add(out, InferenceStep::Rule::Factoring, {store_[index].step.id}, sigma->toString())) {
          return empty;
        }
      }
    }
    return std::nullopt;
  }

  std::optional<std::size_t> resolve(std::size_t givenIndex, std::size_t partnerIndex) {
    const Clause given = store_[givenIndex].step.clause;
    Clause partner = store_[partnerIndex].step.clause;
    if (givenIndex == partnerIndex) partner = standardizeApart(partner, variableCounter_);
    for (std::size_t i = 0; i < given.size(); ++i) {
      const Literal& l = given.literals[i];
      for (std::size_t j = 0; j < partner.size(); ++j) {
        const Literal& m = partner.literals[j];
        if (l.positive == m.positive) continue;
        if (l.isEquality() != m.isEquality()) continue;
        if (!l.isEquality() && l.atom.predicate() != m.atom.predicate()) continue;
        auto sigma = unify(l.atom, m.atom);
        if (!sigma) continue;
        Clause out;
        for (std::size_t k = 0; k < given.size(); ++k) {
          if (k != i) out.literals.emplace_back(given.literals[k].positive, sigma->apply(given.literals[k].atom));
        }
        for (std::size_t k = 0; k < partner.size(); ++k) {
          if (k != j) out.literals.emplace_back(partner.literals[k].positive, sigma->apply(partner.literals[k].atom));
        }
        if (auto empty = add(out, InferenceStep::Rule::Resolution,
                             {store_[givenIndex].step.id, store_[partnerIndex].step.id}, sigma->toString())) {
          return empty;
        }
      }
    }
    return std::nullopt;
  }

  bool isForwardSubsumed(const Clause& c) const {
    for (std::size_t id : active_) {
      if (store_[id].alive && subsumes(store_[id].step.clause, c)) return true;
    }
    return false;
  }

  void removeBackwardSubsumed(const Clause& c) {
    for (std::size_t id : active_) {
      if (store_[id].alive && subsumes(c, store_[id].step.clause)) store_[id].alive = false;
    }
    std::erase_if(active_, [&](std::size_t id) { return !store_[id].alive; });
  }

  ProofResult refuted(std::size_t emptyIndex) {
    ProofResult r{ProofResult::Status::Refuted};
    std::vector<bool> needed(store_.size(), false);
    std::vector<std::size_t> stack{emptyIndex};
    while (!stack.empty()) {
      std::size_t i = stack.back();
      stack.pop_back();
      if (needed[i]) continue;
      needed[i] = true;
      for (std::size_t parent : store_[i].step.parents) stack.push_back(parent - 1);
    }
    for (std::size_t i = 0; i < store_.size(); ++i) {
      if (needed[i]) r.steps.push_back(store_[i].step);
    }
    return finish(r);
  }

  ProofResult exhausted(ProofResult::Limit limit) {
    ProofResult r{ProofResult::Status::BudgetExceeded, limit};
    return finish(r);
  }

  ProofResult& finish(ProofResult& r) {
    r.generated = store_.size();
    r.selected = selected_;
    return r;
  }

  ResolutionBudget budget_;
  std::vector<Stored> store_;
  std::vector<std::size_t> active_;
  std::priority_queue<HeapEntry, std::vector<HeapEntry>, std::greater<>> byWeight_;
  std::priority_queue<std::size_t, std::vector<std::size_t>, std::greater<>> byAge_;
  std::size_t variableCounter_ = 0;
  std::size_t selected_ = 0;
};

}  // namespace detail

/// Searches for a refutation of `cs`. Refuted means `cs` is unsatisfiable;
/// Saturated means no refutation exists; BudgetExceeded means the deadline
/// or clause limit ran out first. The deadline is polled at least once per
/// given clause and once per resolution partner.
inline ProofResult refute(const ClauseSet& cs, const ResolutionBudget& budget = {}) {
  return detail::GivenClauseProver(budget).run(cs);
}

}  // namespace folgrade
