#pragma once

// The verdict pipeline: parse a submission against the exercise signature,
// then race the refutation prover (equivalence) against the countermodel
// search (inequivalence) under one deadline.

#include <chrono>
#include <condition_variable>
#include <cstddef>
#include <map>
#include <mutex>
#include <optional>
#include <sstream>
#include <stop_token>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "folgrade/deadline.hpp"
#include "folgrade/normalize.hpp"
#include "folgrade/parser.hpp"
#include "folgrade/printer.hpp"
#include "folgrade/resolution.hpp"
#include "folgrade/semantics.hpp"
#include "folgrade/signature.hpp"
#include "folgrade/syntax.hpp"
#include "folgrade/tableau.hpp"

namespace folgrade {

inline constexpr std::chrono::milliseconds kDefaultTimeLimit{5000};
inline constexpr std::chrono::milliseconds kGracePeriod{1000};

struct Exercise {
  std::string id;
  std::string prompt;
  Signature signature;
  Formula modelAnswer;
  std::chrono::milliseconds timeLimit = kDefaultTimeLimit;
  /// English descriptions of symbols. Predicate entries may use {1}, {2}, ...
  /// for their arguments, e.g. "Occupation" -> "{1} works as {2}".
  std::map<std::string, std::string> glossary;
};

struct Submission {
  std::string exerciseId;
  std::string studentId;
  std::string text;
  std::chrono::system_clock::time_point submittedAt = std::chrono::system_clock::now();
};

inline const std::string kTimeLimitMessage =
    "The time limit was exceeded while checking your answer. Please revise your solution or talk to an "
    "instructor.";

struct Rejection {
  ParseError::Kind kind;
  std::size_t position;
  std::string message;
};

struct Verdict {
  enum class Status { Correct, Incorrect, TimeLimitExceeded, Rejected };

  Status status;
  /// Incorrect only, and only when a certified countermodel was found.
  std::optional<Countermodel> countermodel;
  /// Rejected only.
  std::optional<Rejection> rejection;
  /// TimeLimitExceeded and Rejected: the message shown to the student.
  std::string message;

  static Verdict correct() { return {Status::Correct, std::nullopt, std::nullopt, {}}; }
  static Verdict incorrect(std::optional<Countermodel> cm = std::nullopt) {
    return {Status::Incorrect, std::move(cm), std::nullopt, {}};
  }
  static Verdict timeLimitExceeded() { return {Status::TimeLimitExceeded, std::nullopt, std::nullopt, kTimeLimitMessage}; }
  static Verdict rejected(const ParseError& e) {
    return {Status::Rejected, std::nullopt, Rejection{e.kind(), e.position(), e.what()}, e.what()};
  }
};

inline const char* toString(Verdict::Status s) {
  switch (s) {
    case Verdict::Status::Correct: return "correct";
    case Verdict::Status::Incorrect: return "incorrect";
    case Verdict::Status::TimeLimitExceeded: return "timeout";
    case Verdict::Status::Rejected: return "rejected";
  }
  return "?";
}

inline std::optional<Verdict::Status> verdictStatusFromString(std::string_view s) {
  for (auto status : {Verdict::Status::Correct, Verdict::Status::Incorrect, Verdict::Status::TimeLimitExceeded,
                      Verdict::Status::Rejected}) {
    if (s == toString(status)) return status;
  }
  return std::nullopt;
}

struct GradeOptions {
  std::chrono::milliseconds grace = kGracePeriod;
  std::size_t proverMaxClauses = 100'000;
  std::size_t clauseCap = kDefaultClauseCap;
  std::size_t maxGammaInstantiations = 4;
  std::size_t maxDomainSize = 4;
};

/// Equivalence check of two sentences: Correct, Incorrect (optionally with
/// a countermodel to `left <-> right`) or TimeLimitExceeded. The call returns
/// within `timeLimit` plus cooperative-cancellation latency.
inline Verdict checkEquivalence(const Formula& left, const Formula& right, const Signature& sig,
                                std::chrono::milliseconds timeLimit, const GradeOptions& options = {}) {
  const Formula f = Formula::biconditional(left, right);

  struct Shared {
    std::mutex mutex;
    std::condition_variable changed;
    std::optional<ProofResult::Status> proof;
    bool searchDone = false;
    std::optional<Countermodel> countermodel;
  } shared;

  std::stop_source stop;
  const Deadline deadline = Deadline::after(timeLimit).withStop(stop.get_token());

  std::jthread prover([&] {
    ProofResult::Status status = ProofResult::Status::BudgetExceeded;
    try {
      ClauseSet clauses = clausify(Formula::negation(f), options.clauseCap);
      status = refute(clauses, {deadline, options.proverMaxClauses}).status;
    } catch (const ClauseExplosion&) {
    }
    std::lock_guard lock(shared.mutex);
    shared.proof = status;
    shared.changed.notify_all();
  });
  std::jthread searcher([&] {
    TableauBudget budget;
    budget.deadline = deadline;
    budget.maxGammaInstantiations = options.maxGammaInstantiations;
    budget.maxDomainSize = options.maxDomainSize;
    std::optional<Countermodel> cm = findCountermodel(f, sig, budget);
    std::lock_guard lock(shared.mutex);
    shared.countermodel = std::move(cm);
    shared.searchDone = true;
    shared.changed.notify_all();
  });

  Verdict verdict = Verdict::timeLimitExceeded();
  {
    std::unique_lock lock(shared.mutex);
    auto decided = [&] {
      if (shared.proof == ProofResult::Status::Refuted || shared.countermodel) return true;
      // A saturated prover settles inequivalence; wait for the search only
      // to obtain a countermodel.
      return shared.searchDone && shared.proof.has_value();
    };
    shared.changed.wait_until(lock, deadline.at(), decided);
    if (shared.proof == ProofResult::Status::Refuted) {
      verdict = Verdict::correct();
    } else if (shared.countermodel) {
      verdict = Verdict::incorrect(std::move(shared.countermodel));
    } else if (shared.proof == ProofResult::Status::Saturated) {
      verdict = Verdict::incorrect();
    }
  }
  stop.request_stop();
  return verdict;  // workers join here, after observing the stop request
}

/// Grades a submission. Every failure mode is reported as a Verdict.
inline Verdict grade(const Exercise& ex, const Submission& sub, const GradeOptions& options = {}) {
  std::optional<Formula> student;
  try {
    student = parse(sub.text, ex.signature);
  } catch (const ParseError& e) {
    return Verdict::rejected(e);
  }
  return checkEquivalence(ex.modelAnswer, *student, ex.signature, ex.timeLimit, options);
}

// ---------------------------------------------------------------------------
// Feedback

struct FeedbackOptions {
  /// Plain Correct/Incorrect judgments without countermodels.
  bool binary = false;
};

struct Feedback {
  std::string headline;
  /// Countermodel facts in formula syntax, domain first. Empty unless an
  /// Incorrect verdict carries a countermodel and binary mode is off.
  std::vector<std::string> countermodel;
  /// English rendering of the countermodel using the exercise glossary.
  std::string narrative;
};

namespace detail {

inline std::string fillTemplate(const std::string& pattern, const std::vector<std::string>& args);

inline std::string glossaryTerm(const Term& t, const std::map<std::string, std::string>& glossary) {
  auto it = glossary.find(t.name());
  if (t.isConstant()) return it == glossary.end() ? t.name() : it->second;
  if (t.isApplication() && it != glossary.end() && it->second.find('{') != std::string::npos) {
    std::vector<std::string> args;
    for (const Term& a : t.args()) args.push_back(glossaryTerm(a, glossary));
    return fillTemplate(it->second, args);
  }
  return format(t);
}

inline std::string fillTemplate(const std::string& pattern, const std::vector<std::string>& args) {
  std::string out;
  for (std::size_t i = 0; i < pattern.size(); ++i) {
    if (pattern[i] == '{') {
      const std::size_t close = pattern.find('}', i);
      if (close != std::string::npos) {
        const std::string digits = pattern.substr(i + 1, close - i - 1);
        if (!digits.empty() && digits.find_first_not_of("0123456789") == std::string::npos) {
          const std::size_t n = std::stoul(digits);
          if (n >= 1 && n <= args.size()) {
            out += args[n - 1];
            i = close;
            continue;
          }
        }
      }
    }
    out += pattern[i];
  }
  return out;
}

inline std::string describeLiteral(const Literal& l, const std::map<std::string, std::string>& glossary) {
  const Formula& atom = l.atom;
  if (atom.isEquality()) {
    const std::string a = glossaryTerm(atom.left(), glossary);
    const std::string b = glossaryTerm(atom.right(), glossary);
    return l.positive ? a + " and " + b + " are the same individual" : a + " and " + b + " are different individuals";
  }
  std::vector<std::string> args;
  for (const Term& t : atom.terms()) args.push_back(glossaryTerm(t, glossary));
  std::string text;
  if (auto it = glossary.find(atom.predicate()); it != glossary.end() && it->second.find('{') != std::string::npos) {
    text = fillTemplate(it->second, args);
  } else {
    std::ostringstream out;
    out << l.atom;
    text = out.str();
  }
  return l.positive ? text : "it is not the case that " + text;
}

}  // namespace detail

/// Renders the student-facing feedback for a verdict. Never includes the
/// model answer.
inline Feedback renderFeedback(const Verdict& v, const Exercise& ex, const FeedbackOptions& options = {}) {
  Feedback out;
  switch (v.status) {
    case Verdict::Status::Correct:
      out.headline = "Correct! Your formula is logically equivalent to the model answer.";
      return out;
    case Verdict::Status::TimeLimitExceeded:
    case Verdict::Status::Rejected:
      out.headline = v.message;
      return out;
    case Verdict::Status::Incorrect:
      break;
  }
  out.headline = "Incorrect: your formula is not logically equivalent to the intended meaning of the sentence.";
  if (options.binary || !v.countermodel) return out;

  const Countermodel& cm = *v.countermodel;
  std::ostringstream domain;
  domain << "domain: ";
  for (std::size_t i = 0; i < cm.domain.size(); ++i) domain << (i ? ", " : "") << cm.domain[i];
  out.countermodel.push_back(domain.str());
  for (const Literal& l : cm.literals) out.countermodel.push_back(format(l.toFormula()));

  std::ostringstream narrative;
  narrative << "Your formula and the model answer disagree in this situation: ";
  for (std::size_t i = 0; i < cm.literals.size(); ++i) {
    narrative << (i ? "; " : "") << detail::describeLiteral(cm.literals[i], ex.glossary);
  }
  if (cm.literals.empty()) narrative << "any situation with a single individual";
  narrative << '.';
  if (cm.falsifiedFormula.kind() == Formula::Kind::Iff) {
    try {
      InducedStructure s = induceStructure(cm, ex.signature);
      const bool studentTrue = evaluate(cm.falsifiedFormula.rhs(), s.interpretation);
      narrative << (studentTrue ? " Here your formula is true, but the sentence you were asked to translate is false."
                                : " Here your formula is false, but the sentence you were asked to translate is true.");
    } catch (const std::exception&) {
    }
  }
  out.narrative = narrative.str();
  return out;
}

}  // namespace folgrade
