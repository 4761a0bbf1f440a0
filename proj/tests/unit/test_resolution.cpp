#include <gtest/gtest.h>

#include <chrono>
#include <sstream>

#include "folgrade/normalize.hpp"
#include "folgrade/printer.hpp"
#include "folgrade/resolution.hpp"
#include "support/fixtures.hpp"
#include "support/oracle.hpp"

using namespace folgrade;
using namespace fixtures;

namespace {

ClauseSet negatedIff(const Formula& a, const Formula& b) {
  return clausify(Formula::negation(Formula::biconditional(a, b)));
}

}  // namespace

TEST(Resolution, ModelAnswerIsEquivalentToItself) {
  Formula m = parse(kSurgeonAnswer, surgeonSignature());
  EXPECT_EQ(refute(negatedIff(m, m)).status, ProofResult::Status::Refuted);
}

TEST(Resolution, SurgeonSolutionsAreEquivalent) {
  Signature sig = surgeonSignature();
  ProofResult r = refute(negatedIff(parse(kSurgeonAnswer, sig), parse(kSurgeonAlternative, sig)));
  ASSERT_TRUE(r.refuted());
  ASSERT_FALSE(r.steps.empty());
  EXPECT_TRUE(r.steps.back().clause.empty());
}

TEST(Resolution, LawyerPairIsNotRefuted) {
  Signature sig = lawyerSignature();
  ResolutionBudget budget{Deadline::after(std::chrono::seconds(2)), 20'000};
  ProofResult r = refute(negatedIff(parse(kLawyerA, sig), parse(kLawyerS, sig)), budget);
  EXPECT_NE(r.status, ProofResult::Status::Refuted);
}

TEST(Resolution, ZeroDeadlineStopsImmediately) {
  Signature sig = surgeonSignature();
  ResolutionBudget budget{Deadline::after(std::chrono::milliseconds(0))};
  ProofResult r = refute(negatedIff(parse(kSurgeonAnswer, sig), parse(kSurgeonAlternative, sig)), budget);
  EXPECT_EQ(r.status, ProofResult::Status::BudgetExceeded);
  EXPECT_EQ(r.limit, ProofResult::Limit::Deadline);
}

TEST(Resolution, TwoClauseContradiction) {
  ClauseSet cs = clausify(parseFree("P(A) & -P(A)"));
  // clausify yields {P(A)} and {-P(A)}.
  ASSERT_EQ(cs.clauses.size(), 2u);
  ProofResult r = refute(cs, ResolutionBudget{Deadline::after(std::chrono::seconds(10))});
  EXPECT_TRUE(r.refuted());
}

TEST(Resolution, DivergentSetHitsTheDeadline) {
  // P(A) and all x (P(x) -> P(F(x))) generate P(F(F(...))) forever; the goal
  // Q(A) is unreachable.
  ClauseSet cs = clausify(parseFree("P(A) & (all x (P(x) -> P(F(x)))) & -Q(A) & all x (Q(x) | -R(x))"));
  const auto start = std::chrono::steady_clock::now();
  ProofResult r = refute(cs, ResolutionBudget{Deadline::after(std::chrono::milliseconds(300)), 10'000'000});
  const auto elapsed = std::chrono::steady_clock::now() - start;
  EXPECT_EQ(r.status, ProofResult::Status::BudgetExceeded);
  EXPECT_EQ(r.limit, ProofResult::Limit::Deadline);
  EXPECT_GT(r.generated, 100u);
  EXPECT_LT(elapsed, std::chrono::milliseconds(1300));
}

TEST(Resolution, ClauseLimit) {
  ClauseSet cs = clausify(parseFree("P(A) & (all x (P(x) -> P(F(x)))) & -Q(A)"));
  ProofResult r = refute(cs, ResolutionBudget{Deadline::never(), 200});
  EXPECT_EQ(r.status, ProofResult::Status::BudgetExceeded);
  EXPECT_EQ(r.limit, ProofResult::Limit::ClauseLimit);
}

TEST(Resolution, SatisfiableFiniteSetSaturates) {
  ClauseSet cs = clausify(parseFree("P(A) & (P(A) -> Q(B)) & -R(A)"));
  ProofResult r = refute(cs);
  EXPECT_EQ(r.status, ProofResult::Status::Saturated);
  // Saturated soundness spot check: a bigger budget does not change that.
  EXPECT_EQ(refute(cs, ResolutionBudget{Deadline::never(), 1'000'000}).status, ProofResult::Status::Saturated);
}

TEST(Resolution, EqualityReasoningThroughAxioms) {
  // A = B and P(A) entail P(B).
  ClauseSet cs = clausify(parseFree("A = B & P(A) & -P(B)"));
  EXPECT_TRUE(refute(cs).refuted());
  ClauseSet symmetric = clausify(parseFree("A = B & -(B = A)"));
  EXPECT_TRUE(refute(symmetric).refuted());
  ClauseSet congruence = clausify(parseFree("A = B & -(F(A) = F(B))"));
  EXPECT_TRUE(refute(congruence).refuted());
}

TEST(Resolution, ActorCorrectAnswerWithDisequality) {
  Signature sig = actorSignature();
  Formula a = parse(kActorCorrect, sig);
  Formula b = parse("exists y (Occupation(Joe, y) & y != Actor) & Occupation(Joe, Actor)", sig);
  EXPECT_TRUE(refute(negatedIff(a, b), ResolutionBudget{Deadline::after(std::chrono::seconds(5))}).refuted());
}

TEST(Resolution, Deterministic) {
  Signature sig = surgeonSignature();
  ClauseSet cs = negatedIff(parse(kSurgeonAnswer, sig), parse(kSurgeonAlternative, sig));
  ProofResult a = refute(cs), b = refute(cs);
  ASSERT_EQ(a.status, b.status);
  ASSERT_EQ(a.steps.size(), b.steps.size());
  for (std::size_t i = 0; i < a.steps.size(); ++i) EXPECT_EQ(format(a.steps[i].clause), format(b.steps[i].clause));
  EXPECT_EQ(a.generated, b.generated);
}

TEST(Resolution, ProofLogIsWellFormed) {
  Signature sig = surgeonSignature();
  ProofResult r = refute(negatedIff(parse(kSurgeonAnswer, sig), parse(kSurgeonAlternative, sig)));
  ASSERT_TRUE(r.refuted());
  for (const InferenceStep& s : r.steps) {
    for (std::size_t p : s.parents) EXPECT_LT(p, s.id);
    if (s.rule == InferenceStep::Rule::Resolution) EXPECT_EQ(s.parents.size(), 2u);
  }
  std::ostringstream out;
  printProof(out, r);
  EXPECT_NE(out.str().find("resolution"), std::string::npos);
}

TEST(Subsumption, GeneralClauseSubsumesInstances) {
  Clause general{{Literal(true, Formula::atom("P", {Term::variable("x")}))}};
  Clause specific{{Literal(true, Formula::atom("P", {Term::constant("A")})),
                   Literal(false, Formula::atom("Q", {Term::constant("A")}))}};
  EXPECT_TRUE(subsumes(general, specific));
  EXPECT_FALSE(subsumes(specific, general));
}

TEST(Resolution, SoundnessAgainstOracleOnSmallPairs) {
  // Whenever a pair is refuted, the oracle finds no distinguishing structure.
  const char* pairs[][2] = {
      {"all x P(x)", "-(exists x -P(x))"},
      {"all x (P(x) & Q(x))", "(all x P(x)) & all x Q(x)"},
      {"exists x (P(x) | Q(x))", "(exists x P(x)) | exists x Q(x)"},
      {"exists x (P(x) & Q(x))", "(exists x P(x)) & exists x Q(x)"},
      {"all x (P(x) | Q(x))", "(all x P(x)) | all x Q(x)"},
      {"all x exists y R(x, y)", "exists y all x R(x, y)"},
  };
  for (const auto& p : pairs) {
    auto [a, sig] = parseInferringSignature(p[0]);
    Formula b = parseInferringSignature(p[1], sig).first;
    ProofResult r = refute(negatedIff(a, b), ResolutionBudget{Deadline::after(std::chrono::seconds(2)), 20'000});
    if (r.refuted()) EXPECT_FALSE(oracle::distinguishable(a, b, 3)) << p[0] << " vs " << p[1];
  }
}
