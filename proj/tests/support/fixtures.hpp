#pragma once

// Signatures and formulas of the worked examples, shared by the unit tests.

#include <filesystem>
#include <fstream>
#include <string>

#include "folgrade/codec.hpp"
#include "folgrade/parser.hpp"
#include "folgrade/signature.hpp"

namespace fixtures {

using folgrade::Formula;
using folgrade::Signature;

inline const std::filesystem::path kData = FOLGRADE_DATA_DIR;

inline Signature surgeonSignature() {
  Signature s;
  s.addConstant("Joe").addConstant("Doctor").addConstant("Surgeon").addPredicate("Occupation", 2);
  return s;
}

inline Signature lawyerSignature() {
  Signature s;
  s.addConstant("Joe").addConstant("Lawyer").addPredicate("Occupation", 2).addPredicate("Customer", 2);
  return s;
}

inline Signature actorSignature() {
  Signature s;
  s.addConstant("Joe").addConstant("Actor").addPredicate("Occupation", 2);
  return s;
}

inline const char* kSurgeonAnswer = "all x (Occupation(x, Surgeon) -> Occupation(x, Doctor))";
inline const char* kSurgeonAlternative = "-(exists x (Occupation(x, Surgeon) & -Occupation(x, Doctor)))";
inline const char* kLawyerA = "-(exists x (Occupation(x, Lawyer) & Customer(Joe, x)))";
inline const char* kLawyerS = "exists x (Occupation(x, Lawyer) & -Customer(Joe, x))";
inline const char* kActorCorrect = "Occupation(Joe, Actor) & exists x (Occupation(Joe, x) & -(x = Actor))";
inline const char* kActorBuggy = "Occupation(Joe, Actor) & exists x Occupation(Joe, x)";

using folgrade::parse;

/// Parses with an inferred signature (for tests on abstract formulas).
inline Formula parseFree(const std::string& text) { return folgrade::parseInferringSignature(text).first; }

inline folgrade::ExerciseRecord loadExercise(const std::string& id) {
  std::ifstream in(kData / "exercises" / (id + ".json"));
  return folgrade::exerciseFromJson(folgrade::Json::parse(in));
}

}  // namespace fixtures
