#pragma once

// JSON forms of exercises, verdicts, submissions and corpus files.
//
// Exercise document:
//   {"id": "surgeons", "prompt": "All surgeons are doctors.",
//    "signature": {"constants": ["Doctor", "Surgeon"], "functions": {},
//                  "predicates": {"Occupation": 2}},
//    "modelAnswer": "all x (Occupation(x, Surgeon) -> Occupation(x, Doctor))",
//    "timeLimitMs": 5000, "glossary": {"Occupation": "{1} works as {2}"},
//    "assignedTo": "", "visible": true}

#include <chrono>
#include <cstdint>
#include <ctime>
#include <optional>
#include <regex>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

#include "folgrade/grader.hpp"
#include "folgrade/parser.hpp"
#include "folgrade/printer.hpp"
#include "folgrade/signature.hpp"
#include "folgrade/tableau.hpp"

namespace folgrade {

using Json = nlohmann::ordered_json;

inline constexpr int kSchemaVersion = 1;
inline constexpr std::chrono::milliseconds kMaxTimeLimit{60'000};

struct FieldError {
  std::string field;
  std::string message;
};

/// Invalid input document, with one entry per offending field.
class ValidationError : public std::runtime_error {
 public:
  explicit ValidationError(std::vector<FieldError> errors)
      : std::runtime_error(summarize(errors)), errors_(std::move(errors)) {}
  ValidationError(std::string field, std::string message)
      : ValidationError(std::vector<FieldError>{{std::move(field), std::move(message)}}) {}

  const std::vector<FieldError>& errors() const { return errors_; }

 private:
  static std::string summarize(const std::vector<FieldError>& errors) {
    std::string out = "validation failed";
    for (const FieldError& e : errors) out += "; " + e.field + ": " + e.message;
    return out;
  }

  std::vector<FieldError> errors_;
};

/// An exercise as stored by the service.
struct ExerciseRecord {
  Exercise exercise;
  /// The model answer as the instructor wrote it.
  std::string modelAnswerText;
  std::string createdBy;
  /// Cohort tag; empty means every student.
  std::string assignedTo;
  bool visible = true;
};

// ---------------------------------------------------------------------------
// Time

inline std::string formatTimestamp(std::chrono::system_clock::time_point t) {
  const auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(t.time_since_epoch()).count();
  const std::time_t seconds = static_cast<std::time_t>(ms / 1000);
  std::tm tm{};
  gmtime_r(&seconds, &tm);
  char buffer[32];
  std::strftime(buffer, sizeof buffer, "%Y-%m-%dT%H:%M:%S", &tm);
  char out[40];
  std::snprintf(out, sizeof out, "%s.%03dZ", buffer, static_cast<int>(ms % 1000));
  return out;
}

inline std::chrono::system_clock::time_point parseTimestamp(const std::string& text) {
  std::tm tm{};
  int millis = 0;
  if (std::sscanf(text.c_str(), "%d-%d-%dT%d:%d:%d.%dZ", &tm.tm_year, &tm.tm_mon, &tm.tm_mday, &tm.tm_hour,
                  &tm.tm_min, &tm.tm_sec, &millis) < 6) {
    throw std::invalid_argument("bad timestamp: " + text);
  }
  tm.tm_year -= 1900;
  tm.tm_mon -= 1;
  return std::chrono::system_clock::from_time_t(timegm(&tm)) + std::chrono::milliseconds(millis);
}

// ---------------------------------------------------------------------------
// Signature

inline Json signatureToJson(const Signature& sig) {
  Json out = {{"constants", sig.constants()}, {"functions", Json::object()}, {"predicates", Json::object()}};
  for (const auto& [name, arity] : sig.functions()) out["functions"][name] = arity;
  for (const auto& [name, arity] : sig.predicates()) out["predicates"][name] = arity;
  return out;
}

/// Throws ValidationError naming the "signature" field.
inline Signature signatureFromJson(const Json& j) {
  auto fail = [](const std::string& message) { throw ValidationError("signature", message); };
  if (!j.is_object()) fail("must be an object with constants, functions and predicates");
  Signature sig;
  if (j.contains("constants")) {
    if (!j["constants"].is_array()) fail("constants must be an array of names");
    for (const Json& c : j["constants"]) {
      if (!c.is_string()) fail("constants must be an array of names");
      sig.addConstant(c.get<std::string>());
    }
  }
  for (const char* kind : {"functions", "predicates"}) {
    if (!j.contains(kind)) continue;
    if (!j[kind].is_object()) fail(std::string(kind) + " must map names to arities");
    for (const auto& [name, arity] : j[kind].items()) {
      if (!arity.is_number_integer() || arity.get<std::int64_t>() < 1) {
        fail("arity of " + name + " must be a positive integer");
      }
      if (std::string(kind) == "functions") {
        sig.addFunction(name, arity.get<std::size_t>());
      } else {
        sig.addPredicate(name, arity.get<std::size_t>());
      }
    }
  }
  try {
    sig.validate();
  } catch (const SignatureError& e) {
    fail(e.what());
  }
  return sig;
}

// ---------------------------------------------------------------------------
// Exercises

inline bool isValidExerciseId(const std::string& id) {
  static const std::regex pattern("[A-Za-z0-9][A-Za-z0-9_.-]{0,63}");
  return std::regex_match(id, pattern);
}

/// Full exercise document, including the model answer.
inline Json exerciseToJson(const ExerciseRecord& r) {
  Json glossary = Json::object();
  for (const auto& [k, v] : r.exercise.glossary) glossary[k] = v;
  return Json{{"id", r.exercise.id},
              {"prompt", r.exercise.prompt},
              {"signature", signatureToJson(r.exercise.signature)},
              {"modelAnswer", r.modelAnswerText},
              {"timeLimitMs", r.exercise.timeLimit.count()},
              {"glossary", glossary},
              {"createdBy", r.createdBy},
              {"assignedTo", r.assignedTo},
              {"visible", r.visible}};
}

/// The student view: no model answer.
inline Json exerciseSummaryToJson(const ExerciseRecord& r) {
  Json out = exerciseToJson(r);
  out.erase("modelAnswer");
  out.erase("createdBy");
  return out;
}

/// Parses and validates an exercise document. `fallbackId` is used when the
/// document has no id (e.g. on update). Collects every field error.
inline ExerciseRecord exerciseFromJson(const Json& j, const std::string& fallbackId = {},
                                       std::chrono::milliseconds defaultTimeLimit = kDefaultTimeLimit) {
  if (!j.is_object()) throw ValidationError("", "exercise must be a JSON object");
  std::vector<FieldError> errors;
  auto stringField = [&](const char* name, bool required) -> std::string {
    if (!j.contains(name)) {
      if (required) errors.push_back({name, "is required"});
      return {};
    }
    if (!j[name].is_string()) {
      errors.push_back({name, "must be a string"});
      return {};
    }
    return j[name].get<std::string>();
  };

  std::string id = j.contains("id") ? stringField("id", true) : fallbackId;
  if (id.empty() && (!j.contains("id") || j["id"].is_string())) errors.push_back({"id", "is required"});
  if (!id.empty() && !isValidExerciseId(id)) {
    errors.push_back({"id", "must be 1-64 characters from letters, digits, '_', '.', '-'"});
  }
  std::string prompt = stringField("prompt", true);
  std::string modelAnswer = stringField("modelAnswer", true);
  std::string createdBy = stringField("createdBy", false);
  std::string assignedTo = stringField("assignedTo", false);

  std::optional<Signature> sig;
  if (!j.contains("signature")) {
    errors.push_back({"signature", "is required"});
  } else {
    try {
      sig = signatureFromJson(j["signature"]);
    } catch (const ValidationError& e) {
      errors.insert(errors.end(), e.errors().begin(), e.errors().end());
    }
  }

  std::chrono::milliseconds timeLimit = defaultTimeLimit;
  if (j.contains("timeLimitMs")) {
    const Json& t = j["timeLimitMs"];
    if (!t.is_number_integer() || t.get<std::int64_t>() <= 0) {
      errors.push_back({"timeLimitMs", "must be a positive integer number of milliseconds"});
    } else if (t.get<std::int64_t>() > kMaxTimeLimit.count()) {
      errors.push_back({"timeLimitMs", "must not exceed " + std::to_string(kMaxTimeLimit.count())});
    } else {
      timeLimit = std::chrono::milliseconds(t.get<std::int64_t>());
    }
  }

  std::map<std::string, std::string> glossary;
  if (j.contains("glossary")) {
    if (!j["glossary"].is_object()) {
      errors.push_back({"glossary", "must map symbol names to descriptions"});
    } else {
      for (const auto& [k, v] : j["glossary"].items()) {
        if (!v.is_string()) {
          errors.push_back({"glossary", "description of " + k + " must be a string"});
        } else {
          glossary[k] = v.get<std::string>();
        }
      }
    }
  }

  bool visible = true;
  if (j.contains("visible")) {
    if (!j["visible"].is_boolean()) {
      errors.push_back({"visible", "must be a boolean"});
    } else {
      visible = j["visible"].get<bool>();
    }
  }

  std::optional<Formula> answer;
  if (sig && !modelAnswer.empty()) {
    try {
      answer = parse(modelAnswer, *sig);
    } catch (const ParseError& e) {
      errors.push_back({"modelAnswer", e.what()});
    }
  } else if (j.contains("modelAnswer") && modelAnswer.empty() && j["modelAnswer"].is_string()) {
    errors.push_back({"modelAnswer", "must not be empty"});
  }

  if (!errors.empty()) throw ValidationError(std::move(errors));
  return ExerciseRecord{Exercise{id, prompt, *sig, *answer, timeLimit, std::move(glossary)}, modelAnswer, createdBy,
                        assignedTo, visible};
}

// ---------------------------------------------------------------------------
// Verdicts

inline Json countermodelToJson(const Countermodel& cm) {
  Json literals = Json::array();
  for (const Literal& l : cm.literals) literals.push_back(format(l.toFormula()));
  return Json{{"domain", cm.domain}, {"literals", literals}};
}

/// Wire form of a verdict: {status, countermodel?, message, ...}. The
/// falsified formula is not serialized since it contains the model answer.
inline Json verdictToJson(const Verdict& v, const Exercise& ex, const FeedbackOptions& options = {}) {
  Feedback fb = renderFeedback(v, ex, options);
  Json out = {{"status", toString(v.status)}, {"message", fb.headline}};
  if (v.countermodel && !options.binary) {
    out["countermodel"] = countermodelToJson(*v.countermodel);
    out["narrative"] = fb.narrative;
  }
  if (v.rejection) {
    out["rejection"] = {{"reason", toString(v.rejection->kind)}, {"position", v.rejection->position}};
  }
  return out;
}

// ---------------------------------------------------------------------------
// Corpus files
//
//   {"entries": [{"exercise": {...exercise document...},
//                 "submissions": [{"text": "...", "expected": "correct"}]}]}

struct CorpusSubmission {
  std::string text;
  Verdict::Status expected;
};

struct CorpusEntry {
  ExerciseRecord exercise;
  std::vector<CorpusSubmission> submissions;
};

inline std::vector<CorpusEntry> corpusFromJson(const Json& j) {
  if (!j.is_object() || !j.contains("entries") || !j["entries"].is_array()) {
    throw ValidationError("entries", "corpus must be an object with an \"entries\" array");
  }
  std::vector<CorpusEntry> out;
  for (std::size_t i = 0; i < j["entries"].size(); ++i) {
    const Json& e = j["entries"][i];
    const std::string where = "entries[" + std::to_string(i) + "]";
    if (!e.is_object() || !e.contains("exercise")) throw ValidationError(where, "missing exercise");
    CorpusEntry entry{exerciseFromJson(e["exercise"]), {}};
    if (e.contains("submissions")) {
      for (const Json& s : e["submissions"]) {
        auto expected = s.contains("expected") && s["expected"].is_string()
                            ? verdictStatusFromString(s["expected"].get<std::string>())
                            : std::nullopt;
        if (!s.contains("text") || !s["text"].is_string() || !expected) {
          throw ValidationError(where + ".submissions", "each submission needs text and a valid expected status");
        }
        entry.submissions.push_back({s["text"].get<std::string>(), *expected});
      }
    }
    out.push_back(std::move(entry));
  }
  return out;
}

}  // namespace folgrade
