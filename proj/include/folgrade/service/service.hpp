#pragma once

// The HTTP/JSON API, independent of the transport. Each operation takes the
// authenticated principal (if any) and returns a status code and JSON body.

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <semaphore>
#include <string>
#include <utility>
#include <vector>

#include "folgrade/codec.hpp"
#include "folgrade/grader.hpp"
#include "folgrade/service/auth.hpp"
#include "folgrade/service/config.hpp"
#include "folgrade/service/store.hpp"

namespace folgrade::service {

inline constexpr std::int64_t kPageSize = 10;

struct Response {
  int status;
  Json body;
};

inline Response errorResponse(int status, const std::string& code, const std::string& message,
                              const std::vector<FieldError>& fields = {}) {
  Json body = {{"error", code}, {"message", message}};
  if (!fields.empty()) {
    body["fields"] = Json::array();
    for (const FieldError& f : fields) body["fields"].push_back({{"field", f.field}, {"message", f.message}});
  }
  return {status, body};
}

class Service {
 public:
  Service(Store& store, TokenRegistry tokens, Config config)
      : store_(store), tokens_(std::move(tokens)), config_(std::move(config)), slots_(static_cast<std::ptrdiff_t>(
                                                                                     config_.maxConcurrentGrades)) {}

  std::optional<Principal> authenticate(std::string_view authorizationHeader) const {
    return tokens_.authenticate(authorizationHeader);
  }

  const Config& config() const { return config_; }

  /// Loads every *.json exercise in `directory` that the store lacks.
  /// Returns the number of exercises added.
  std::size_t seed(const std::filesystem::path& directory) {
    std::vector<std::filesystem::path> files;
    for (const auto& entry : std::filesystem::directory_iterator(directory)) {
      if (entry.path().extension() == ".json") files.push_back(entry.path());
    }
    std::sort(files.begin(), files.end());
    std::size_t added = 0;
    for (const auto& file : files) {
      std::ifstream in(file);
      ExerciseRecord r = exerciseFromJson(Json::parse(in), {}, config_.defaultTimeLimit);
      if (store_.getExercise(r.exercise.id)) continue;
      store_.putExercise(r);
      ++added;
    }
    return added;
  }

  Response health() const { return {200, Json{{"status", "ok"}, {"schemaVersion", kSchemaVersion}}}; }

  Response listExercises(const std::optional<Principal>& who) const {
    if (!who) return unauthorized();
    Json items = Json::array();
    for (const ExerciseRecord& r : store_.listExercises()) {
      if (who->role == Role::Instructor) {
        items.push_back(exerciseToJson(r));
      } else if (visibleTo(r, *who)) {
        items.push_back(exerciseSummaryToJson(r));
      }
    }
    return {200, Json{{"items", items}}};
  }

  Response getExercise(const std::optional<Principal>& who, const std::string& id) const {
    if (!who) return unauthorized();
    auto r = store_.getExercise(id);
    if (!r || (who->role == Role::Student && !visibleTo(*r, *who))) return unknownExercise(id);
    return {200, who->role == Role::Instructor ? exerciseToJson(*r) : exerciseSummaryToJson(*r)};
  }

  Response submit(const std::optional<Principal>& who, const std::string& id, const std::string& body) {
    if (!who) return unauthorized();
    auto record = store_.getExercise(id);
    if (!record || (who->role == Role::Student && !visibleTo(*record, *who))) return unknownExercise(id);
    Json request = Json::parse(body, nullptr, false);
    if (request.is_discarded() || !request.is_object() || !request.contains("text") || !request["text"].is_string()) {
      return errorResponse(400, "ValidationFailure", "request body must be {\"text\": \"...\"}",
                           {{"text", "is required and must be a string"}});
    }

    if (!slots_.try_acquire()) {
      return errorResponse(503, "Overloaded", "all grading workers are busy; please retry shortly");
    }
    struct Release {
      std::counting_semaphore<kMaxSlots>& s;
      ~Release() { s.release(); }
    } release{slots_};

    Submission submission{id, who->user, request["text"].get<std::string>()};
    const auto started = std::chrono::steady_clock::now();
    Verdict verdict = grade(record->exercise, submission);
    const auto elapsed =
        std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - started);

    SubmissionRecord stored = store_.appendSubmission(SubmissionRecord{
        0, id, who->user, submission.text, formatTimestamp(submission.submittedAt),
        verdictToJson(verdict, record->exercise, FeedbackOptions{config_.binaryFeedback}), elapsed.count()});
    return {200, submissionToJson(stored)};
  }

  Response createExercise(const std::optional<Principal>& who, const std::string& body) {
    if (auto denied = requireInstructor(who)) return *denied;
    Json doc = Json::parse(body, nullptr, false);
    if (doc.is_discarded()) return errorResponse(400, "ValidationFailure", "request body is not valid JSON");
    try {
      ExerciseRecord r = validated(doc, {});
      r.createdBy = who->user;
      if (store_.getExercise(r.exercise.id)) {
        return errorResponse(409, "Conflict", "an exercise with id '" + r.exercise.id + "' already exists");
      }
      store_.putExercise(r);
      return {201, exerciseToJson(r)};
    } catch (const ValidationError& e) {
      return errorResponse(400, "ValidationFailure", e.what(), e.errors());
    }
  }

  Response updateExercise(const std::optional<Principal>& who, const std::string& id, const std::string& body) {
    if (auto denied = requireInstructor(who)) return *denied;
    auto existing = store_.getExercise(id);
    if (!existing) return unknownExercise(id);
    Json doc = Json::parse(body, nullptr, false);
    if (doc.is_discarded()) return errorResponse(400, "ValidationFailure", "request body is not valid JSON");
    if (doc.is_object() && doc.contains("id") && doc["id"] != id) {
      return errorResponse(400, "ValidationFailure", "exercise id cannot be changed", {{"id", "must match the URL"}});
    }
    try {
      ExerciseRecord r = validated(doc, id);
      r.createdBy = existing->createdBy;
      store_.putExercise(r);
      return {200, exerciseToJson(r)};
    } catch (const ValidationError& e) {
      return errorResponse(400, "ValidationFailure", e.what(), e.errors());
    }
  }

  Response deleteExercise(const std::optional<Principal>& who, const std::string& id) {
    if (auto denied = requireInstructor(who)) return *denied;
    if (!store_.deleteExercise(id)) return unknownExercise(id);
    return {200, Json{{"deleted", id}}};
  }

  /// Instructors see every submission; students only their own.
  Response listSubmissions(const std::optional<Principal>& who, const std::map<std::string, std::string>& query) const {
    if (!who) return unauthorized();
    SubmissionFilter filter;
    std::int64_t page = 1;
    for (const auto& [key, value] : query) {
      if (key == "student") {
        filter.student = value;
      } else if (key == "exercise") {
        filter.exercise = value;
      } else if (key == "verdict") {
        if (!verdictStatusFromString(value)) {
          return errorResponse(400, "ValidationFailure", "unknown verdict filter",
                               {{"verdict", "must be one of correct, incorrect, timeout, rejected"}});
        }
        filter.status = value;
      } else if (key == "page") {
        try {
          std::size_t used = 0;
          page = std::stoll(value, &used);
          if (used != value.size() || page < 1) throw std::invalid_argument(value);
        } catch (const std::exception&) {
          return errorResponse(400, "ValidationFailure", "bad page number", {{"page", "must be a positive integer"}});
        }
      }
    }
    if (who->role == Role::Student) {
      if (filter.student && *filter.student != who->user) return {200, pageJson({}, page)};
      filter.student = who->user;
    }
    return {200, pageJson(store_.listSubmissions(filter, page, kPageSize), page)};
  }

 private:
  static constexpr std::ptrdiff_t kMaxSlots = 1024;

  static bool visibleTo(const ExerciseRecord& r, const Principal& who) {
    return r.visible && (r.assignedTo.empty() || r.assignedTo == who.cohort);
  }

  static Response unauthorized() {
    return errorResponse(401, "AuthFailure", "missing or invalid bearer token");
  }
  static Response unknownExercise(const std::string& id) {
    return errorResponse(404, "UnknownExercise", "no exercise with id '" + id + "'");
  }
  static std::optional<Response> requireInstructor(const std::optional<Principal>& who) {
    if (!who) return unauthorized();
    if (who->role != Role::Instructor) return errorResponse(403, "AuthFailure", "instructor credentials required");
    return std::nullopt;
  }

  static Json pageJson(const SubmissionPage& p, std::int64_t page) {
    Json items = Json::array();
    for (const SubmissionRecord& r : p.items) items.push_back(submissionToJson(r));
    return Json{{"page", page}, {"pageSize", kPageSize}, {"total", p.total}, {"items", items}};
  }

  // Full validation, including the self-equivalence smoke grade.
  ExerciseRecord validated(const Json& doc, const std::string& id) const {
    ExerciseRecord r = exerciseFromJson(doc, id, config_.defaultTimeLimit);
    Verdict self = checkEquivalence(r.exercise.modelAnswer, r.exercise.modelAnswer, r.exercise.signature,
                                    r.exercise.timeLimit);
    if (self.status != Verdict::Status::Correct) {
      throw ValidationError("modelAnswer", "the grader could not confirm the model answer equivalent to itself "
                                             "within the time limit; simplify it or raise timeLimitMs");
    }
    return r;
  }

  Store& store_;
  TokenRegistry tokens_;
  Config config_;
  std::counting_semaphore<kMaxSlots> slots_;
};

}  // namespace folgrade::service
