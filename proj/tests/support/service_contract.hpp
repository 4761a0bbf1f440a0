#pragma once

// End-to-end contract of the HTTP service: instructor creates an exercise,
// a student lists, submits and reads history over real HTTP; the model
// answer never appears in anything a student receives; records survive a
// restart on the same store file.

#include <algorithm>
#include <cctype>
#include <filesystem>
#include <fstream>
#include <memory>
#include <string>
#include <thread>

#include "folgrade/printer.hpp"
#include "folgrade/service/http.hpp"
#include "folgrade/service/service.hpp"
#include "httplib.h"
#include "support/property_checks.hpp"

namespace contract {

using folgrade::Json;
namespace svc = folgrade::service;

inline constexpr const char* kInstructorToken = "instructor-token";
inline constexpr const char* kStudentToken = "student-token";
inline constexpr const char* kOtherStudentToken = "other-student-token";

inline svc::TokenRegistry testTokens() {
  svc::TokenRegistry t;
  t.add(kInstructorToken, {"prof", svc::Role::Instructor, ""});
  t.add(kStudentToken, {"alice", svc::Role::Student, "cohort-a"});
  t.add(kOtherStudentToken, {"bob", svc::Role::Student, "cohort-b"});
  return t;
}

inline const char* kLawyerExercise = R"json({
  "id": "lawyer-customers",
  "prompt": "Every lawyer has at least one customer.",
  "signature": {"constants": ["Joe", "Lawyer"], "functions": {}, "predicates": {"Occupation": 2, "Customer": 2}},
  "modelAnswer": "all x (Occupation(x, Lawyer) -> exists y Customer(y, x))",
  "glossary": {"Occupation": "{1} works as {2}", "Customer": "{1} is a customer of {2}"},
  "assignedTo": "cohort-a",
  "visible": true
})json";

inline const char* kHiddenExercise = R"json({
  "id": "hidden-draft",
  "prompt": "Joe is a lawyer.",
  "signature": {"constants": ["Joe", "Lawyer"], "functions": {}, "predicates": {"Occupation": 2}},
  "modelAnswer": "Occupation(Joe, Lawyer)",
  "visible": false
})json";

/// A running server on an ephemeral port.
class RunningServer {
 public:
  RunningServer(const std::filesystem::path& db, svc::Config config = {})
      : store_(db), service_(store_, testTokens(), config), http_(service_) {
    port_ = http_.bindToAnyPort("127.0.0.1");
    thread_ = std::thread([this] { http_.listenAfterBind(); });
    http_.waitUntilReady();
  }
  ~RunningServer() {
    http_.stop();
    thread_.join();
  }
  int port() const { return port_; }
  svc::Service& service() { return service_; }

 private:
  svc::Store store_;
  svc::Service service_;
  svc::HttpServer http_;
  int port_ = 0;
  std::thread thread_;
};

struct Reply {
  int status = 0;
  Json body;
  std::string raw;
};

class Client {
 public:
  explicit Client(int port) : client_("127.0.0.1", port) { client_.set_read_timeout(30, 0); }

  Reply get(const std::string& path, const char* token) { return wrap(client_.Get(path, headers(token))); }
  Reply post(const std::string& path, const std::string& body, const char* token) {
    return wrap(client_.Post(path, headers(token), body, "application/json"));
  }
  Reply put(const std::string& path, const std::string& body, const char* token) {
    return wrap(client_.Put(path, headers(token), body, "application/json"));
  }

 private:
  static httplib::Headers headers(const char* token) {
    if (!token) return {};
    return {{"Authorization", std::string("Bearer ") + token}};
  }
  static Reply wrap(const httplib::Result& r) {
    if (!r) return {0, Json(), "transport error"};
    return {r->status, Json::parse(r->body, nullptr, false), r->body};
  }
  httplib::Client client_;
};

inline std::string squeeze(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (!std::isspace(static_cast<unsigned char>(c))) out += c;
  }
  return out;
}

/// True when `body` contains the model answer in its stored or printed form.
inline bool leaks(const std::string& body, const std::string& modelAnswer, const std::string& printed) {
  const std::string b = squeeze(body);
  return b.find(squeeze(modelAnswer)) != std::string::npos || b.find(squeeze(printed)) != std::string::npos;
}

inline props::Report run(const std::filesystem::path& workDir) {
  props::Report r{"service contract"};
  auto check = [&](bool ok, const std::string& what) {
    ++r.checks;
    if (!ok) r.fail(what);
  };
  std::filesystem::remove_all(workDir);
  std::filesystem::create_directories(workDir);
  const auto db = workDir / "contract.db";

  const Json lawyer = Json::parse(kLawyerExercise);
  const std::string modelAnswer = lawyer["modelAnswer"].get<std::string>();
  folgrade::Signature sig = folgrade::signatureFromJson(lawyer["signature"]);
  const std::string printed = folgrade::format(folgrade::parse(modelAnswer, sig));
  std::vector<std::string> studentBodies;

  std::int64_t firstSubmissionId = 0;
  {
    RunningServer server(db);
    Client http(server.port());
    ++r.cases;

    check(http.get("/api/health", nullptr).status == 200, "health endpoint");
    check(http.get("/api/exercises", nullptr).status == 401, "missing token is rejected with 401");
    check(http.get("/api/exercises", "bogus").status == 401, "unknown token is rejected with 401");
    check(http.post("/api/exercises", kLawyerExercise, kStudentToken).status == 403, "students cannot create exercises");

    Reply created = http.post("/api/exercises", kLawyerExercise, kInstructorToken);
    check(created.status == 201, "instructor creates the lawyer exercise (got " + std::to_string(created.status) + ")");
    check(http.post("/api/exercises", kHiddenExercise, kInstructorToken).status == 201, "instructor creates hidden draft");
    check(http.post("/api/exercises", kLawyerExercise, kInstructorToken).status == 409, "duplicate id is a conflict");

    Json bad = lawyer;
    bad["id"] = "bad-one";
    bad["modelAnswer"] = "all x Occupation(x, Nurse)";
    Reply rejected = http.post("/api/exercises", bad.dump(), kInstructorToken);
    check(rejected.status == 400 && rejected.body.value("error", "") == "ValidationFailure" &&
              rejected.body.contains("fields") && rejected.body["fields"][0]["field"] == "modelAnswer",
          "undeclared symbol in a model answer is a field-level validation failure");
    bad["modelAnswer"] = modelAnswer;
    bad["timeLimitMs"] = 0;
    check(http.post("/api/exercises", bad.dump(), kInstructorToken).status == 400, "time limit 0 is rejected");

    Reply list = http.get("/api/exercises", kStudentToken);
    studentBodies.push_back(list.raw);
    bool sawLawyer = false, sawHidden = false;
    for (const Json& item : list.body["items"]) {
      sawLawyer = sawLawyer || item["id"] == "lawyer-customers";
      sawHidden = sawHidden || item["id"] == "hidden-draft";
      check(!item.contains("modelAnswer"), "student listing omits modelAnswer");
    }
    check(list.status == 200 && sawLawyer && !sawHidden, "student list shows the assigned exercise only");
    check(http.get("/api/exercises", kOtherStudentToken).body["items"].empty(), "other cohort sees nothing");
    check(http.get("/api/exercises/hidden-draft", kStudentToken).status == 404, "hidden exercise is not found");

    Reply one = http.get("/api/exercises/lawyer-customers", kStudentToken);
    studentBodies.push_back(one.raw);
    check(one.status == 200 && !one.body.contains("modelAnswer"), "student exercise view omits modelAnswer");

    const std::string wrong = "all x (Occupation(x, Lawyer) -> Customer(Joe, x))";
    Reply incorrect = http.post("/api/exercises/lawyer-customers/submissions", Json{{"text", wrong}}.dump(), kStudentToken);
    studentBodies.push_back(incorrect.raw);
    check(incorrect.status == 200 && incorrect.body["verdict"]["status"] == "incorrect",
          "wrong answer is graded incorrect");
    check(incorrect.body["verdict"].contains("countermodel") && incorrect.body["verdict"].contains("narrative"),
          "incorrect verdict carries a countermodel and a narrative");
    firstSubmissionId = incorrect.body.value("id", std::int64_t{0});

    const std::string right = "-(exists x (Occupation(x, Lawyer) & -(exists y Customer(y, x))))";
    Reply correct = http.post("/api/exercises/lawyer-customers/submissions", Json{{"text", right}}.dump(), kStudentToken);
    studentBodies.push_back(correct.raw);
    check(correct.status == 200 && correct.body["verdict"]["status"] == "correct", "resubmission is regraded correct");

    Reply malformed = http.post("/api/exercises/lawyer-customers/submissions", Json{{"text", "all x (Occupation(x"}}.dump(),
                                kStudentToken);
    studentBodies.push_back(malformed.raw);
    check(malformed.status == 200 && malformed.body["verdict"]["status"] == "rejected" &&
              malformed.body["verdict"].contains("rejection"),
          "malformed text yields a persisted rejected verdict with a position");
    check(http.post("/api/exercises/lawyer-customers/submissions", "{}", kStudentToken).status == 400,
          "submission without text is a validation failure");
    check(http.post("/api/exercises/nope/submissions", Json{{"text", wrong}}.dump(), kStudentToken).status == 404,
          "unknown exercise is 404");
    check(http.post("/api/exercises/lawyer-customers/submissions", Json{{"text", wrong}}.dump(), kOtherStudentToken)
                  .status == 404,
          "students cannot submit to exercises outside their cohort");

    Reply history = http.get("/api/submissions", kStudentToken);
    studentBodies.push_back(history.raw);
    check(history.status == 200 && history.body["total"] == 3, "student history lists their three submissions");
    check(http.get("/api/submissions?student=prof", kStudentToken).body["total"] == 0,
          "students cannot read other students' history");
    check(http.get("/api/submissions?verdict=incorrect", kInstructorToken).body["total"] == 1,
          "instructor filters by verdict");
    check(http.get("/api/submissions?verdict=bogus", kInstructorToken).status == 400, "unknown verdict filter is rejected");

    Reply full = http.get("/api/exercises/lawyer-customers", kInstructorToken);
    check(full.body.value("modelAnswer", "") == modelAnswer, "instructor view includes the model answer");

    for (const std::string& body : studentBodies) {
      check(!leaks(body, modelAnswer, printed), "student-visible response leaks the model answer: " + body.substr(0, 120));
    }
  }

  // Restart on the same file: everything is still there.
  {
    RunningServer server(db);
    Client http(server.port());
    ++r.cases;
    Reply history = http.get("/api/submissions?exercise=lawyer-customers", kInstructorToken);
    check(history.status == 200 && history.body["total"] == 3, "submissions survive a restart");
    bool found = false;
    for (const Json& item : history.body["items"]) found = found || item["id"] == firstSubmissionId;
    check(found, "submission ids are stable across restarts");
    check(http.get("/api/exercises/lawyer-customers", kStudentToken).status == 200, "exercises survive a restart");
    Reply again = http.post("/api/exercises/lawyer-customers/submissions",
                            Json{{"text", "all x (Occupation(x, Lawyer) -> exists y Customer(y, x))"}}.dump(),
                            kStudentToken);
    check(again.body["verdict"]["status"] == "correct", "grading works after restart");
  }

  // Overload: with zero free grading slots the service answers 503.
  {
    svc::Config config;
    config.maxConcurrentGrades = 1;
    RunningServer server(workDir / "overload.db", config);
    Client http(server.port());
    ++r.cases;
    check(http.post("/api/exercises", kLawyerExercise, kInstructorToken).status == 201, "setup for overload check");
    // An adversarial submission holds the only slot for about a second.
    Json slow = lawyer;
    slow["id"] = "slow";
    slow["signature"]["predicates"]["R"] = 2;
    slow["timeLimitMs"] = 1500;
    slow["assignedTo"] = "";
    slow["modelAnswer"] = "all x (R(x, x) -> R(x, x))";
    check(http.post("/api/exercises", slow.dump(), kInstructorToken).status == 201, "setup slow exercise");
    const std::string adversarial =
        "-(all x -R(x,x) & all x all y all z (R(x,y) & R(y,z) -> R(x,z)) & all x exists y R(x,y))";
    Reply busyReply;
    std::thread holder([&] {
      Client c(server.port());
      c.post("/api/exercises/slow/submissions", Json{{"text", adversarial}}.dump(), kStudentToken);
    });
    std::this_thread::sleep_for(std::chrono::milliseconds(300));
    busyReply = http.post("/api/exercises/slow/submissions", Json{{"text", adversarial}}.dump(), kStudentToken);
    holder.join();
    check(busyReply.status == 503 && busyReply.body.value("error", "") == "Overloaded",
          "a full grading queue answers 503 Overloaded");
  }
  return r;
}

}  // namespace contract
