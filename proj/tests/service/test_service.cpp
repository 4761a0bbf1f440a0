#include <gtest/gtest.h>

#include <filesystem>

#include <unistd.h>

#include "folgrade/service/service.hpp"
#include "support/fixtures.hpp"
#include "support/service_contract.hpp"

using namespace folgrade;
using namespace folgrade::service;

namespace {

const char* kWrong = "all x (Occupation(x, Lawyer) -> exists y Customer(x, y))";
const char* kRight = "-(exists x (Occupation(x, Lawyer) & -(exists y Customer(y, x))))";

class ServiceTest : public ::testing::Test {
 protected:
  void SetUp() override {
    const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
    dir_ = std::filesystem::temp_directory_path() /
           ("folgrade-service-" + std::to_string(::getpid()) + "-" + info->name());
    std::filesystem::remove_all(dir_);
    std::filesystem::create_directories(dir_);
    store_ = std::make_unique<Store>(dir_ / "store.db");
    service_ = std::make_unique<Service>(*store_, contract::testTokens(), Config{});
  }
  void TearDown() override {
    service_.reset();
    store_.reset();
    std::filesystem::remove_all(dir_);
  }

  std::optional<Principal> as(const char* token) const {
    return service_->authenticate(std::string("Bearer ") + token);
  }
  std::optional<Principal> instructor() const { return as(contract::kInstructorToken); }
  std::optional<Principal> student() const { return as(contract::kStudentToken); }
  std::optional<Principal> otherStudent() const { return as(contract::kOtherStudentToken); }

  std::filesystem::path dir_;
  std::unique_ptr<Store> store_;
  std::unique_ptr<Service> service_;
};

}  // namespace

TEST_F(ServiceTest, SeedLoadsSampleExercisesOnce) {
  const std::size_t added = service_->seed(fixtures::kData / "exercises");
  EXPECT_GE(added, 5u);
  EXPECT_EQ(service_->seed(fixtures::kData / "exercises"), 0u);
  EXPECT_EQ(store_->listExercises().size(), added);
}

TEST_F(ServiceTest, Health) {
  Response r = service_->health();
  EXPECT_EQ(r.status, 200);
  EXPECT_EQ(r.body["status"], "ok");
}

TEST_F(ServiceTest, AuthenticationIsRequired) {
  EXPECT_EQ(service_->listExercises(std::nullopt).status, 401);
  EXPECT_EQ(service_->getExercise(std::nullopt, "x").status, 401);
  EXPECT_EQ(service_->submit(std::nullopt, "x", "{}").status, 401);
  EXPECT_EQ(service_->listSubmissions(std::nullopt, {}).status, 401);
  EXPECT_EQ(service_->createExercise(std::nullopt, contract::kLawyerExercise).status, 401);
  EXPECT_FALSE(as("nope").has_value());
}

TEST_F(ServiceTest, OnlyInstructorsManageExercises) {
  EXPECT_EQ(service_->createExercise(student(), contract::kLawyerExercise).status, 403);
  Response created = service_->createExercise(instructor(), contract::kLawyerExercise);
  ASSERT_EQ(created.status, 201) << created.body.dump();
  EXPECT_EQ(created.body["createdBy"], "prof");
  EXPECT_EQ(service_->createExercise(instructor(), contract::kLawyerExercise).status, 409);

  const std::string id = created.body["id"];
  EXPECT_EQ(service_->deleteExercise(student(), id).status, 403);
  EXPECT_EQ(service_->updateExercise(student(), id, contract::kLawyerExercise).status, 403);

  Json changed = Json::parse(contract::kLawyerExercise);
  changed["prompt"] = "Updated prompt.";
  Response updated = service_->updateExercise(instructor(), id, changed.dump());
  ASSERT_EQ(updated.status, 200) << updated.body.dump();
  EXPECT_EQ(updated.body["prompt"], "Updated prompt.");
  EXPECT_EQ(updated.body["createdBy"], "prof");

  changed["id"] = "another-id";
  EXPECT_EQ(service_->updateExercise(instructor(), id, changed.dump()).status, 400);
  EXPECT_EQ(service_->updateExercise(instructor(), "missing", changed.dump()).status, 404);

  EXPECT_EQ(service_->deleteExercise(instructor(), id).status, 200);
  EXPECT_EQ(service_->deleteExercise(instructor(), id).status, 404);
}

TEST_F(ServiceTest, ValidationErrorsNameTheField) {
  Json doc = Json::parse(contract::kLawyerExercise);
  doc["modelAnswer"] = "all x Occupation(x, Nurse)";
  doc["timeLimitMs"] = 0;
  Response r = service_->createExercise(instructor(), doc.dump());
  ASSERT_EQ(r.status, 400);
  EXPECT_EQ(r.body["error"], "ValidationFailure");
  auto named = [&](const std::string& field) {
    for (const Json& f : r.body["fields"]) {
      if (f["field"] == field) return true;
    }
    return false;
  };
  EXPECT_TRUE(named("modelAnswer")) << r.body.dump();
  EXPECT_TRUE(named("timeLimitMs")) << r.body.dump();
  EXPECT_EQ(service_->createExercise(instructor(), "{nope").status, 400);
}

TEST_F(ServiceTest, StudentsSeeOnlyAssignedVisibleExercises) {
  ASSERT_EQ(service_->createExercise(instructor(), contract::kLawyerExercise).status, 201);
  ASSERT_EQ(service_->createExercise(instructor(), contract::kHiddenExercise).status, 201);
  const std::string lawyerId = Json::parse(contract::kLawyerExercise)["id"];
  const std::string hiddenId = Json::parse(contract::kHiddenExercise)["id"];

  EXPECT_EQ(service_->listExercises(instructor()).body["items"].size(), 2u);
  Json items = service_->listExercises(student()).body["items"];
  ASSERT_EQ(items.size(), 1u);
  EXPECT_EQ(items[0]["id"], lawyerId);
  EXPECT_FALSE(items[0].contains("modelAnswer"));
  EXPECT_TRUE(service_->listExercises(otherStudent()).body["items"].empty());

  EXPECT_EQ(service_->getExercise(student(), lawyerId).status, 200);
  EXPECT_FALSE(service_->getExercise(student(), lawyerId).body.contains("modelAnswer"));
  EXPECT_TRUE(service_->getExercise(instructor(), lawyerId).body.contains("modelAnswer"));
  EXPECT_EQ(service_->getExercise(student(), hiddenId).status, 404);
  EXPECT_EQ(service_->getExercise(otherStudent(), lawyerId).status, 404);
  EXPECT_EQ(service_->submit(otherStudent(), lawyerId, R"json({"text": "Customer(Joe, Joe)"})json").status, 404);
}

TEST_F(ServiceTest, SubmissionsAreGradedAndRecorded) {
  ASSERT_EQ(service_->createExercise(instructor(), contract::kLawyerExercise).status, 201);
  const std::string id = Json::parse(contract::kLawyerExercise)["id"];

  Response wrong = service_->submit(student(), id, Json{{"text", kWrong}}.dump());
  ASSERT_EQ(wrong.status, 200) << wrong.body.dump();
  EXPECT_EQ(wrong.body["verdict"]["status"], "incorrect");
  EXPECT_TRUE(wrong.body["verdict"].contains("countermodel"));
  EXPECT_EQ(wrong.body["studentId"], "alice");

  Response right = service_->submit(student(), id, Json{{"text", kRight}}.dump());
  EXPECT_EQ(right.body["verdict"]["status"], "correct");
  Response rejected = service_->submit(student(), id, R"json({"text": "Customer(Joe)"})json");
  EXPECT_EQ(rejected.body["verdict"]["status"], "rejected");
  EXPECT_GT(right.body["id"].get<std::int64_t>(), wrong.body["id"].get<std::int64_t>());

  EXPECT_EQ(service_->submit(student(), id, R"json({"answer": "x"})json").status, 400);
  EXPECT_EQ(service_->submit(student(), id, "not json").status, 400);
  EXPECT_EQ(service_->submit(student(), "missing", R"json({"text": "x"})json").status, 404);

  EXPECT_EQ(service_->listSubmissions(student(), {}).body["total"], 3);
  EXPECT_EQ(service_->listSubmissions(student(), {{"verdict", "correct"}}).body["total"], 1);
  EXPECT_EQ(service_->listSubmissions(student(), {{"verdict", "bogus"}}).status, 400);
  EXPECT_EQ(service_->listSubmissions(student(), {{"page", "0"}}).status, 400);
  EXPECT_EQ(service_->listSubmissions(student(), {{"page", "2"}}).body["items"].size(), 0u);
  // Students cannot read each other's history; instructors read everyone's.
  EXPECT_EQ(service_->listSubmissions(otherStudent(), {}).body["total"], 0);
  EXPECT_EQ(service_->listSubmissions(otherStudent(), {{"student", "alice"}}).body["total"], 0);
  EXPECT_EQ(service_->listSubmissions(instructor(), {{"student", "alice"}}).body["total"], 3);
  EXPECT_EQ(service_->listSubmissions(instructor(), {{"exercise", id}, {"verdict", "incorrect"}}).body["total"], 1);
}

TEST_F(ServiceTest, BinaryFeedbackModeHidesCountermodels) {
  Config config;
  config.binaryFeedback = true;
  Service binary(*store_, contract::testTokens(), config);
  ASSERT_EQ(binary.createExercise(instructor(), contract::kLawyerExercise).status, 201);
  const std::string id = Json::parse(contract::kLawyerExercise)["id"];
  Response r = binary.submit(student(), id, Json{{"text", kWrong}}.dump());
  EXPECT_EQ(r.body["verdict"]["status"], "incorrect");
  EXPECT_FALSE(r.body["verdict"].contains("countermodel"));
}
