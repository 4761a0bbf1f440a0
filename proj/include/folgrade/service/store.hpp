#pragma once

// Single-file SQLite store holding JSON documents. Every document carries a
// schemaVersion field; the database records the version it was created with.

#include <sqlite3.h>

#include <cstdint>
#include <filesystem>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "folgrade/codec.hpp"

namespace folgrade::service {

class StoreError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct SubmissionRecord {
  std::int64_t id = 0;
  std::string exerciseId;
  std::string studentId;
  std::string text;
  std::string submittedAt;
  /// Wire form of the verdict, as returned to the student.
  Json verdict;
  std::int64_t gradingDurationMs = 0;
};

inline Json submissionToJson(const SubmissionRecord& r) {
  return Json{{"id", r.id},           {"exerciseId", r.exerciseId}, {"studentId", r.studentId},
              {"text", r.text},       {"submittedAt", r.submittedAt}, {"verdict", r.verdict},
              {"gradingDurationMs", r.gradingDurationMs}};
}

struct SubmissionFilter {
  std::optional<std::string> student;
  std::optional<std::string> exercise;
  std::optional<std::string> status;
};

struct SubmissionPage {
  std::vector<SubmissionRecord> items;
  std::int64_t total = 0;
};

class Store {
 public:
  explicit Store(const std::filesystem::path& path) {
    if (sqlite3_open(path.c_str(), &db_) != SQLITE_OK) {
      std::string message = db_ ? sqlite3_errmsg(db_) : "out of memory";
      sqlite3_close(db_);
      throw StoreError("cannot open store " + path.string() + ": " + message);
    }
    sqlite3_busy_timeout(db_, 5000);
    exec("PRAGMA journal_mode=WAL");
    exec("PRAGMA synchronous=FULL");
    exec("CREATE TABLE IF NOT EXISTS meta (key TEXT PRIMARY KEY, value TEXT NOT NULL)");
    exec("CREATE TABLE IF NOT EXISTS exercises (id TEXT PRIMARY KEY, doc TEXT NOT NULL)");
    exec("CREATE TABLE IF NOT EXISTS submissions (seq INTEGER PRIMARY KEY AUTOINCREMENT, exercise TEXT NOT NULL, "
         "student TEXT NOT NULL, status TEXT NOT NULL, doc TEXT NOT NULL)");
    exec("INSERT OR IGNORE INTO meta (key, value) VALUES ('schemaVersion', '" + std::to_string(kSchemaVersion) + "')");
    Statement s(db_, "SELECT value FROM meta WHERE key = 'schemaVersion'");
    if (s.step() && std::stoi(s.text(0)) > kSchemaVersion) {
      throw StoreError("store " + path.string() + " was written by a newer version (schema " + s.text(0) + ")");
    }
  }

  Store(const Store&) = delete;
  Store& operator=(const Store&) = delete;
  ~Store() { sqlite3_close(db_); }

  /// Inserts or replaces an exercise document.
  void putExercise(const ExerciseRecord& r) {
    std::lock_guard lock(mutex_);
    Json doc = exerciseToJson(r);
    doc["schemaVersion"] = kSchemaVersion;
    Statement s(db_, "INSERT OR REPLACE INTO exercises (id, doc) VALUES (?, ?)");
    s.bind(1, r.exercise.id);
    s.bind(2, doc.dump());
    s.step();
  }

  std::optional<ExerciseRecord> getExercise(const std::string& id) const {
    std::lock_guard lock(mutex_);
    Statement s(db_, "SELECT doc FROM exercises WHERE id = ?");
    s.bind(1, id);
    if (!s.step()) return std::nullopt;
    return decodeExercise(s.text(0));
  }

  /// All exercises in id order.
  std::vector<ExerciseRecord> listExercises() const {
    std::lock_guard lock(mutex_);
    Statement s(db_, "SELECT doc FROM exercises ORDER BY id");
    std::vector<ExerciseRecord> out;
    while (s.step()) out.push_back(decodeExercise(s.text(0)));
    return out;
  }

  bool deleteExercise(const std::string& id) {
    std::lock_guard lock(mutex_);
    Statement s(db_, "DELETE FROM exercises WHERE id = ?");
    s.bind(1, id);
    s.step();
    return sqlite3_changes(db_) > 0;
  }

  /// Appends a submission and returns it with its assigned id.
  SubmissionRecord appendSubmission(SubmissionRecord r) {
    std::lock_guard lock(mutex_);
    exec("BEGIN IMMEDIATE");
    try {
      Statement s(db_, "INSERT INTO submissions (exercise, student, status, doc) VALUES (?, ?, ?, '{}')");
      s.bind(1, r.exerciseId);
      s.bind(2, r.studentId);
      s.bind(3, r.verdict.value("status", ""));
      s.step();
      r.id = sqlite3_last_insert_rowid(db_);
      Json doc = submissionToJson(r);
      doc["schemaVersion"] = kSchemaVersion;
      Statement u(db_, "UPDATE submissions SET doc = ? WHERE seq = ?");
      u.bind(1, doc.dump());
      u.bind(2, r.id);
      u.step();
      exec("COMMIT");
    } catch (...) {
      exec("ROLLBACK");
      throw;
    }
    return r;
  }

  /// Filtered submissions in submission order; `page` is 1-based.
  SubmissionPage listSubmissions(const SubmissionFilter& filter, std::int64_t page, std::int64_t pageSize) const {
    std::lock_guard lock(mutex_);
    std::string where = " WHERE 1 = 1";
    std::vector<std::string> params;
    if (filter.student) {
      where += " AND student = ?";
      params.push_back(*filter.student);
    }
    if (filter.exercise) {
      where += " AND exercise = ?";
      params.push_back(*filter.exercise);
    }
    if (filter.status) {
      where += " AND status = ?";
      params.push_back(*filter.status);
    }
    SubmissionPage out;
    {
      Statement s(db_, "SELECT COUNT(*) FROM submissions" + where);
      for (std::size_t i = 0; i < params.size(); ++i) s.bind(static_cast<int>(i + 1), params[i]);
      if (s.step()) out.total = s.integer(0);
    }
    Statement s(db_, "SELECT doc FROM submissions" + where + " ORDER BY seq LIMIT ? OFFSET ?");
    int index = 1;
    for (const std::string& p : params) s.bind(index++, p);
    s.bind(index++, pageSize);
    s.bind(index, (page - 1) * pageSize);
    while (s.step()) {
      Json doc = Json::parse(s.text(0));
      out.items.push_back(SubmissionRecord{doc.at("id").get<std::int64_t>(), doc.at("exerciseId").get<std::string>(),
                                           doc.at("studentId").get<std::string>(), doc.at("text").get<std::string>(),
                                           doc.at("submittedAt").get<std::string>(), doc.at("verdict"),
                                           doc.at("gradingDurationMs").get<std::int64_t>()});
    }
    return out;
  }

 private:
  class Statement {
   public:
    Statement(sqlite3* db, const std::string& sql) : db_(db) {
      if (sqlite3_prepare_v2(db, sql.c_str(), -1, &stmt_, nullptr) != SQLITE_OK) {
        throw StoreError(std::string("prepare failed: ") + sqlite3_errmsg(db));
      }
    }
    Statement(const Statement&) = delete;
    Statement& operator=(const Statement&) = delete;
    ~Statement() { sqlite3_finalize(stmt_); }

    void bind(int index, const std::string& value) {
      sqlite3_bind_text(stmt_, index, value.c_str(), static_cast<int>(value.size()), SQLITE_TRANSIENT);
    }
    void bind(int index, std::int64_t value) { sqlite3_bind_int64(stmt_, index, value); }

    /// True when a row is available.
    bool step() {
      const int rc = sqlite3_step(stmt_);
      if (rc == SQLITE_ROW) return true;
      if (rc == SQLITE_DONE) return false;
      throw StoreError(std::string("statement failed: ") + sqlite3_errmsg(db_));
    }

    std::string text(int column) const {
      const auto* p = reinterpret_cast<const char*>(sqlite3_column_text(stmt_, column));
      return p ? std::string(p, static_cast<std::size_t>(sqlite3_column_bytes(stmt_, column))) : std::string();
    }
    std::int64_t integer(int column) const { return sqlite3_column_int64(stmt_, column); }

   private:
    sqlite3* db_;
    sqlite3_stmt* stmt_ = nullptr;
  };

  void exec(const std::string& sql) {
    char* error = nullptr;
    if (sqlite3_exec(db_, sql.c_str(), nullptr, nullptr, &error) != SQLITE_OK) {
      std::string message = error ? error : "unknown error";
      sqlite3_free(error);
      throw StoreError("store: " + message);
    }
  }

  static ExerciseRecord decodeExercise(const std::string& text) {
    Json doc = Json::parse(text);
    doc.erase("schemaVersion");
    return exerciseFromJson(doc);
  }

  sqlite3* db_ = nullptr;
  mutable std::mutex mutex_;
};

}  // namespace folgrade::service
