#pragma once

// Bearer-token authentication from a static token file:
//   {"tokens": [{"token": "s3cret", "user": "alice", "role": "student", "cohort": "cs101"},
//               {"token": "t0ken", "user": "prof", "role": "instructor"}]}

#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

#include "folgrade/codec.hpp"

namespace folgrade::service {

enum class Role { Student, Instructor };

struct Principal {
  std::string user;
  Role role;
  /// Students only; empty means no cohort.
  std::string cohort;
};

class TokenRegistry {
 public:
  void add(std::string token, Principal principal) {
    if (token.empty()) throw std::invalid_argument("empty token");
    tokens_.insert_or_assign(std::move(token), std::move(principal));
  }

  std::optional<Principal> lookup(std::string_view token) const {
    auto it = tokens_.find(std::string(token));
    if (it == tokens_.end()) return std::nullopt;
    return it->second;
  }

  /// Resolves an `Authorization: Bearer <token>` header value.
  std::optional<Principal> authenticate(std::string_view header) const {
    constexpr std::string_view prefix = "Bearer ";
    if (header.substr(0, prefix.size()) != prefix) return std::nullopt;
    return lookup(header.substr(prefix.size()));
  }

  std::size_t size() const { return tokens_.size(); }

  static TokenRegistry fromJson(const Json& j) {
    TokenRegistry r;
    if (!j.is_object() || !j.contains("tokens") || !j["tokens"].is_array()) {
      throw std::runtime_error("token file must be an object with a \"tokens\" array");
    }
    for (const Json& t : j["tokens"]) {
      const std::string role = t.value("role", "");
      if (role != "student" && role != "instructor") {
        throw std::runtime_error("token role must be \"student\" or \"instructor\"");
      }
      r.add(t.at("token").get<std::string>(),
            Principal{t.at("user").get<std::string>(), role == "student" ? Role::Student : Role::Instructor,
                      t.value("cohort", "")});
    }
    return r;
  }

  static TokenRegistry load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot read token file " + path.string());
    return fromJson(Json::parse(in));
  }

 private:
  std::map<std::string, Principal> tokens_;
};

}  // namespace folgrade::service
