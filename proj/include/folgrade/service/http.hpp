#pragma once

// Binds the Service API to HTTP routes.

#include <map>
#include <optional>
#include <string>

#include "httplib.h"

#include "folgrade/service/service.hpp"

namespace folgrade::service {

class HttpServer {
 public:
  explicit HttpServer(Service& service) : service_(service) {
    const std::string id = "([A-Za-z0-9_.-]+)";
    server_.Get("/api/health", [this](const httplib::Request&, httplib::Response& res) { send(res, service_.health()); });
    server_.Get("/api/exercises", [this](const httplib::Request& req, httplib::Response& res) {
      send(res, service_.listExercises(who(req)));
    });
    server_.Post("/api/exercises", [this](const httplib::Request& req, httplib::Response& res) {
      send(res, service_.createExercise(who(req), req.body));
    });
    server_.Get("/api/exercises/" + id, [this](const httplib::Request& req, httplib::Response& res) {
      send(res, service_.getExercise(who(req), req.matches[1]));
    });
    server_.Put("/api/exercises/" + id, [this](const httplib::Request& req, httplib::Response& res) {
      send(res, service_.updateExercise(who(req), req.matches[1], req.body));
    });
    server_.Delete("/api/exercises/" + id, [this](const httplib::Request& req, httplib::Response& res) {
      send(res, service_.deleteExercise(who(req), req.matches[1]));
    });
    server_.Post("/api/exercises/" + id + "/submissions", [this](const httplib::Request& req, httplib::Response& res) {
      send(res, service_.submit(who(req), req.matches[1], req.body));
    });
    server_.Get("/api/submissions", [this](const httplib::Request& req, httplib::Response& res) {
      std::map<std::string, std::string> query;
      for (const auto& [k, v] : req.params) query[k] = v;
      send(res, service_.listSubmissions(who(req), query));
    });
    server_.set_exception_handler([](const httplib::Request&, httplib::Response& res, std::exception_ptr ep) {
      std::string message = "internal error";
      try {
        std::rethrow_exception(ep);
      } catch (const std::exception& e) {
        message = e.what();
      } catch (...) {
      }
      send(res, errorResponse(500, "InternalError", message));
    });
    server_.set_error_handler([](const httplib::Request&, httplib::Response& res) {
      if (res.body.empty()) send(res, errorResponse(res.status, "NotFound", "no such endpoint"));
    });
  }

  /// Blocks serving requests until stop() is called.
  bool listen(const std::string& host, int port) { return server_.listen(host, port); }

  /// Binds to an ephemeral port and returns it (or -1).
  int bindToAnyPort(const std::string& host) { return server_.bind_to_any_port(host); }
  bool listenAfterBind() { return server_.listen_after_bind(); }

  void stop() { server_.stop(); }
  void waitUntilReady() const { server_.wait_until_ready(); }

 private:
  std::optional<Principal> who(const httplib::Request& req) const {
    return service_.authenticate(req.get_header_value("Authorization"));
  }

  static void send(httplib::Response& res, const Response& r) {
    res.status = r.status;
    res.set_content(r.body.dump(), "application/json");
  }

  Service& service_;
  httplib::Server server_;
};

}  // namespace folgrade::service
