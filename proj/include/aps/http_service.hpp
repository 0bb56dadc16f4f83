#pragma once

#include <aps/session.hpp>

#include <httplib.h>

#include <string>

namespace aps {

namespace detail {

inline void send_json(httplib::Response& res, int status, const Json& body) {
  res.status = status;
  res.set_content(body.dump(), "application/json");
}

template <class F>
void guarded(httplib::Response& res, F&& f) {
  try {
    send_json(res, 200, f());
  } catch (const ServiceError& e) {
    send_json(res, e.status(), e.to_json());
  } catch (const Json::exception& e) {
    send_json(res, 400, ServiceError(400, "invalid_request", e.what()).to_json());
  } catch (const std::exception& e) {
    send_json(res, 500, ServiceError(500, "internal", e.what()).to_json());
  }
}

inline Json body_of(const httplib::Request& req) {
  if (req.body.empty()) return Json::object();
  try {
    return Json::parse(req.body);
  } catch (const Json::parse_error& e) {
    throw ServiceError(400, "invalid_request", std::string("body is not JSON: ") + e.what());
  }
}

}  // namespace detail

/// Binds the v1 endpoints to `server`. The manager must outlive the server.
inline void register_routes(httplib::Server& server, SessionManager& sessions) {
  server.Get("/v1/graphs", [&](const httplib::Request&, httplib::Response& res) {
    detail::guarded(res, [&] { return sessions.list_graphs(); });
  });
  server.Post("/v1/sessions", [&](const httplib::Request& req, httplib::Response& res) {
    detail::guarded(res, [&] { return sessions.create(detail::body_of(req)); });
  });
  server.Post(R"(/v1/sessions/([0-9a-f]+)/moves)", [&](const httplib::Request& req, httplib::Response& res) {
    detail::guarded(res, [&] { return sessions.submit_move(req.matches[1], detail::body_of(req)); });
  });
  server.Post(R"(/v1/sessions/([0-9a-f]+)/beliefs)", [&](const httplib::Request& req, httplib::Response& res) {
    detail::guarded(res, [&] { return sessions.record_belief(req.matches[1], detail::body_of(req)); });
  });
  server.Get(R"(/v1/sessions/([0-9a-f]+)/transcript)", [&](const httplib::Request& req, httplib::Response& res) {
    detail::guarded(res, [&] { return sessions.transcript(req.matches[1]); });
  });
  server.set_error_handler([](const httplib::Request&, httplib::Response& res) {
    if (res.body.empty())
      detail::send_json(res, res.status, ServiceError(res.status, res.status == 404 ? "not_found" : "http_error",
                                                      "no such endpoint").to_json());
  });
}

}  // namespace aps
