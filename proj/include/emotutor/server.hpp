#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <utility>

#include <httplib.h>
#include <json.hpp>

#include "emotutor/errors.hpp"
#include "emotutor/face.hpp"
#include "emotutor/json_io.hpp"
#include "emotutor/session.hpp"

namespace emotutor {

inline int http_status_for(const std::exception& e) {
  if (dynamic_cast<const NotFound*>(&e)) return 404;
  if (dynamic_cast<const Busy*>(&e)) return 409;
  if (dynamic_cast<const BackendUnavailable*>(&e)) return 502;
  if (dynamic_cast<const NotImplemented*>(&e)) return 501;
  if (dynamic_cast<const InputError*>(&e) || dynamic_cast<const ConfigError*>(&e) ||
      dynamic_cast<const StateError*>(&e) || dynamic_cast<const ClockSkew*>(&e) ||
      dynamic_cast<const json::exception*>(&e)) {
    return 400;
  }
  return 500;
}

inline const char* error_kind(int status) {
  switch (status) {
    case 400: return "InputError";
    case 404: return "NotFound";
    case 409: return "Busy";
    case 501: return "NotImplemented";
    case 502: return "BackendUnavailable";
    default: return "InternalError";
  }
}

/// REST front of a TutorService:
///
///   POST /api/sessions                  {mode, config?}        -> 201 {id}
///   POST /api/sessions/{id}/emotions    {samples: [...]}       -> 200 {accepted}
///   POST /api/sessions/{id}/messages    {text}                 -> 200 MessageResponse
///   GET  /api/sessions/{id}                                    -> 200 Session
///   POST /api/face-emotion              image/jpeg|image/png   -> 200 EmotionSample
///
/// Errors come back as {"error": kind, "message": text}.
class ApiServer {
 public:
  using Clock = std::function<TimestampMs()>;

  explicit ApiServer(TutorService& service, std::optional<FaceRecognizerBinding> face = std::nullopt,
                     Clock clock = wall_clock_ms)
      : service_(service), face_(std::move(face)), clock_(std::move(clock)) {
    routes();
  }

  /// Serves files under `dir` at the root path (the browser client bundle).
  bool mount_static(const std::string& dir) { return server_.set_mount_point("/", dir); }

  bool listen(const std::string& host, int port) { return server_.listen(host, port); }
  int bind_to_any_port(const std::string& host) { return server_.bind_to_any_port(host); }
  bool listen_after_bind() { return server_.listen_after_bind(); }
  void stop() { server_.stop(); }
  void wait_until_ready() const { server_.wait_until_ready(); }
  bool is_running() const { return server_.is_running(); }

 private:
  template <typename Handler>
  static void guarded(httplib::Response& res, Handler&& handler) {
    try {
      handler();
    } catch (const std::exception& e) {
      const int status = http_status_for(e);
      res.status = status;
      res.set_content(json{{"error", error_kind(status)}, {"message", e.what()}}.dump(), "application/json");
    }
  }

  static json parse_body(const httplib::Request& req) {
    try {
      return json::parse(req.body);
    } catch (const json::exception& e) {
      throw InputError(std::string("request body is not valid JSON: ") + e.what());
    }
  }

  static void reply(httplib::Response& res, int status, const json& body) {
    res.status = status;
    res.set_content(body.dump(), "application/json");
  }

  void routes() {
    server_.Post("/api/sessions", [this](const httplib::Request& req, httplib::Response& res) {
      guarded(res, [&] {
        const auto body = req.body.empty() ? json::object() : parse_body(req);
        if (!body.is_object()) throw InputError("request body must be an object");
        const auto mode = parse_mode(body.value("mode", "emotion_on"));
        SessionConfig config = service_.defaults();
        if (body.contains("config") && !body["config"].is_null()) apply_session_config(body["config"], config);
        const auto id = service_.create_session(mode, config, clock_());
        reply(res, 201, {{"id", id}});
      });
    });

    server_.Post(R"(/api/sessions/([^/]+)/emotions)", [this](const httplib::Request& req, httplib::Response& res) {
      guarded(res, [&] {
        const auto body = parse_body(req);
        if (!body.is_object() || !body.contains("samples") || !body["samples"].is_array()) {
          throw InputError("expected {\"samples\": [...]}");
        }
        std::vector<EmotionSample> samples;
        try {
          samples = body["samples"].get<std::vector<EmotionSample>>();
        } catch (const json::exception& e) {
          throw InputError(std::string("malformed emotion sample: ") + e.what());
        }
        const auto accepted = service_.ingest_emotion_samples(req.matches[1], samples);
        reply(res, 200, {{"accepted", accepted}});
      });
    });

    server_.Post(R"(/api/sessions/([^/]+)/messages)", [this](const httplib::Request& req, httplib::Response& res) {
      guarded(res, [&] {
        const auto now = clock_();
        const auto body = parse_body(req);
        if (!body.is_object() || !body.contains("text") || !body["text"].is_string()) {
          throw InputError("expected {\"text\": \"...\"}");
        }
        const auto response = service_.handle_message(req.matches[1], body["text"].get<std::string>(), now);
        reply(res, 200, response);
      });
    });

    server_.Get(R"(/api/sessions/([^/]+))", [this](const httplib::Request& req, httplib::Response& res) {
      guarded(res, [&] { reply(res, 200, service_.get_transcript(req.matches[1])); });
    });

    server_.Post("/api/face-emotion", [this](const httplib::Request& req, httplib::Response& res) {
      guarded(res, [&] {
        const auto content_type = req.get_header_value("Content-Type");
        if (face_ && content_type != "image/jpeg" && content_type != "image/png") {
          throw InputError("expected an image/jpeg or image/png body");
        }
        reply(res, 200, recognize_face(req.body, content_type, face_, clock_()));
      });
    });
  }

  TutorService& service_;
  std::optional<FaceRecognizerBinding> face_;
  Clock clock_;
  httplib::Server server_;
};

}  // namespace emotutor
