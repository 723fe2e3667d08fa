#pragma once

#include <chrono>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>

#include <json.hpp>

#include "emotutor/errors.hpp"
#include "emotutor/face.hpp"
#include "emotutor/session.hpp"
#include "emotutor/text_emotion.hpp"
#include "emotutor/tutor_backend.hpp"

namespace emotutor {

/// Everything `serve` needs. Relative paths in the file are resolved against
/// the directory of the config file.
///
///   {
///     "aggregation": {"half_life_seconds": 120, "map_before_grouping": true,
///                     "window": "since_last_message"},
///     "strategy": {"neutral_action": "Motivate"},
///     "template": "system",
///     "templates_dir": "templates",
///     "tutor": {"endpoint": "...", "model_name": "...", "auth_env": "TUTOR_API_KEY",
///               "timeout_ms": 30000, "scripted_fixture": "..."},
///     "classifier": {"kind": "lexicon", "lexicon_path": "...",
///                    "endpoint": "...", "timeout_ms": 2000},
///     "face_recognizer": {"endpoint": "...", "timeout_ms": 2000},
///     "static_dir": "web", "snapshot_path": "sessions.json"
///   }
struct ServiceConfig {
  SessionConfig session;
  TutorBackendBinding tutor;
  TextClassifierBinding classifier;
  std::optional<FaceRecognizerBinding> face_recognizer;
  std::string templates_dir;
  std::string static_dir;
  std::string snapshot_path;

  static ServiceConfig from_json(const json& j, const std::filesystem::path& base_dir = {}) {
    auto resolve = [&](const std::string& p) -> std::string {
      if (p.empty()) return p;
      const std::filesystem::path path(p);
      return path.is_absolute() || base_dir.empty() ? p : (base_dir / path).string();
    };
    auto millis = [](const json& obj, std::chrono::milliseconds fallback) {
      return std::chrono::milliseconds(obj.value("timeout_ms", static_cast<long long>(fallback.count())));
    };

    ServiceConfig c;
    try {
      apply_session_config(j, c.session);

      const auto tutor = j.value("tutor", json::object());
      c.tutor.endpoint = tutor.value("endpoint", "");
      c.tutor.model_name = tutor.value("model_name", "");
      c.tutor.auth_env = tutor.value("auth_env", "");
      c.tutor.timeout = millis(tutor, c.tutor.timeout);
      c.tutor.scripted_fixture = resolve(tutor.value("scripted_fixture", ""));

      const auto classifier = j.value("classifier", json::object());
      const auto kind = classifier.value("kind", "lexicon");
      if (kind == "lexicon") {
        c.classifier.kind = ClassifierKind::Lexicon;
      } else if (kind == "remote") {
        c.classifier.kind = ClassifierKind::Remote;
      } else {
        throw ConfigError("unknown classifier kind '" + kind + "'");
      }
      c.classifier.endpoint = classifier.value("endpoint", "");
      c.classifier.timeout = millis(classifier, c.classifier.timeout);
      c.classifier.lexicon_path = resolve(classifier.value("lexicon_path", ""));

      if (j.contains("face_recognizer") && !j["face_recognizer"].is_null()) {
        const auto& face = j["face_recognizer"];
        FaceRecognizerBinding binding;
        binding.endpoint = face.value("endpoint", "");
        binding.timeout = millis(face, binding.timeout);
        binding.validate();
        c.face_recognizer = binding;
      }
      c.templates_dir = resolve(j.value("templates_dir", ""));
      c.static_dir = resolve(j.value("static_dir", ""));
      c.snapshot_path = resolve(j.value("snapshot_path", ""));
    } catch (const json::exception& e) {
      throw ConfigError(std::string("invalid config: ") + e.what());
    }
    c.tutor.validate();
    c.classifier.validate();
    return c;
  }

  static ServiceConfig load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read config " + path.string());
    json doc;
    try {
      doc = json::parse(in);
    } catch (const json::exception& e) {
      throw ConfigError("config " + path.string() + " is not valid JSON: " + e.what());
    }
    return from_json(doc, path.parent_path());
  }
};

}  // namespace emotutor
