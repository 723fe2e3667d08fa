#pragma once

#include <chrono>
#include <optional>
#include <string>

#include <json.hpp>

#include "emotutor/emotion.hpp"
#include "emotutor/errors.hpp"
#include "emotutor/http_client.hpp"

namespace emotutor {

/// Server-side face-expression recognizer. The endpoint receives the raw
/// image body and answers {"label": "<EmotionLabel>", "confidence": x}.
struct FaceRecognizerBinding {
  std::string endpoint;
  std::chrono::milliseconds timeout{2000};

  void validate() const {
    if (endpoint.empty()) throw ConfigError("face recognizer needs an endpoint");
    http::split_url(endpoint);
  }
};

/// Recognition normally runs in the browser, so without a binding this is
/// NotImplemented. Any recognizer failure degrades to a (Neutral, 0) sample.
inline EmotionSample recognize_face(const std::string& image, const std::string& content_type,
                                    const std::optional<FaceRecognizerBinding>& binding, TimestampMs now) {
  if (!binding) throw NotImplemented("face recognition runs in the client; no recognizer configured");
  const EmotionSample fallback{EmotionLabel::Neutral, 0.0, now};
  const auto response = http::post(binding->endpoint, image, content_type, binding->timeout);
  if (!response || response->status != 200) return fallback;
  try {
    const auto body = nlohmann::json::parse(response->body);
    EmotionSample sample{parse_emotion_label(body.at("label").get<std::string>()),
                         body.at("confidence").get<double>(), now};
    sample.validate();
    return sample;
  } catch (const nlohmann::json::exception&) {
    return fallback;
  } catch (const InputError&) {
    return fallback;
  }
}

}  // namespace emotutor
