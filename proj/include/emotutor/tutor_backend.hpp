#pragma once

#include <atomic>
#include <chrono>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "emotutor/errors.hpp"
#include "emotutor/http_client.hpp"

namespace emotutor {

/// Where tutor replies come from: a chat-completions endpoint, or a scripted
/// fixture for offline runs. Exactly one must be set.
struct TutorBackendBinding {
  std::string endpoint;
  std::string model_name;
  std::string auth_env;  // name of the environment variable holding the API key
  std::chrono::milliseconds timeout{30000};
  std::string scripted_fixture;

  void validate() const {
    if (endpoint.empty() == scripted_fixture.empty()) {
      throw ConfigError("tutor backend needs exactly one of endpoint or scripted_fixture");
    }
    if (!endpoint.empty()) http::split_url(endpoint);
  }
};

class TutorBackend {
 public:
  virtual ~TutorBackend() = default;
  /// Returns the tutor's reply or throws BackendUnavailable.
  virtual std::string generate(const std::string& prompt) = 0;
};

/// Offline backend. With no scripted replies it echoes the prompt back;
/// otherwise it cycles through the replies, where a null entry simulates a
/// backend timeout.
///
/// Fixture file: {"echo": true} or {"responses": ["...", null, ...]}.
class ScriptedTutor final : public TutorBackend {
 public:
  ScriptedTutor() = default;
  explicit ScriptedTutor(std::vector<std::optional<std::string>> replies) : replies_(std::move(replies)) {}

  static std::unique_ptr<ScriptedTutor> from_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read scripted tutor fixture " + path);
    nlohmann::json doc;
    try {
      doc = nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
      throw ConfigError("scripted tutor fixture " + path + ": " + e.what());
    }
    if (doc.value("echo", false)) return std::make_unique<ScriptedTutor>();
    std::vector<std::optional<std::string>> replies;
    for (const auto& r : doc.at("responses")) {
      if (r.is_null()) {
        replies.emplace_back(std::nullopt);
      } else {
        replies.emplace_back(r.get<std::string>());
      }
    }
    if (replies.empty()) throw ConfigError("scripted tutor fixture has no responses");
    return std::make_unique<ScriptedTutor>(std::move(replies));
  }

  std::string generate(const std::string& prompt) override {
    if (replies_.empty()) return prompt;
    const auto& reply = replies_[next_++ % replies_.size()];
    if (!reply) throw BackendUnavailable("scripted tutor timeout");
    return *reply;
  }

 private:
  std::vector<std::optional<std::string>> replies_;
  std::atomic<std::size_t> next_{0};
};

/// Adapts any callable; mostly for tests.
class FunctionTutor final : public TutorBackend {
 public:
  explicit FunctionTutor(std::function<std::string(const std::string&)> fn) : fn_(std::move(fn)) {}
  std::string generate(const std::string& prompt) override { return fn_(prompt); }

 private:
  std::function<std::string(const std::string&)> fn_;
};

/// OpenAI-style chat-completions client: the prompt is sent as one user
/// message and the first choice's content is returned.
class ChatCompletionsTutor final : public TutorBackend {
 public:
  explicit ChatCompletionsTutor(TutorBackendBinding binding) : binding_(std::move(binding)) {}

  std::string generate(const std::string& prompt) override {
    nlohmann::json request = {
        {"model", binding_.model_name},
        {"messages", nlohmann::json::array({{{"role", "user"}, {"content", prompt}}})},
    };
    httplib::Headers headers;
    if (!binding_.auth_env.empty()) {
      if (const char* key = std::getenv(binding_.auth_env.c_str())) {
        headers.emplace("Authorization", std::string("Bearer ") + key);
      }
    }
    const auto response = http::post(binding_.endpoint, request.dump(), "application/json", binding_.timeout, headers);
    if (!response) throw BackendUnavailable("tutor backend unreachable at " + binding_.endpoint);
    if (response->status != 200) {
      throw BackendUnavailable("tutor backend returned HTTP " + std::to_string(response->status));
    }
    try {
      const auto body = nlohmann::json::parse(response->body);
      return body.at("choices").at(0).at("message").at("content").get<std::string>();
    } catch (const nlohmann::json::exception& e) {
      throw BackendUnavailable(std::string("malformed tutor backend response: ") + e.what());
    }
  }

 private:
  TutorBackendBinding binding_;
};

inline std::unique_ptr<TutorBackend> make_tutor_backend(const TutorBackendBinding& binding) {
  binding.validate();
  if (!binding.scripted_fixture.empty()) return ScriptedTutor::from_file(binding.scripted_fixture);
  return std::make_unique<ChatCompletionsTutor>(binding);
}

}  // namespace emotutor
