#pragma once

// In-memory tutoring sessions and the per-message pipeline:
// classify text -> aggregate face trace -> fuse -> pick strategy ->
// render prompt -> ask the tutor backend -> record both turns.

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <memory>
#include <mutex>
#include <random>
#include <shared_mutex>
#include <sstream>
#include <string>
#include <unordered_map>
#include <vector>

#include <json.hpp>

#include "emotutor/emotion.hpp"
#include "emotutor/errors.hpp"
#include "emotutor/json_io.hpp"
#include "emotutor/strategy.hpp"
#include "emotutor/text_emotion.hpp"
#include "emotutor/tutor_backend.hpp"

namespace emotutor {

enum class SessionMode { EmotionOn, EmotionOff };

constexpr std::string_view to_string(SessionMode m) {
  return m == SessionMode::EmotionOn ? "emotion_on" : "emotion_off";
}

inline SessionMode parse_mode(std::string_view text) {
  if (detail::iequals(text, "emotion_on")) return SessionMode::EmotionOn;
  if (detail::iequals(text, "emotion_off")) return SessionMode::EmotionOff;
  throw ConfigError("unknown session mode '" + std::string(text) + "'");
}

/// Which face samples feed the aggregation for a message.
enum class FaceWindow {
  SinceLastMessage,  // only samples newer than the previous student turn
  Full,              // the whole trace
};

constexpr std::string_view to_string(FaceWindow w) {
  return w == FaceWindow::Full ? "full" : "since_last_message";
}

inline FaceWindow parse_window(std::string_view text) {
  if (detail::iequals(text, "full")) return FaceWindow::Full;
  if (detail::iequals(text, "since_last_message")) return FaceWindow::SinceLastMessage;
  throw ConfigError("unknown face window '" + std::string(text) + "'");
}

struct SessionConfig {
  AggregationConfig aggregation;
  FaceWindow window = FaceWindow::SinceLastMessage;
  StrategyPolicy policy;
  TemplateKind template_kind = TemplateKind::System;

  void validate() const {
    aggregation.validate();
    if (template_kind == TemplateKind::Judge) throw ConfigError("the judge template cannot drive the tutor");
  }

  bool operator==(const SessionConfig& o) const {
    return aggregation.half_life_seconds == o.aggregation.half_life_seconds &&
           aggregation.map_before_grouping == o.aggregation.map_before_grouping && window == o.window &&
           policy.neutral_action == o.policy.neutral_action && template_kind == o.template_kind;
  }
};

struct Session {
  std::string id;
  TimestampMs created_at = 0;
  SessionMode mode = SessionMode::EmotionOn;
  SessionConfig config;
  std::vector<ConversationTurn> turns;
  std::vector<EmotionSample> face_samples;  // sorted by timestamp

  bool operator==(const Session&) const = default;
};

struct MessageResponse {
  std::string tutor_text;
  ScoredPrimitive detected_text_emotion;
  ScoredPrimitive detected_face_emotion;
  ScoredPrimitive fused_emotion;
  PedagogicalStrategy strategy = PedagogicalStrategy::Motivate;
  std::chrono::milliseconds latency{0};
  std::string prompt;  // what was sent to the backend; not part of the wire format
};

// --- JSON ------------------------------------------------------------------

inline void to_json(json& j, SessionMode m) { j = std::string(to_string(m)); }
inline void from_json(const json& j, SessionMode& m) { m = parse_mode(j.get<std::string>()); }

inline void to_json(json& j, const SessionConfig& c) {
  j = {{"aggregation", c.aggregation},
       {"window", std::string(to_string(c.window))},
       {"strategy", {{"neutral_action", c.policy.neutral_action}}},
       {"template", std::string(to_string(c.template_kind))}};
}

/// Missing keys keep the values already in `c`, so a partial object acts as
/// an override on top of defaults.
inline void apply_session_config(const json& j, SessionConfig& c) {
  if (!j.is_object()) throw ConfigError("session config must be an object");
  try {
    if (j.contains("aggregation")) {
      const auto& a = j["aggregation"];
      c.aggregation.half_life_seconds = a.value("half_life_seconds", c.aggregation.half_life_seconds);
      c.aggregation.map_before_grouping = a.value("map_before_grouping", c.aggregation.map_before_grouping);
      if (a.contains("window")) c.window = parse_window(a["window"].get<std::string>());
    }
    if (j.contains("half_life_seconds")) c.aggregation.half_life_seconds = j["half_life_seconds"].get<double>();
    if (j.contains("window")) c.window = parse_window(j["window"].get<std::string>());
    if (j.contains("strategy") && j["strategy"].contains("neutral_action")) {
      c.policy.neutral_action = parse_strategy(j["strategy"]["neutral_action"].get<std::string>());
    }
    if (j.contains("template")) c.template_kind = parse_template_kind(j["template"].get<std::string>());
  } catch (const json::exception& e) {
    throw ConfigError(std::string("invalid session config: ") + e.what());
  }
  c.validate();
}

inline void from_json(const json& j, SessionConfig& c) {
  c = SessionConfig{};
  apply_session_config(j, c);
}

inline void to_json(json& j, const Session& s) {
  j = {{"id", s.id},       {"created_at", s.created_at}, {"mode", s.mode},
       {"config", s.config}, {"turns", s.turns},          {"face_samples", s.face_samples}};
}
inline void from_json(const json& j, Session& s) {
  s.id = j.at("id").get<std::string>();
  s.created_at = j.at("created_at").get<TimestampMs>();
  s.mode = j.at("mode").get<SessionMode>();
  s.config = j.at("config").get<SessionConfig>();
  s.turns = j.at("turns").get<std::vector<ConversationTurn>>();
  s.face_samples = j.at("face_samples").get<std::vector<EmotionSample>>();
}

inline void to_json(json& j, const MessageResponse& r) {
  j = {{"tutor_text", r.tutor_text},
       {"detected_text_emotion", r.detected_text_emotion},
       {"detected_face_emotion", r.detected_face_emotion},
       {"fused_emotion", r.fused_emotion},
       {"strategy", r.strategy},
       {"latency_ms", r.latency.count()}};
}

// --- store -----------------------------------------------------------------

/// Process-lifetime session table. Each session has its own mutex guarding
/// its data and a busy flag that admits one message at a time.
class SessionStore {
 public:
  struct Slot {
    mutable std::mutex mu;
    Session data;
    std::atomic<bool> busy{false};
  };

  std::string create(SessionMode mode, const SessionConfig& config, TimestampMs now) {
    config.validate();
    auto slot = std::make_shared<Slot>();
    slot->data.mode = mode;
    slot->data.config = config;
    slot->data.created_at = now;
    std::unique_lock lock(map_mu_);
    std::string id;
    do {
      id = fresh_id();
    } while (slots_.contains(id));
    slot->data.id = id;
    slots_.emplace(id, std::move(slot));
    return id;
  }

  std::shared_ptr<Slot> find(const std::string& id) const {
    std::shared_lock lock(map_mu_);
    const auto it = slots_.find(id);
    if (it == slots_.end()) throw NotFound("no session '" + id + "'");
    return it->second;
  }

  Session snapshot(const std::string& id) const {
    const auto slot = find(id);
    std::lock_guard lock(slot->mu);
    return slot->data;
  }

  /// Validates the whole batch before touching the session; merges in
  /// timestamp order and drops samples whose (label, timestamp) is already
  /// present. Returns how many were added.
  std::size_t ingest(const std::string& id, std::span<const EmotionSample> samples) {
    for (const auto& s : samples) s.validate();
    const auto slot = find(id);
    std::lock_guard lock(slot->mu);
    auto& trace = slot->data.face_samples;
    std::size_t accepted = 0;
    for (const auto& s : samples) {
      const auto lo = std::lower_bound(trace.begin(), trace.end(), s.timestamp,
                                       [](const EmotionSample& e, TimestampMs t) { return e.timestamp < t; });
      auto hi = lo;
      bool duplicate = false;
      while (hi != trace.end() && hi->timestamp == s.timestamp) {
        duplicate = duplicate || hi->label == s.label;
        ++hi;
      }
      if (duplicate) continue;
      trace.insert(hi, s);
      ++accepted;
    }
    return accepted;
  }

  std::size_t size() const {
    std::shared_lock lock(map_mu_);
    return slots_.size();
  }

  std::vector<Session> all() const {
    std::vector<std::shared_ptr<Slot>> slots;
    {
      std::shared_lock lock(map_mu_);
      for (const auto& [id, slot] : slots_) slots.push_back(slot);
    }
    std::vector<Session> out;
    for (const auto& slot : slots) {
      std::lock_guard lock(slot->mu);
      out.push_back(slot->data);
    }
    std::sort(out.begin(), out.end(), [](const Session& a, const Session& b) { return a.id < b.id; });
    return out;
  }

  json to_json() const {
    return {{"sessions", all()}};
  }

  /// Writes the snapshot to a temporary file and renames it into place.
  void save(const std::filesystem::path& path) const {
    const auto tmp = path.string() + ".tmp";
    {
      std::ofstream out(tmp, std::ios::trunc);
      if (!out) throw LoadError("cannot write snapshot " + tmp);
      out << to_json().dump(2) << '\n';
    }
    std::filesystem::rename(tmp, path);
  }

  /// Replaces the store contents with a snapshot produced by save().
  void load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw LoadError("cannot read snapshot " + path.string());
    std::vector<Session> sessions;
    try {
      sessions = json::parse(in).at("sessions").get<std::vector<Session>>();
    } catch (const json::exception& e) {
      throw LoadError("malformed snapshot " + path.string() + ": " + e.what());
    }
    std::unordered_map<std::string, std::shared_ptr<Slot>> slots;
    for (auto& s : sessions) {
      auto slot = std::make_shared<Slot>();
      const auto id = s.id;
      slot->data = std::move(s);
      slots.emplace(id, std::move(slot));
    }
    std::unique_lock lock(map_mu_);
    slots_ = std::move(slots);
  }

 private:
  std::string fresh_id() {
    std::ostringstream out;
    out << std::hex << std::setw(16) << std::setfill('0') << rng_();
    return out.str();
  }

  mutable std::shared_mutex map_mu_;
  std::unordered_map<std::string, std::shared_ptr<Slot>> slots_;
  std::mt19937_64 rng_{std::random_device{}()};
};

/// Holds a session's busy flag for the duration of one message.
class MessageLease {
 public:
  explicit MessageLease(std::shared_ptr<SessionStore::Slot> slot) : slot_(std::move(slot)) {
    if (slot_->busy.exchange(true)) throw Busy("a message is already being handled for this session");
  }
  ~MessageLease() { slot_->busy.store(false); }
  MessageLease(const MessageLease&) = delete;
  MessageLease& operator=(const MessageLease&) = delete;

 private:
  std::shared_ptr<SessionStore::Slot> slot_;
};

// --- service ---------------------------------------------------------------

inline TimestampMs wall_clock_ms() {
  using namespace std::chrono;
  return duration_cast<milliseconds>(system_clock::now().time_since_epoch()).count();
}

/// The face samples that feed the aggregation for a message at `now`.
inline std::vector<EmotionSample> face_window(const Session& session, TimestampMs now) {
  std::optional<TimestampMs> since;
  if (session.config.window == FaceWindow::SinceLastMessage) {
    for (auto it = session.turns.rbegin(); it != session.turns.rend(); ++it) {
      if (it->role == Role::Student) {
        since = it->timestamp;
        break;
      }
    }
  }
  std::vector<EmotionSample> window;
  for (const auto& s : session.face_samples) {
    if (s.timestamp > now) continue;
    if (since && s.timestamp <= *since) continue;
    window.push_back(s);
  }
  return window;
}

class TutorService {
 public:
  TutorService(std::shared_ptr<const TextClassifier> classifier, std::shared_ptr<TutorBackend> backend,
               SessionConfig defaults = {})
      : classifier_(std::move(classifier)), backend_(std::move(backend)), defaults_(defaults) {
    defaults_.validate();
    for (auto kind : {TemplateKind::System, TemplateKind::Simple, TemplateKind::Complex}) {
      templates_[static_cast<int>(kind)] = PromptTemplate::builtin(kind);
    }
  }

  /// Replaces a built-in tutor template (e.g. one loaded from templates/).
  void set_template(PromptTemplate tmpl) {
    if (tmpl.kind == TemplateKind::Judge) throw ConfigError("the judge template cannot drive the tutor");
    templates_[static_cast<int>(tmpl.kind)] = std::move(tmpl);
  }

  const SessionConfig& defaults() const noexcept { return defaults_; }
  SessionStore& store() noexcept { return store_; }
  const SessionStore& store() const noexcept { return store_; }

  std::string create_session(SessionMode mode, const SessionConfig& config, TimestampMs now = wall_clock_ms()) {
    return store_.create(mode, config, now);
  }
  std::string create_session(SessionMode mode) { return create_session(mode, defaults_); }

  std::size_t ingest_emotion_samples(const std::string& id, std::span<const EmotionSample> samples) {
    return store_.ingest(id, samples);
  }

  Session get_transcript(const std::string& id) const { return store_.snapshot(id); }

  /// Runs the full pipeline for one student message received at `now`.
  ///
  /// If the previous message failed at the backend, its unanswered student
  /// turn is replaced by this one so turns keep alternating. On backend
  /// failure the student turn is kept and BackendUnavailable propagates.
  MessageResponse handle_message(const std::string& id, const std::string& text, TimestampMs now) {
    require_utterance(text);
    const auto started = std::chrono::steady_clock::now();
    auto slot = store_.find(id);
    MessageLease lease(slot);

    Session view;
    {
      std::lock_guard lock(slot->mu);
      view = slot->data;
    }
    const bool orphan = !view.turns.empty() && view.turns.back().role == Role::Student;
    if (orphan) view.turns.pop_back();

    MessageResponse response;
    TextEmotionAnnotation annotation = kNeutralAnnotation;
    try {
      annotation = classifier_->annotate(text);
    } catch (const ClassifierUnavailable&) {
    }
    response.detected_text_emotion = annotation_to_primitive(annotation);
    const auto window = face_window(view, now);
    response.detected_face_emotion = aggregate_temporal(window, now, view.config.aggregation);
    response.fused_emotion = fuse(response.detected_face_emotion, response.detected_text_emotion);
    response.strategy = select_strategy(response.fused_emotion.primitive, view.config.policy);

    ConversationTurn student{Role::Student, text, now, response.fused_emotion, std::nullopt};
    view.turns.push_back(student);
    const ScoredPrimitive sentiment = view.mode == SessionMode::EmotionOn
                                          ? response.fused_emotion
                                          : ScoredPrimitive{PrimitiveEmotion::Neutral, 0.0};
    response.prompt = render_tutor_prompt(templates_[static_cast<int>(view.config.template_kind)], view.turns,
                                          sentiment);

    auto record = [&](std::optional<ConversationTurn> tutor) {
      std::lock_guard lock(slot->mu);
      auto& turns = slot->data.turns;
      if (!turns.empty() && turns.back().role == Role::Student) turns.pop_back();
      turns.push_back(student);
      if (tutor) turns.push_back(std::move(*tutor));
    };

    try {
      response.tutor_text = backend_->generate(response.prompt);
    } catch (const BackendUnavailable&) {
      record(std::nullopt);
      throw;
    }
    response.latency =
        std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - started);
    record(ConversationTurn{Role::Tutor, response.tutor_text, now + response.latency.count(), std::nullopt,
                            response.strategy});
    return response;
  }

 private:
  std::shared_ptr<const TextClassifier> classifier_;
  std::shared_ptr<TutorBackend> backend_;
  SessionConfig defaults_;
  std::array<PromptTemplate, 3> templates_;
  SessionStore store_;
};

}  // namespace emotutor
