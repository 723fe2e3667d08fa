#pragma once

// nlohmann::json mappings for the value types exchanged over HTTP, written to
// snapshots, and read by the CLI.

#include <string>

#include <json.hpp>

#include "emotutor/emotion.hpp"
#include "emotutor/strategy.hpp"
#include "emotutor/text_emotion.hpp"

namespace emotutor {

using json = nlohmann::json;

inline void to_json(json& j, EmotionLabel l) { j = std::string(to_string(l)); }
inline void from_json(const json& j, EmotionLabel& l) { l = parse_emotion_label(j.get<std::string>()); }

inline void to_json(json& j, PrimitiveEmotion p) { j = std::string(to_string(p)); }
inline void from_json(const json& j, PrimitiveEmotion& p) { p = parse_primitive(j.get<std::string>()); }

inline void to_json(json& j, PedagogicalStrategy s) { j = std::string(to_string(s)); }
inline void from_json(const json& j, PedagogicalStrategy& s) { s = parse_strategy(j.get<std::string>()); }

inline void to_json(json& j, Role r) { j = std::string(to_string(r)); }
inline void from_json(const json& j, Role& r) { r = parse_role(j.get<std::string>()); }

inline void to_json(json& j, const EmotionSample& s) {
  j = {{"label", s.label}, {"confidence", s.confidence}, {"timestamp", s.timestamp}};
}

/// Strict: all three keys, correct JSON types, value invariants checked.
inline void from_json(const json& j, EmotionSample& s) {
  if (!j.is_object()) throw InputError("emotion sample must be an object");
  const auto& label = j.at("label");
  const auto& confidence = j.at("confidence");
  const auto& timestamp = j.at("timestamp");
  if (!label.is_string() || !confidence.is_number() || !timestamp.is_number_integer()) {
    throw InputError("emotion sample has a field of the wrong type");
  }
  s.label = label.get<EmotionLabel>();
  s.confidence = confidence.get<double>();
  s.timestamp = timestamp.get<TimestampMs>();
  s.validate();
}

inline void to_json(json& j, const ScoredPrimitive& p) {
  j = {{"primitive", p.primitive}, {"confidence", p.confidence}};
}
inline void from_json(const json& j, ScoredPrimitive& p) {
  p.primitive = j.at("primitive").get<PrimitiveEmotion>();
  p.confidence = j.at("confidence").get<double>();
  p.validate();
}

inline void to_json(json& j, const TextEmotionAnnotation& a) {
  j = {{"boredom", a.boredom}, {"engagement", a.engagement}, {"neutral", a.neutral}};
}
inline void from_json(const json& j, TextEmotionAnnotation& a) {
  a.boredom = j.at("boredom").get<int>();
  a.engagement = j.at("engagement").get<int>();
  a.neutral = j.at("neutral").get<int>();
  a.validate();
}

inline void to_json(json& j, const ConversationTurn& t) {
  j = {{"role", t.role}, {"text", t.text}, {"timestamp", t.timestamp}};
  j["emotion"] = t.emotion ? json(*t.emotion) : json(nullptr);
  j["strategy"] = t.strategy ? json(*t.strategy) : json(nullptr);
}
inline void from_json(const json& j, ConversationTurn& t) {
  t.role = j.at("role").get<Role>();
  t.text = j.at("text").get<std::string>();
  t.timestamp = j.value("timestamp", TimestampMs{0});
  t.emotion.reset();
  t.strategy.reset();
  if (j.contains("emotion") && !j["emotion"].is_null()) t.emotion = j["emotion"].get<ScoredPrimitive>();
  if (j.contains("strategy") && !j["strategy"].is_null()) t.strategy = j["strategy"].get<PedagogicalStrategy>();
}

inline void to_json(json& j, const AggregationConfig& c) {
  j = {{"half_life_seconds", c.half_life_seconds}, {"map_before_grouping", c.map_before_grouping}};
}
inline void from_json(const json& j, AggregationConfig& c) {
  c.half_life_seconds = j.value("half_life_seconds", c.half_life_seconds);
  c.map_before_grouping = j.value("map_before_grouping", c.map_before_grouping);
}

}  // namespace emotutor
