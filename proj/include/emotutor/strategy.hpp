#pragma once

#include <fstream>
#include <optional>
#include <sstream>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "emotutor/emotion.hpp"
#include "emotutor/errors.hpp"
#include "emotutor/prompt_templates.hpp"

namespace emotutor {

enum class PedagogicalStrategy { Challenge, Motivate };

constexpr std::string_view to_string(PedagogicalStrategy s) {
  return s == PedagogicalStrategy::Challenge ? "Challenge" : "Motivate";
}

inline PedagogicalStrategy parse_strategy(std::string_view text) {
  if (detail::iequals(text, "Challenge")) return PedagogicalStrategy::Challenge;
  if (detail::iequals(text, "Motivate")) return PedagogicalStrategy::Motivate;
  throw ConfigError("unknown strategy '" + std::string(text) + "'");
}

struct StrategyPolicy {
  /// Strategy used when the fused emotion is Neutral.
  PedagogicalStrategy neutral_action = PedagogicalStrategy::Motivate;
};

constexpr PedagogicalStrategy select_strategy(PrimitiveEmotion emotion, const StrategyPolicy& policy = {}) {
  switch (emotion) {
    case PrimitiveEmotion::Positive: return PedagogicalStrategy::Challenge;
    case PrimitiveEmotion::Negative: return PedagogicalStrategy::Motivate;
    case PrimitiveEmotion::Neutral: break;
  }
  return policy.neutral_action;
}

enum class Role { Student, Tutor };

constexpr std::string_view to_string(Role r) { return r == Role::Student ? "student" : "tutor"; }

inline Role parse_role(std::string_view text) {
  if (detail::iequals(text, "student")) return Role::Student;
  if (detail::iequals(text, "tutor")) return Role::Tutor;
  throw InputError("unknown role '" + std::string(text) + "'");
}

struct ConversationTurn {
  Role role = Role::Student;
  std::string text;
  TimestampMs timestamp = 0;
  std::optional<ScoredPrimitive> emotion;
  std::optional<PedagogicalStrategy> strategy;

  bool operator==(const ConversationTurn&) const = default;
};

enum class TemplateKind { System, Simple, Complex, Judge };

constexpr std::string_view to_string(TemplateKind k) {
  switch (k) {
    case TemplateKind::System: return "system";
    case TemplateKind::Simple: return "simple";
    case TemplateKind::Complex: return "complex";
    case TemplateKind::Judge: return "judge";
  }
  return "?";
}

inline TemplateKind parse_template_kind(std::string_view text) {
  for (auto k : {TemplateKind::System, TemplateKind::Simple, TemplateKind::Complex, TemplateKind::Judge}) {
    if (detail::iequals(text, to_string(k))) return k;
  }
  throw ConfigError("unknown template kind '" + std::string(text) + "'");
}

/// A prompt body with positional `{}` slots.
struct PromptTemplate {
  TemplateKind kind = TemplateKind::System;
  std::string body;

  static PromptTemplate builtin(TemplateKind kind) {
    switch (kind) {
      case TemplateKind::System: return {kind, std::string(templates::kSystem)};
      case TemplateKind::Simple: return {kind, std::string(templates::kSimple)};
      case TemplateKind::Complex: return {kind, std::string(templates::kComplex)};
      case TemplateKind::Judge: return {kind, std::string(templates::kJudge)};
    }
    throw ConfigError("unknown template kind");
  }

  static PromptTemplate load(TemplateKind kind, const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot read template " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return {kind, buf.str()};
  }
};

/// Substitutes `values` into the `{}` slots of `body`, left to right. The
/// substituted text is never rescanned, so values may contain braces.
inline std::string fill_placeholders(std::string_view body, std::span<const std::string> values) {
  std::string out;
  out.reserve(body.size() + 256);
  std::size_t pos = 0;
  std::size_t used = 0;
  for (;;) {
    const auto slot = body.find("{}", pos);
    if (slot == std::string_view::npos) break;
    if (used == values.size()) throw ConfigError("template has more slots than values");
    out.append(body.substr(pos, slot - pos));
    out.append(values[used++]);
    pos = slot + 2;
  }
  if (used != values.size()) throw ConfigError("template has fewer slots than values");
  out.append(body.substr(pos));
  return out;
}

/// One `Student: ...` / `Tutor: ...` line per turn, newline separated.
inline std::string render_conversation(std::span<const ConversationTurn> history) {
  std::string out;
  for (const auto& turn : history) {
    if (!out.empty()) out.push_back('\n');
    out.append(turn.role == Role::Student ? "Student: " : "Tutor: ");
    out.append(turn.text);
  }
  return out;
}

/// Sentence for the simple/complex templates, which speak of boredom and
/// engagement rather than primitives.
constexpr std::string_view emotion_sentence(PrimitiveEmotion p) {
  switch (p) {
    case PrimitiveEmotion::Negative: return "The student's last response indicates boredom.";
    case PrimitiveEmotion::Positive: return "The student's last response indicates engagement.";
    case PrimitiveEmotion::Neutral: break;
  }
  return "The student's last response indicates a neutral state.";
}

inline std::string render_tutor_prompt(const PromptTemplate& tmpl, std::span<const ConversationTurn> history,
                                       const ScoredPrimitive& emotion) {
  if (history.empty()) throw StateError("cannot prompt the tutor with an empty conversation");
  if (history.back().role != Role::Student) {
    throw StateError("conversation must end with a student turn");
  }
  std::string sentiment;
  switch (tmpl.kind) {
    case TemplateKind::System: sentiment = to_string(emotion.primitive); break;
    case TemplateKind::Simple:
    case TemplateKind::Complex: sentiment = emotion_sentence(emotion.primitive); break;
    default: throw ConfigError("template kind '" + std::string(to_string(tmpl.kind)) + "' is not a tutor prompt");
  }
  const std::vector<std::string> values{render_conversation(history), std::move(sentiment)};
  return fill_placeholders(tmpl.body, values);
}

inline std::string render_judge_prompt(std::string_view solution, std::span<const ConversationTurn> history,
                                       std::string_view response,
                                       const PromptTemplate& tmpl = PromptTemplate::builtin(TemplateKind::Judge)) {
  if (solution.empty()) throw InputError("judge prompt needs a solution");
  if (history.empty()) throw InputError("judge prompt needs a conversation history");
  if (response.empty()) throw InputError("judge prompt needs a tutor response");
  const std::vector<std::string> values{std::string(solution), render_conversation(history),
                                        std::string(response)};
  return fill_placeholders(tmpl.body, values);
}

}  // namespace emotutor
