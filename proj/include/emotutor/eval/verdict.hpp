#pragma once

// Pedagogical judge verdicts: the eight dimensions, their label domains,
// parsing raw judge output, and majority voting across judges.

#include <algorithm>
#include <array>
#include <cctype>
#include <map>
#include <optional>
#include <regex>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "emotutor/errors.hpp"

namespace emotutor::eval {

enum class Dimension {
  MistakeIdentification,
  MistakeLocation,
  RevealingAnswer,
  ProvidingGuidance,
  Actionability,
  Coherence,
  TutorTone,
  Humanlikeness,
};

inline constexpr std::size_t kDimensionCount = 8;

inline constexpr std::array<Dimension, kDimensionCount> kAllDimensions = {
    Dimension::MistakeIdentification, Dimension::MistakeLocation, Dimension::RevealingAnswer,
    Dimension::ProvidingGuidance,     Dimension::Actionability,   Dimension::Coherence,
    Dimension::TutorTone,             Dimension::Humanlikeness,
};

constexpr std::size_t index_of(Dimension d) { return static_cast<std::size_t>(d); }

/// Key used in the judge prompt's JSON skeleton.
constexpr std::string_view display_name(Dimension d) {
  switch (d) {
    case Dimension::MistakeIdentification: return "Mistake identification";
    case Dimension::MistakeLocation: return "Mistake location";
    case Dimension::RevealingAnswer: return "Revealing of the answer";
    case Dimension::ProvidingGuidance: return "Providing guidance";
    case Dimension::Actionability: return "Actionability";
    case Dimension::Coherence: return "Coherence";
    case Dimension::TutorTone: return "Tutor tone";
    case Dimension::Humanlikeness: return "Human-likeness";
  }
  return "?";
}

enum class JudgeLabel { Yes, No, ToSomeExtent, Encouraging, NeutralTone, Offensive };

constexpr std::string_view to_string(JudgeLabel l) {
  switch (l) {
    case JudgeLabel::Yes: return "Yes";
    case JudgeLabel::No: return "No";
    case JudgeLabel::ToSomeExtent: return "To some extent";
    case JudgeLabel::Encouraging: return "encouraging";
    case JudgeLabel::NeutralTone: return "neutral";
    case JudgeLabel::Offensive: return "offensive";
  }
  return "?";
}

constexpr bool is_tone_label(JudgeLabel l) {
  return l == JudgeLabel::Encouraging || l == JudgeLabel::NeutralTone || l == JudgeLabel::Offensive;
}

constexpr bool label_allowed(Dimension d, JudgeLabel l) {
  return (d == Dimension::TutorTone) == is_tone_label(l);
}

namespace detail {
/// Lowercase alphanumerics only: "Human-likeness " -> "humanlikeness".
inline std::string squash(std::string_view text) {
  std::string out;
  for (char c : text) {
    const auto uc = static_cast<unsigned char>(c);
    if (std::isalnum(uc)) out.push_back(static_cast<char>(std::tolower(uc)));
  }
  return out;
}
}  // namespace detail

/// Tolerant of case, spacing, hyphens and underscores.
inline std::optional<Dimension> match_dimension(std::string_view key) {
  static const std::map<std::string, Dimension> kKeys = {
      {"mistakeidentification", Dimension::MistakeIdentification},
      {"mistakelocation", Dimension::MistakeLocation},
      {"revealingoftheanswer", Dimension::RevealingAnswer},
      {"revealingtheanswer", Dimension::RevealingAnswer},
      {"revealinganswer", Dimension::RevealingAnswer},
      {"answerdisclosure", Dimension::RevealingAnswer},
      {"providingguidance", Dimension::ProvidingGuidance},
      {"actionability", Dimension::Actionability},
      {"coherence", Dimension::Coherence},
      {"tutortone", Dimension::TutorTone},
      {"humanlikeness", Dimension::Humanlikeness},
  };
  const auto it = kKeys.find(detail::squash(key));
  if (it == kKeys.end()) return std::nullopt;
  return it->second;
}

/// Parses a label within the domain of `dim`; nullopt when out of domain.
inline std::optional<JudgeLabel> parse_label(Dimension dim, std::string_view text) {
  const auto s = detail::squash(text);
  if (dim == Dimension::TutorTone) {
    if (s == "encouraging") return JudgeLabel::Encouraging;
    if (s == "neutral") return JudgeLabel::NeutralTone;
    if (s == "offensive") return JudgeLabel::Offensive;
    return std::nullopt;
  }
  if (s == "yes") return JudgeLabel::Yes;
  if (s == "no") return JudgeLabel::No;
  if (s == "tosomeextent") return JudgeLabel::ToSomeExtent;
  return std::nullopt;
}

struct JudgeVerdict {
  std::array<JudgeLabel, kDimensionCount> labels{};
  std::string reasoning;
  std::string judge_name;

  JudgeLabel operator[](Dimension d) const { return labels[index_of(d)]; }
  JudgeLabel& operator[](Dimension d) { return labels[index_of(d)]; }

  bool operator==(const JudgeVerdict&) const = default;
};

/// Desired label per dimension.
struct DesiderataTable {
  std::array<JudgeLabel, kDimensionCount> desired{
      JudgeLabel::Yes,  // mistake identification
      JudgeLabel::Yes,  // mistake location
      JudgeLabel::No,   // revealing the answer
      JudgeLabel::Yes,  // providing guidance
      JudgeLabel::Yes,  // actionability
      JudgeLabel::Yes,  // coherence
      JudgeLabel::Encouraging,
      JudgeLabel::Yes,  // human-likeness
  };

  JudgeLabel operator[](Dimension d) const { return desired[index_of(d)]; }

  /// Overrides from a {"<dimension>": "<label>"} object; other keys keep defaults.
  static DesiderataTable from_json(const nlohmann::json& j) {
    if (!j.is_object()) throw ConfigError("desiderata must be a JSON object");
    DesiderataTable table;
    for (const auto& [key, value] : j.items()) {
      const auto dim = match_dimension(key);
      if (!dim) throw ConfigError("unknown desiderata dimension '" + key + "'");
      if (!value.is_string()) throw ConfigError("desired label for '" + key + "' must be a string");
      const auto label = parse_label(*dim, value.get<std::string>());
      if (!label) throw ConfigError("label '" + value.get<std::string>() + "' not allowed for '" + key + "'");
      table.desired[index_of(*dim)] = *label;
    }
    return table;
  }
};

namespace detail {
inline std::string_view trim_ws(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

/// Removes a surrounding ``` fence (with optional language tag).
inline std::string_view strip_fence(std::string_view text) {
  text = trim_ws(text);
  if (text.substr(0, 3) != "```") return text;
  const auto first_newline = text.find('\n');
  if (first_newline == std::string_view::npos) return {};
  text.remove_prefix(first_newline + 1);
  text = trim_ws(text);
  if (text.size() >= 3 && text.substr(text.size() - 3) == "```") text.remove_suffix(3);
  return trim_ws(text);
}

/// "key": "value" pairs in order of appearance. Handles bodies that are
/// not strict JSON, such as the judge prompt's own brace-less skeleton.
inline std::vector<std::pair<std::string, std::string>> loose_pairs(std::string_view text) {
  static const std::regex kPair(R"re("((?:[^"\\]|\\.)*)"\s*:\s*"((?:[^"\\]|\\.)*)")re");
  std::vector<std::pair<std::string, std::string>> pairs;
  const std::string body(text);
  for (auto it = std::sregex_iterator(body.begin(), body.end(), kPair); it != std::sregex_iterator(); ++it) {
    pairs.emplace_back((*it)[1].str(), (*it)[2].str());
  }
  return pairs;
}
}  // namespace detail

/// Turns a judge's raw reply into a complete verdict.
///
/// Strips a code fence, then reads the JSON object. When the body is not
/// valid JSON the quoted key/value pairs are read directly. Every dimension
/// must be present with an in-domain label; "Reasoning" is optional.
inline JudgeVerdict parse_judge_output(std::string_view raw, std::string judge_name = {}) {
  if (detail::trim_ws(raw).empty()) throw VerdictParseError("empty judge output", "");
  const auto body = detail::strip_fence(raw);

  std::vector<std::pair<std::string, std::string>> pairs;
  bool parsed = false;
  const auto open = body.find('{');
  const auto close = body.rfind('}');
  if (open != std::string_view::npos && close != std::string_view::npos && close > open) {
    const auto object = body.substr(open, close - open + 1);
    try {
      const auto doc = nlohmann::json::parse(object);
      if (doc.is_object()) {
        for (const auto& [key, value] : doc.items()) {
          if (value.is_string()) {
            pairs.emplace_back(key, value.get<std::string>());
          } else if (match_dimension(key)) {
            throw VerdictParseError("non-string label for '" + key + "'", value.dump());
          }
        }
        parsed = true;
      }
    } catch (const nlohmann::json::exception&) {
    }
  }
  if (!parsed) pairs = detail::loose_pairs(body);
  if (pairs.empty()) throw VerdictParseError("unparseable judge output", std::string(body.substr(0, 200)));

  JudgeVerdict verdict;
  verdict.judge_name = std::move(judge_name);
  std::array<bool, kDimensionCount> seen{};
  for (const auto& [key, value] : pairs) {
    if (detail::squash(key) == "reasoning") {
      verdict.reasoning = value;
      continue;
    }
    const auto dim = match_dimension(key);
    if (!dim) continue;
    const auto label = parse_label(*dim, value);
    if (!label) throw VerdictParseError("label out of domain for '" + key + "'", value);
    verdict[*dim] = *label;
    seen[index_of(*dim)] = true;
  }
  for (auto dim : kAllDimensions) {
    if (!seen[index_of(dim)]) throw VerdictParseError("missing dimension", std::string(display_name(dim)));
  }
  return verdict;
}

inline nlohmann::json verdict_to_json(const JudgeVerdict& v) {
  nlohmann::json labels = nlohmann::json::object();
  for (auto dim : kAllDimensions) labels[std::string(display_name(dim))] = std::string(to_string(v[dim]));
  return {{"judge", v.judge_name}, {"labels", labels}, {"reasoning", v.reasoning}};
}

/// Tie precedence, most preferred first: a split vote never flatters the tutor.
constexpr std::array<JudgeLabel, 3> tie_precedence(Dimension d) {
  if (d == Dimension::TutorTone) return {JudgeLabel::NeutralTone, JudgeLabel::Encouraging, JudgeLabel::Offensive};
  return {JudgeLabel::No, JudgeLabel::ToSomeExtent, JudgeLabel::Yes};
}

/// Per-dimension plurality vote across judges.
inline JudgeVerdict majority_vote(std::span<const JudgeVerdict> verdicts) {
  if (verdicts.empty()) throw InputError("majority vote needs at least one verdict");
  JudgeVerdict ensemble;
  ensemble.judge_name = "ensemble";
  for (auto dim : kAllDimensions) {
    const auto order = tie_precedence(dim);
    std::array<int, 3> votes{};
    for (const auto& v : verdicts) {
      const auto pos = std::find(order.begin(), order.end(), v[dim]);
      if (pos == order.end()) throw InputError("verdict label outside its dimension's domain");
      ++votes[pos - order.begin()];
    }
    // max_element returns the first maximum, i.e. the most preferred on ties.
    ensemble[dim] = order[std::max_element(votes.begin(), votes.end()) - votes.begin()];
  }
  for (const auto& v : verdicts) {
    if (!ensemble.reasoning.empty()) ensemble.reasoning += ", ";
    ensemble.reasoning += v.judge_name;
  }
  return ensemble;
}

}  // namespace emotutor::eval
