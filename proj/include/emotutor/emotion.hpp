#pragma once

// Emotion label space, primitive projection, time-decayed aggregation of a
// face-emotion trace, and the two-modality fusion rule. Everything here is a
// pure function over values.

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <map>
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "emotutor/errors.hpp"

namespace emotutor {

using TimestampMs = std::int64_t;

enum class EmotionLabel {
  Happy,
  Engaged,
  Positive,
  Neutral,
  Surprised,
  Sad,
  Angry,
  Fearful,
  Disgusted,
  Bored,
  Confused,
  Contempt,
  Frustrated,
  Negative,
};

inline constexpr std::array<EmotionLabel, 14> kAllEmotionLabels = {
    EmotionLabel::Happy,    EmotionLabel::Engaged,   EmotionLabel::Positive,
    EmotionLabel::Neutral,  EmotionLabel::Surprised, EmotionLabel::Sad,
    EmotionLabel::Angry,    EmotionLabel::Fearful,   EmotionLabel::Disgusted,
    EmotionLabel::Bored,    EmotionLabel::Confused,  EmotionLabel::Contempt,
    EmotionLabel::Frustrated, EmotionLabel::Negative,
};

enum class PrimitiveEmotion { Positive, Neutral, Negative };

inline constexpr std::array<PrimitiveEmotion, 3> kAllPrimitives = {
    PrimitiveEmotion::Positive, PrimitiveEmotion::Neutral, PrimitiveEmotion::Negative};

constexpr std::string_view to_string(EmotionLabel label) {
  switch (label) {
    case EmotionLabel::Happy: return "Happy";
    case EmotionLabel::Engaged: return "Engaged";
    case EmotionLabel::Positive: return "Positive";
    case EmotionLabel::Neutral: return "Neutral";
    case EmotionLabel::Surprised: return "Surprised";
    case EmotionLabel::Sad: return "Sad";
    case EmotionLabel::Angry: return "Angry";
    case EmotionLabel::Fearful: return "Fearful";
    case EmotionLabel::Disgusted: return "Disgusted";
    case EmotionLabel::Bored: return "Bored";
    case EmotionLabel::Confused: return "Confused";
    case EmotionLabel::Contempt: return "Contempt";
    case EmotionLabel::Frustrated: return "Frustrated";
    case EmotionLabel::Negative: return "Negative";
  }
  return "?";
}

constexpr std::string_view to_string(PrimitiveEmotion p) {
  switch (p) {
    case PrimitiveEmotion::Positive: return "Positive";
    case PrimitiveEmotion::Neutral: return "Neutral";
    case PrimitiveEmotion::Negative: return "Negative";
  }
  return "?";
}

namespace detail {
inline bool iequals(std::string_view a, std::string_view b) {
  return a.size() == b.size() &&
         std::equal(a.begin(), a.end(), b.begin(), [](char x, char y) {
           return std::tolower(static_cast<unsigned char>(x)) ==
                  std::tolower(static_cast<unsigned char>(y));
         });
}
}  // namespace detail

/// Case-insensitive parse over the closed label set (face recognizers emit
/// lowercase names). Anything else is an InputError.
inline EmotionLabel parse_emotion_label(std::string_view text) {
  for (auto label : kAllEmotionLabels) {
    if (detail::iequals(text, to_string(label))) return label;
  }
  throw InputError("unknown emotion label '" + std::string(text) + "'");
}

inline PrimitiveEmotion parse_primitive(std::string_view text) {
  for (auto p : kAllPrimitives) {
    if (detail::iequals(text, to_string(p))) return p;
  }
  throw InputError("unknown primitive emotion '" + std::string(text) + "'");
}

constexpr EmotionLabel as_label(PrimitiveEmotion p) {
  switch (p) {
    case PrimitiveEmotion::Positive: return EmotionLabel::Positive;
    case PrimitiveEmotion::Neutral: return EmotionLabel::Neutral;
    case PrimitiveEmotion::Negative: return EmotionLabel::Negative;
  }
  return EmotionLabel::Neutral;
}

/// Projects any label onto {Positive, Neutral, Negative}.
constexpr PrimitiveEmotion map_to_primitive(EmotionLabel label) {
  switch (label) {
    case EmotionLabel::Engaged:
    case EmotionLabel::Happy:
    case EmotionLabel::Positive:
      return PrimitiveEmotion::Positive;
    case EmotionLabel::Neutral:
    case EmotionLabel::Surprised:
      return PrimitiveEmotion::Neutral;
    default:
      return PrimitiveEmotion::Negative;
  }
}

struct EmotionSample {
  EmotionLabel label = EmotionLabel::Neutral;
  double confidence = 0.0;
  TimestampMs timestamp = 0;

  bool operator==(const EmotionSample&) const = default;

  void validate() const {
    if (!(confidence >= 0.0 && confidence <= 1.0)) {
      throw InputError("sample confidence must lie in [0,1], got " + std::to_string(confidence));
    }
    if (timestamp < 0) {
      throw InputError("sample timestamp must be non-negative");
    }
  }
};

struct EmotionGroup {
  EmotionLabel label = EmotionLabel::Neutral;
  TimestampMs start = 0;
  TimestampMs end = 0;

  bool operator==(const EmotionGroup&) const = default;
};

struct AggregationConfig {
  double half_life_seconds = 120.0;
  bool map_before_grouping = true;

  void validate() const {
    if (!(half_life_seconds > 0.0) || !std::isfinite(half_life_seconds)) {
      throw ConfigError("half_life_seconds must be positive");
    }
  }
};

struct ScoredPrimitive {
  PrimitiveEmotion primitive = PrimitiveEmotion::Neutral;
  double confidence = 0.0;

  bool operator==(const ScoredPrimitive&) const = default;

  void validate() const {
    if (!(confidence >= 0.0 && confidence <= 1.0)) {
      throw InputError("confidence must lie in [0,1]");
    }
  }
};

/// Copy of `samples` ordered by timestamp; equal timestamps keep input order.
inline std::vector<EmotionSample> sorted_by_time(std::span<const EmotionSample> samples) {
  std::vector<EmotionSample> sorted(samples.begin(), samples.end());
  std::stable_sort(sorted.begin(), sorted.end(),
                   [](const EmotionSample& a, const EmotionSample& b) {
                     return a.timestamp < b.timestamp;
                   });
  return sorted;
}

/// Collapses maximal runs of equal labels into [start, end] groups.
inline std::vector<EmotionGroup> group_consecutive(std::span<const EmotionSample> samples) {
  if (samples.empty()) throw EmptyTrace("cannot group an empty emotion trace");
  const auto sorted = sorted_by_time(samples);

  std::vector<EmotionGroup> groups;
  EmotionGroup current{sorted.front().label, sorted.front().timestamp, sorted.front().timestamp};
  for (std::size_t i = 1; i < sorted.size(); ++i) {
    if (sorted[i].label != current.label) {
      current.end = sorted[i - 1].timestamp;
      groups.push_back(current);
      current = {sorted[i].label, sorted[i].timestamp, sorted[i].timestamp};
    }
  }
  current.end = sorted.back().timestamp;
  groups.push_back(current);
  return groups;
}

/// exp(-ln2 / half_life * age): 1 at age 0, 0.5 after one half-life.
inline double decay_weight(double age_seconds, double half_life_seconds) {
  if (!(age_seconds >= 0.0)) throw DomainError("age must be non-negative");
  if (!(half_life_seconds > 0.0)) throw DomainError("half-life must be positive");
  const double rate = std::numbers::ln2 / half_life_seconds;
  return std::exp(-rate * age_seconds);
}

/// Collapses a face-emotion trace into one scored primitive.
///
/// Samples are (optionally) projected to primitives, sorted, and grouped into
/// runs. Each run contributes its duration weighted by the decay of its age
/// (now - run end). The label with the largest weighted sum wins; ties go to
/// the label whose latest run ends last. When every run is a single instant
/// each run counts as 1 ms so sparse traces still produce a winner.
/// Confidence is the winner's share of the total score.
///
/// An empty trace yields (Neutral, 0). `now` before any sample is ClockSkew.
inline ScoredPrimitive aggregate_temporal(std::span<const EmotionSample> samples, TimestampMs now,
                                          const AggregationConfig& config = {}) {
  config.validate();
  if (samples.empty()) return {PrimitiveEmotion::Neutral, 0.0};

  std::vector<EmotionSample> trace(samples.begin(), samples.end());
  for (auto& s : trace) {
    if (s.timestamp > now) {
      throw ClockSkew("sample at " + std::to_string(s.timestamp) + " ms is later than now (" +
                      std::to_string(now) + " ms)");
    }
    if (config.map_before_grouping) s.label = as_label(map_to_primitive(s.label));
  }

  const auto groups = group_consecutive(trace);
  const bool all_instant = std::all_of(groups.begin(), groups.end(),
                                       [](const EmotionGroup& g) { return g.start == g.end; });

  struct Tally {
    double score = 0.0;
    TimestampMs latest_end = 0;
  };
  std::map<EmotionLabel, Tally> tallies;
  double total = 0.0;
  for (const auto& g : groups) {
    const double duration_s = all_instant ? 0.001 : static_cast<double>(g.end - g.start) / 1000.0;
    const double age_s = static_cast<double>(now - g.end) / 1000.0;
    const double contribution = duration_s * decay_weight(age_s, config.half_life_seconds);
    auto& tally = tallies[g.label];
    tally.score += contribution;
    tally.latest_end = std::max(tally.latest_end, g.end);
    total += contribution;
  }

  auto best = tallies.begin();
  for (auto it = std::next(tallies.begin()); it != tallies.end(); ++it) {
    const auto& [score, end] = it->second;
    if (score > best->second.score ||
        (score == best->second.score && end > best->second.latest_end)) {
      best = it;
    }
  }

  const double confidence = total > 0.0 ? best->second.score / total : 0.0;
  return {map_to_primitive(best->first), std::clamp(confidence, 0.0, 1.0)};
}

/// Merges the face and text primitives. A non-neutral reading always beats a
/// neutral one; two conflicting non-neutral readings are settled by
/// confidence, and an exact confidence tie goes to the text modality.
constexpr ScoredPrimitive fuse(const ScoredPrimitive& face, const ScoredPrimitive& text) {
  const bool face_neutral = face.primitive == PrimitiveEmotion::Neutral;
  const bool text_neutral = text.primitive == PrimitiveEmotion::Neutral;
  if (face_neutral && text_neutral) {
    return {PrimitiveEmotion::Neutral, std::max(face.confidence, text.confidence)};
  }
  if (face_neutral) return text;
  if (text_neutral) return face;
  if (face.primitive == text.primitive) {
    return {face.primitive, std::max(face.confidence, text.confidence)};
  }
  return face.confidence > text.confidence ? face : text;
}

}  // namespace emotutor
