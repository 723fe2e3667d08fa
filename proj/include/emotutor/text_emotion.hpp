#pragma once

#include <algorithm>
#include <cctype>
#include <chrono>
#include <fstream>
#include <memory>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "emotutor/emotion.hpp"
#include "emotutor/errors.hpp"
#include "emotutor/http_client.hpp"

namespace emotutor {

/// Per-utterance polarity (0 = absent, 2 = strong) for the three text
/// emotion classes.
struct TextEmotionAnnotation {
  int boredom = 0;
  int engagement = 0;
  int neutral = 0;

  bool operator==(const TextEmotionAnnotation&) const = default;

  void validate() const {
    for (int v : {boredom, engagement, neutral}) {
      if (v < 0 || v > 2) throw InputError("annotation polarity must be 0, 1 or 2");
    }
  }
};

/// What the caller uses when the classifier is unreachable.
inline constexpr TextEmotionAnnotation kNeutralAnnotation{0, 0, 2};

/// Reduces an annotation to the fused value space. The strongest class wins;
/// at equal polarity a non-neutral class beats neutral, and an
/// engagement/boredom tie resolves to Negative.
constexpr ScoredPrimitive annotation_to_primitive(const TextEmotionAnnotation& a) {
  const int top = std::max({a.boredom, a.engagement, a.neutral});
  if (top == 0) return {PrimitiveEmotion::Neutral, 0.0};
  const double confidence = top / 2.0;
  if (a.boredom == top) return {map_to_primitive(EmotionLabel::Bored), confidence};
  if (a.engagement == top) return {map_to_primitive(EmotionLabel::Engaged), confidence};
  return {map_to_primitive(EmotionLabel::Neutral), confidence};
}

namespace detail {
inline std::vector<std::string> tokenize(std::string_view text) {
  std::vector<std::string> tokens;
  std::string current;
  for (char c : text) {
    const auto uc = static_cast<unsigned char>(c);
    if (std::isalnum(uc) || c == '\'' || uc >= 0x80) {
      current.push_back(static_cast<char>(std::tolower(uc)));
    } else if (!current.empty()) {
      tokens.push_back(std::move(current));
      current.clear();
    }
  }
  if (!current.empty()) tokens.push_back(std::move(current));
  return tokens;
}

inline std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}
}  // namespace detail

/// Engagement and boredom word lists for the deterministic baseline
/// classifier. Entries match whole words, case-insensitively; an entry of
/// several words matches that exact word sequence.
class Lexicon {
 public:
  enum class Class { Boredom, Engagement };

  Lexicon() = default;

  void add(std::string_view phrase, Class cls) {
    auto tokens = detail::tokenize(phrase);
    if (tokens.empty()) throw ConfigError("empty lexicon entry");
    entries_.push_back({std::move(tokens), cls});
  }

  /// Parses `word<TAB>class` lines. Blank lines and `#` comments are skipped.
  static Lexicon parse(std::istream& in) {
    Lexicon lexicon;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
      ++line_no;
      const auto trimmed = detail::trim(line);
      if (trimmed.empty() || trimmed.front() == '#') continue;
      const auto tab = line.find('\t');
      if (tab == std::string::npos) {
        throw ConfigError("lexicon line " + std::to_string(line_no) + " has no TAB separator");
      }
      const auto word = detail::trim(std::string_view(line).substr(0, tab));
      const auto cls = detail::trim(std::string_view(line).substr(tab + 1));
      if (detail::iequals(cls, "boredom")) {
        lexicon.add(word, Class::Boredom);
      } else if (detail::iequals(cls, "engagement")) {
        lexicon.add(word, Class::Engagement);
      } else {
        throw ConfigError("lexicon line " + std::to_string(line_no) + ": unknown class '" +
                          std::string(cls) + "'");
      }
    }
    return lexicon;
  }

  static Lexicon load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read lexicon file " + path);
    return parse(in);
  }

  /// Number of entry matches of the given class in `utterance`.
  int count(std::string_view utterance, Class cls) const {
    const auto tokens = detail::tokenize(utterance);
    int hits = 0;
    for (const auto& entry : entries_) {
      if (entry.cls != cls || entry.tokens.size() > tokens.size()) continue;
      for (std::size_t i = 0; i + entry.tokens.size() <= tokens.size(); ++i) {
        if (std::equal(entry.tokens.begin(), entry.tokens.end(), tokens.begin() + i)) ++hits;
      }
    }
    return hits;
  }

  std::size_t size() const noexcept { return entries_.size(); }

 private:
  struct Entry {
    std::vector<std::string> tokens;
    Class cls;
  };
  std::vector<Entry> entries_;
};

inline void require_utterance(std::string_view utterance) {
  if (detail::trim(utterance).empty()) throw InputError("utterance is empty");
}

inline TextEmotionAnnotation classify_with_lexicon(std::string_view utterance, const Lexicon& lexicon) {
  require_utterance(utterance);
  TextEmotionAnnotation a;
  a.boredom = std::min(2, lexicon.count(utterance, Lexicon::Class::Boredom));
  a.engagement = std::min(2, lexicon.count(utterance, Lexicon::Class::Engagement));
  a.neutral = (a.boredom == 0 && a.engagement == 0) ? 2 : 0;
  return a;
}

/// Wire contract: POST {"text": ...} -> {"boredom": n, "engagement": n, "neutral": n}.
inline TextEmotionAnnotation classify_remote(std::string_view utterance, const std::string& endpoint,
                                             std::chrono::milliseconds timeout) {
  require_utterance(utterance);
  const nlohmann::json request = {{"text", std::string(utterance)}};
  const auto response = http::post(endpoint, request.dump(), "application/json", timeout);
  if (!response) throw ClassifierUnavailable("text classifier unreachable at " + endpoint);
  if (response->status != 200) {
    throw ClassifierUnavailable("text classifier returned HTTP " + std::to_string(response->status));
  }
  try {
    const auto body = nlohmann::json::parse(response->body);
    TextEmotionAnnotation a{body.at("boredom").get<int>(), body.at("engagement").get<int>(),
                            body.at("neutral").get<int>()};
    a.validate();
    return a;
  } catch (const nlohmann::json::exception& e) {
    throw ClassifierUnavailable(std::string("malformed classifier response: ") + e.what());
  } catch (const InputError& e) {
    throw ClassifierUnavailable(std::string("malformed classifier response: ") + e.what());
  }
}

enum class ClassifierKind { Remote, Lexicon };

struct TextClassifierBinding {
  ClassifierKind kind = ClassifierKind::Lexicon;
  std::string endpoint;
  std::chrono::milliseconds timeout{2000};
  std::string lexicon_path;

  void validate() const {
    if (kind == ClassifierKind::Remote) {
      if (endpoint.empty()) throw ConfigError("remote classifier requires an endpoint");
      http::split_url(endpoint);
    } else if (lexicon_path.empty()) {
      throw ConfigError("lexicon classifier requires lexicon_path");
    } else if (!std::ifstream(lexicon_path)) {
      throw ConfigError("cannot read lexicon file " + lexicon_path);
    }
  }
};

/// Classifier instance built once from a binding and shared read-only.
class TextClassifier {
 public:
  virtual ~TextClassifier() = default;
  virtual TextEmotionAnnotation annotate(std::string_view utterance) const = 0;
};

class LexiconClassifier final : public TextClassifier {
 public:
  explicit LexiconClassifier(Lexicon lexicon) : lexicon_(std::move(lexicon)) {}
  TextEmotionAnnotation annotate(std::string_view utterance) const override {
    return classify_with_lexicon(utterance, lexicon_);
  }

 private:
  Lexicon lexicon_;
};

class RemoteClassifier final : public TextClassifier {
 public:
  RemoteClassifier(std::string endpoint, std::chrono::milliseconds timeout)
      : endpoint_(std::move(endpoint)), timeout_(timeout) {}
  TextEmotionAnnotation annotate(std::string_view utterance) const override {
    return classify_remote(utterance, endpoint_, timeout_);
  }

 private:
  std::string endpoint_;
  std::chrono::milliseconds timeout_;
};

inline std::shared_ptr<const TextClassifier> make_classifier(const TextClassifierBinding& binding) {
  binding.validate();
  if (binding.kind == ClassifierKind::Remote) {
    return std::make_shared<RemoteClassifier>(binding.endpoint, binding.timeout);
  }
  return std::make_shared<LexiconClassifier>(Lexicon::load(binding.lexicon_path));
}

inline TextEmotionAnnotation classify_text(std::string_view utterance, const TextClassifierBinding& binding) {
  require_utterance(utterance);
  return make_classifier(binding)->annotate(utterance);
}

}  // namespace emotutor
