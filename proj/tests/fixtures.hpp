#pragma once

// Hand-written fixtures shared by the unit tests and the acceptance runner.

#include <array>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "emotutor/emotion.hpp"
#include "emotutor/eval/verdict.hpp"

namespace fixtures {

using emotutor::PrimitiveEmotion;
using emotutor::eval::JudgeLabel;
using emotutor::eval::JudgeVerdict;

// --- fusion ----------------------------------------------------------------
// Text confidence is 0.6; face confidence is 0.4 / 0.6 / 0.8 for
// lower / equal / higher.

enum class Rel { Lower, Equal, Higher };

constexpr double face_confidence(Rel r) { return r == Rel::Lower ? 0.4 : r == Rel::Equal ? 0.6 : 0.8; }
constexpr double kTextConfidence = 0.6;

struct FusionCell {
  PrimitiveEmotion face;
  PrimitiveEmotion text;
  Rel rel;
  PrimitiveEmotion out;
  double out_confidence;
};

inline const std::array<FusionCell, 27>& fusion_table() {
  using P = PrimitiveEmotion;
  static const std::array<FusionCell, 27> table{{
      {P::Positive, P::Positive, Rel::Lower, P::Positive, 0.6},
      {P::Positive, P::Positive, Rel::Equal, P::Positive, 0.6},
      {P::Positive, P::Positive, Rel::Higher, P::Positive, 0.8},
      {P::Positive, P::Neutral, Rel::Lower, P::Positive, 0.4},
      {P::Positive, P::Neutral, Rel::Equal, P::Positive, 0.6},
      {P::Positive, P::Neutral, Rel::Higher, P::Positive, 0.8},
      {P::Positive, P::Negative, Rel::Lower, P::Negative, 0.6},
      {P::Positive, P::Negative, Rel::Equal, P::Negative, 0.6},
      {P::Positive, P::Negative, Rel::Higher, P::Positive, 0.8},
      {P::Neutral, P::Positive, Rel::Lower, P::Positive, 0.6},
      {P::Neutral, P::Positive, Rel::Equal, P::Positive, 0.6},
      {P::Neutral, P::Positive, Rel::Higher, P::Positive, 0.6},
      {P::Neutral, P::Neutral, Rel::Lower, P::Neutral, 0.6},
      {P::Neutral, P::Neutral, Rel::Equal, P::Neutral, 0.6},
      {P::Neutral, P::Neutral, Rel::Higher, P::Neutral, 0.8},
      {P::Neutral, P::Negative, Rel::Lower, P::Negative, 0.6},
      {P::Neutral, P::Negative, Rel::Equal, P::Negative, 0.6},
      {P::Neutral, P::Negative, Rel::Higher, P::Negative, 0.6},
      {P::Negative, P::Positive, Rel::Lower, P::Positive, 0.6},
      {P::Negative, P::Positive, Rel::Equal, P::Positive, 0.6},
      {P::Negative, P::Positive, Rel::Higher, P::Negative, 0.8},
      {P::Negative, P::Neutral, Rel::Lower, P::Negative, 0.4},
      {P::Negative, P::Neutral, Rel::Equal, P::Negative, 0.6},
      {P::Negative, P::Neutral, Rel::Higher, P::Negative, 0.8},
      {P::Negative, P::Negative, Rel::Lower, P::Negative, 0.6},
      {P::Negative, P::Negative, Rel::Equal, P::Negative, 0.6},
      {P::Negative, P::Negative, Rel::Higher, P::Negative, 0.8},
  }};
  return table;
}

// --- published results table ------------------------------------------------
// Column order as printed: MI, ML, answer disclosure, guidance,
// actionability, human-likeness, coherence, tone.

struct ResultsRow {
  const char* model;
  std::array<double, 8> damr;
  double printed_overall;
};

inline const std::array<ResultsRow, 6>& results_rows() {
  static const std::array<ResultsRow, 6> rows{{
      {"QSLM", {0.71, 0.92, 0.41, 0.22, 0.88, 0.56, 0.58, 0.86}, 0.64},
      {"QSLM+", {0.71, 0.92, 0.41, 0.22, 0.88, 0.56, 0.58, 0.86}, 0.64},
      {"LlemaMM", {0.22, 0.93, 0.53, 0.35, 0.75, 0.65, 0.70, 0.92}, 0.63},
      {"LlemaMM+", {0.27, 0.96, 0.50, 0.30, 0.90, 0.72, 0.83, 0.97}, 0.68},
      {"LearnLM", {0.96, 1.00, 0.65, 0.32, 0.99, 0.93, 0.91, 1.00}, 0.85},
      {"LearnLM+", {1.00, 1.00, 0.69, 0.37, 0.99, 0.98, 0.98, 1.00}, 0.88},
  }};
  return rows;
}

// --- verdicts ---------------------------------------------------------------
// Compact form: eight characters in dimension order (MI, ML, RA, PG, Act,
// Coh, Tone, Hum). Y/N/T = Yes/No/To some extent; e/n/o = tone labels.

inline JudgeVerdict verdict(std::string_view code, std::string judge = "fixture") {
  if (code.size() != 8) throw std::invalid_argument("verdict code needs 8 characters");
  JudgeVerdict v;
  v.judge_name = std::move(judge);
  for (std::size_t i = 0; i < 8; ++i) {
    switch (code[i]) {
      case 'Y': v.labels[i] = JudgeLabel::Yes; break;
      case 'N': v.labels[i] = JudgeLabel::No; break;
      case 'T': v.labels[i] = JudgeLabel::ToSomeExtent; break;
      case 'e': v.labels[i] = JudgeLabel::Encouraging; break;
      case 'n': v.labels[i] = JudgeLabel::NeutralTone; break;
      case 'o': v.labels[i] = JudgeLabel::Offensive; break;
      default: throw std::invalid_argument("bad verdict code");
    }
  }
  return v;
}

/// Ten ensemble verdicts and, per dimension, how many match the default
/// desiderata (counted by hand).
inline std::vector<JudgeVerdict> damr_verdicts() {
  std::vector<JudgeVerdict> out;
  for (const char* code : {"YYNYYYeY", "YNNYYYeY", "NYYYYYnY", "YYNTYYeN", "TYNYNYeY", "YTNYYNoY", "YYYNYYeY",
                           "NNNYTYnT", "YYNYYYeY", "YYNNYYeN"}) {
    out.push_back(verdict(code, "ensemble"));
  }
  return out;
}
inline constexpr std::array<int, 8> kDamrHandCounts = {7, 7, 8, 7, 8, 9, 7, 7};

struct VoteCase {
  const char* name;
  std::vector<const char*> inputs;
  const char* expected;
};

inline std::vector<VoteCase> vote_cases() {
  return {
      {"unanimous", {"YYNYYYeY", "YYNYYYeY", "YYNYYYeY"}, "YYNYYYeY"},
      {"strict majority", {"YYNYYYeY", "NTYTNTnN", "YYNYYYeY"}, "YYNYYYeY"},
      {"three-way tie", {"YYNYYYeY", "NTYTNTnN", "TNTNTNoT"}, "NNNNNNnN"},
      {"two-judge tie", {"YYNYYYeY", "TTYTTToT"}, "TTNTTTeT"},
  };
}

}  // namespace fixtures
