#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <numeric>
#include <optional>
#include <ranges>
#include <span>
#include <vector>

#include "emotutor/emotion.hpp"
#include "emotutor/errors.hpp"
#include "emotutor/eval/verdict.hpp"

namespace emotutor::eval {

using DimensionScores = std::array<double, kDimensionCount>;

/// Desired Annotation Match Rate: per dimension, the share of verdicts whose
/// label equals the desired one exactly.
inline DimensionScores damr(std::span<const JudgeVerdict> verdicts, const DesiderataTable& desiderata = {}) {
  if (verdicts.empty()) throw InputError("DAMR needs at least one verdict");
  DimensionScores scores{};
  for (auto dim : kAllDimensions) {
    const auto hits = std::count_if(verdicts.begin(), verdicts.end(),
                                    [&](const JudgeVerdict& v) { return v[dim] == desiderata[dim]; });
    scores[index_of(dim)] = static_cast<double>(hits) / static_cast<double>(verdicts.size());
  }
  return scores;
}

/// Mean of the eight DAMR values, summed in extended precision.
inline double overall_score(const DimensionScores& scores) {
  const long double sum = std::accumulate(scores.begin(), scores.end(), 0.0L);
  return static_cast<double>(sum / static_cast<long double>(kDimensionCount));
}

inline double overall_score(const std::map<Dimension, double>& scores) {
  DimensionScores dense{};
  for (auto dim : kAllDimensions) {
    const auto it = scores.find(dim);
    if (it == scores.end()) throw InputError("missing DAMR score for " + std::string(display_name(dim)));
    dense[index_of(dim)] = it->second;
  }
  return overall_score(dense);
}

/// Share of records where the preference judge picked the candidate.
template <std::ranges::forward_range Range>
  requires std::convertible_to<std::ranges::range_value_t<Range>, bool>
double win_rate(const Range& preferences) {
  std::size_t total = 0, wins = 0;
  for (bool preferred : preferences) {
    ++total;
    wins += preferred;
  }
  if (total == 0) throw InputError("win rate needs at least one preference");
  return static_cast<double>(wins) / static_cast<double>(total);
}

/// Ordinal encoding used for correlating categorical labels.
constexpr double label_to_rank(JudgeLabel label) {
  switch (label) {
    case JudgeLabel::Yes:
    case JudgeLabel::Encouraging:
      return 1.0;
    case JudgeLabel::ToSomeExtent:
    case JudgeLabel::NeutralTone:
      return 0.5;
    case JudgeLabel::No:
    case JudgeLabel::Offensive:
      return 0.0;
  }
  return 0.0;
}

namespace detail {
inline void check_pair(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw MetricUndefined("correlation inputs differ in length");
  if (x.size() < 2) throw MetricUndefined("correlation needs at least two points");
}
}  // namespace detail

/// Product-moment correlation, accumulated in one pass with running means.
inline double pearson(std::span<const double> x, std::span<const double> y) {
  detail::check_pair(x, y);
  double mean_x = 0.0, mean_y = 0.0, sxx = 0.0, syy = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double n = static_cast<double>(i + 1);
    const double dx = x[i] - mean_x;
    const double dy = y[i] - mean_y;
    mean_x += dx / n;
    mean_y += dy / n;
    sxx += dx * (x[i] - mean_x);
    syy += dy * (y[i] - mean_y);
    sxy += dx * (y[i] - mean_y);
  }
  if (!(sxx > 0.0) || !(syy > 0.0)) throw MetricUndefined("correlation undefined for zero variance");
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

/// 1-based ranks; tied values share the mean of the ranks they span.
inline std::vector<double> fractional_ranks(std::span<const double> values) {
  std::vector<std::size_t> order(values.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
  std::vector<double> ranks(values.size());
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    while (j + 1 < order.size() && values[order[j + 1]] == values[order[i]]) ++j;
    const double shared = (static_cast<double>(i + 1) + static_cast<double>(j + 1)) / 2.0;
    for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = shared;
    i = j + 1;
  }
  return ranks;
}

inline double spearman(std::span<const double> x, std::span<const double> y) {
  detail::check_pair(x, y);
  const auto rx = fractional_ranks(x);
  const auto ry = fractional_ranks(y);
  return pearson(rx, ry);
}

struct ClassMetrics {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  std::size_t support = 0;  // gold count
  bool absent = false;      // class appears in neither list
};

struct ClassificationReport {
  std::array<ClassMetrics, 3> per_class{};  // indexed like kAllPrimitives
  double accuracy = 0.0;

  const ClassMetrics& operator[](PrimitiveEmotion p) const { return per_class[static_cast<std::size_t>(p)]; }
};

/// One-vs-rest precision/recall/F1 over the three primitives. Undefined
/// ratios (zero denominators) report 0.
inline ClassificationReport classification_report(std::span<const PrimitiveEmotion> predicted,
                                                   std::span<const PrimitiveEmotion> gold) {
  if (predicted.size() != gold.size()) throw InputError("predicted and gold lists differ in length");
  if (predicted.empty()) throw InputError("classification report needs at least one item");
  ClassificationReport report;
  std::size_t correct = 0;
  for (std::size_t i = 0; i < gold.size(); ++i) correct += predicted[i] == gold[i];
  report.accuracy = static_cast<double>(correct) / static_cast<double>(gold.size());

  for (auto cls : kAllPrimitives) {
    std::size_t tp = 0, fp = 0, fn = 0;
    for (std::size_t i = 0; i < gold.size(); ++i) {
      const bool p = predicted[i] == cls;
      const bool g = gold[i] == cls;
      tp += p && g;
      fp += p && !g;
      fn += !p && g;
    }
    auto& m = report.per_class[static_cast<std::size_t>(cls)];
    m.support = tp + fn;
    m.absent = tp + fp + fn == 0;
    m.precision = tp + fp > 0 ? static_cast<double>(tp) / static_cast<double>(tp + fp) : 0.0;
    m.recall = tp + fn > 0 ? static_cast<double>(tp) / static_cast<double>(tp + fn) : 0.0;
    m.f1 = m.precision + m.recall > 0 ? 2.0 * m.precision * m.recall / (m.precision + m.recall) : 0.0;
  }
  return report;
}

/// Agreement of one judge with reference (human) labels on one dimension.
/// Correlations are nullopt where undefined (e.g. a constant label column).
struct Reliability {
  std::optional<double> spearman;
  std::optional<double> pearson;
  double accuracy = 0.0;
};

inline std::array<Reliability, kDimensionCount> judge_reliability(std::span<const JudgeVerdict> judged,
                                                                   std::span<const JudgeVerdict> reference) {
  if (judged.size() != reference.size()) throw InputError("judge and reference lists differ in length");
  if (judged.empty()) throw InputError("reliability needs at least one item");
  std::array<Reliability, kDimensionCount> out{};
  for (auto dim : kAllDimensions) {
    std::vector<double> x, y;
    std::size_t agree = 0;
    for (std::size_t i = 0; i < judged.size(); ++i) {
      x.push_back(label_to_rank(judged[i][dim]));
      y.push_back(label_to_rank(reference[i][dim]));
      agree += judged[i][dim] == reference[i][dim];
    }
    auto& r = out[index_of(dim)];
    r.accuracy = static_cast<double>(agree) / static_cast<double>(judged.size());
    try {
      r.spearman = spearman(x, y);
      r.pearson = pearson(x, y);
    } catch (const MetricUndefined&) {
    }
  }
  return out;
}

}  // namespace emotutor::eval
