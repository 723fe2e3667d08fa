// Acceptance runner: one PASS/FAIL line per primary criterion. Exit status
// is non-zero if any criterion fails.

#include <chrono>
#include <cmath>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "emotutor/emotutor.hpp"
#include "fixtures.hpp"
#include "oracles.hpp"
#include "test_support.hpp"

namespace {

using namespace emotutor;
using namespace emotutor::eval;
using P = PrimitiveEmotion;
using E = EmotionLabel;

/// Collects the first few failure notes for a criterion.
struct Check {
  std::vector<std::string> notes;
  int failures = 0;

  void expect(bool ok, const std::string& what) {
    if (ok) return;
    ++failures;
    if (notes.size() < 3) notes.push_back(what);
  }
  bool ok() const { return failures == 0; }
};

template <typename... Args>
std::string str(const Args&... args) {
  std::ostringstream out;
  out.precision(17);
  (out << ... << args);
  return out.str();
}

bool aggregation_oracle(Check& c) {
  const auto started = std::chrono::steady_clock::now();
  std::mt19937_64 rng(20240);
  for (int trial = 0; trial < 1000; ++trial) {
    std::vector<E> labels(kAllEmotionLabels.begin(), kAllEmotionLabels.end());
    std::shuffle(labels.begin(), labels.end(), rng);
    labels.resize(1 + rng() % 4);
    const int n = 1 + static_cast<int>(rng() % 50);
    std::vector<EmotionSample> trace;
    for (int i = 0; i < n; ++i) {
      trace.push_back({labels[rng() % labels.size()], static_cast<double>(rng() % 101) / 100.0,
                       static_cast<TimestampMs>(rng() % 300'000)});
    }
    const TimestampMs now = 300'000 + static_cast<TimestampMs>(rng() % 120'000);
    const auto got = aggregate_temporal(trace, now);
    const auto want = oracle::aggregate(trace, now);
    c.expect(got.primitive == want.primitive, str("trial ", trial, ": primitive differs"));
    c.expect(std::abs(got.confidence - want.confidence) <= 1e-9,
             str("trial ", trial, ": confidence ", got.confidence, " vs ", want.confidence));
  }
  const auto elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  c.expect(elapsed < 5.0, str("took ", elapsed, " s"));
  return c.ok();
}

bool decay(Check& c) {
  for (double h : {1.0, 30.0, 120.0, 3600.0}) {
    c.expect(std::abs(decay_weight(h, h) - 0.5) <= 1e-12, str("half-life ", h));
  }
  double prev = decay_weight(0.0, 120.0);
  for (int i = 1; i <= 1000; ++i) {
    const double w = decay_weight(i * 0.6, 120.0);
    c.expect(w < prev, str("not strictly decreasing at age ", i * 0.6));
    prev = w;
  }
  return c.ok();
}

bool mapping(Check& c) {
  const std::vector<std::pair<E, P>> table = {
      {E::Happy, P::Positive},     {E::Engaged, P::Positive},   {E::Positive, P::Positive},
      {E::Neutral, P::Neutral},    {E::Surprised, P::Neutral},  {E::Sad, P::Negative},
      {E::Angry, P::Negative},     {E::Fearful, P::Negative},   {E::Disgusted, P::Negative},
      {E::Bored, P::Negative},     {E::Confused, P::Negative},  {E::Contempt, P::Negative},
      {E::Frustrated, P::Negative}, {E::Negative, P::Negative},
  };
  c.expect(table.size() == kAllEmotionLabels.size(), "table does not cover every label");
  for (const auto& [label, primitive] : table) {
    c.expect(map_to_primitive(label) == primitive, str("label ", to_string(label)));
  }
  for (auto p : kAllPrimitives) {
    c.expect(map_to_primitive(as_label(p)) == p, str("primitive ", to_string(p), " not a fixed point"));
  }
  return c.ok();
}

bool fusion(Check& c) {
  for (const auto& cell : fixtures::fusion_table()) {
    const ScoredPrimitive face{cell.face, fixtures::face_confidence(cell.rel)};
    const ScoredPrimitive text{cell.text, fixtures::kTextConfidence};
    const auto out = fuse(face, text);
    c.expect(out == ScoredPrimitive{cell.out, cell.out_confidence},
             str(to_string(cell.face), "/", to_string(cell.text), " rel ", static_cast<int>(cell.rel)));
    c.expect((out.primitive == P::Neutral) == (cell.face == P::Neutral && cell.text == P::Neutral),
             "neutral iff both neutral");
  }
  return c.ok();
}

bool overall_rows(Check& c) {
  for (const auto& row : fixtures::results_rows()) {
    DimensionScores scores{};
    std::copy(row.damr.begin(), row.damr.end(), scores.begin());
    const double overall = overall_score(scores);
    c.expect(std::abs(overall - row.printed_overall) <= 0.005 + 1e-12,
             str(row.model, ": ", overall, " vs printed ", row.printed_overall));
  }
  return c.ok();
}

bool damr_fixture(Check& c) {
  const auto scores = damr(fixtures::damr_verdicts());
  for (std::size_t i = 0; i < kDimensionCount; ++i) {
    c.expect(scores[i] == fixtures::kDamrHandCounts[i] / 10.0, str(display_name(kAllDimensions[i])));
  }
  return c.ok();
}

bool judge_parsing(Check& c) {
  try {
    const auto plain = parse_judge_output(test::read_file(test::data_path("judge/skeleton_all_yes.txt")));
    const auto fenced = parse_judge_output(test::read_file(test::data_path("judge/skeleton_fenced.txt")));
    c.expect(plain.labels == fenced.labels, "fenced variant differs");
    c.expect(plain[Dimension::TutorTone] == JudgeLabel::Encouraging, "tone label");
  } catch (const std::exception& e) {
    c.expect(false, str("skeleton did not parse: ", e.what()));
  }
  bool raised = false;
  try {
    parse_judge_output(test::read_file(test::data_path("judge/skeleton_missing_coherence.txt")));
  } catch (const VerdictParseError&) {
    raised = true;
  }
  c.expect(raised, "missing key did not raise VerdictParseError");
  return c.ok();
}

bool majority(Check& c) {
  for (const auto& vc : fixtures::vote_cases()) {
    std::vector<JudgeVerdict> inputs;
    for (const char* code : vc.inputs) inputs.push_back(fixtures::verdict(code));
    c.expect(majority_vote(inputs).labels == fixtures::verdict(vc.expected).labels, vc.name);
  }
  return c.ok();
}

bool correlations(Check& c) {
  const std::vector<double> x{1, 2, 3, 4, 5, 6, 7};
  std::vector<double> up, down;
  for (double v : x) {
    up.push_back(std::exp(v));
    down.push_back(-3 * v + 2);
  }
  c.expect(std::abs(spearman(x, up) - 1.0) <= 1e-12, "spearman monotone");
  c.expect(std::abs(spearman(x, down) + 1.0) <= 1e-12, "spearman inverse");
  c.expect(std::abs(pearson(x, down) + 1.0) <= 1e-12, "pearson inverse");
  c.expect(std::abs(pearson(x, x) - 1.0) <= 1e-12, "pearson identity");

  std::mt19937_64 rng(99);
  std::normal_distribution<double> gauss(0.0, 2.0);
  std::uniform_int_distribution<int> coarse(0, 3);
  for (int trial = 0; trial < 1000; ++trial) {
    const int n = 3 + static_cast<int>(rng() % 40);
    std::vector<double> a(n), b(n);
    for (int i = 0; i < n; ++i) {
      a[i] = trial % 2 ? gauss(rng) : coarse(rng);
      b[i] = trial % 2 ? a[i] + gauss(rng) : coarse(rng);
    }
    try {
      c.expect(std::abs(pearson(a, b) - oracle::pearson(a, b)) <= 1e-9, str("pearson trial ", trial));
      c.expect(std::abs(spearman(a, b) - oracle::spearman(a, b)) <= 1e-9, str("spearman trial ", trial));
    } catch (const MetricUndefined&) {
      // Constant column; the oracle is undefined too.
      const bool constant = std::all_of(a.begin(), a.end(), [&](double v) { return v == a[0]; }) ||
                            std::all_of(b.begin(), b.end(), [&](double v) { return v == b[0]; });
      c.expect(constant, str("unexpected MetricUndefined at trial ", trial));
    }
  }
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<double> a(30), b(30), fa(30);
    const double k = 0.2 + static_cast<double>(rng() % 100) / 20.0;
    for (int i = 0; i < 30; ++i) {
      a[i] = gauss(rng);
      b[i] = a[i] * 0.5 + gauss(rng);
      fa[i] = std::exp(k * a[i]) + a[i];
    }
    c.expect(std::abs(spearman(fa, b) - spearman(a, b)) <= 1e-12, str("transform trial ", trial));
  }
  return c.ok();
}

ConversationTurn turn(Role role, std::string text) { return {role, std::move(text), 0, std::nullopt, std::nullopt}; }

bool prompt_goldens(Check& c) {
  const std::vector<ConversationTurn> sys{turn(Role::Tutor, "Let's start. What is 3 times 4?"),
                                          turn(Role::Student, "It is 7, right? I'm stuck.")};
  c.expect(render_tutor_prompt(PromptTemplate::builtin(TemplateKind::System), sys, {P::Negative, 1.0}) ==
               test::read_file(test::golden_path("system_negative.txt")),
           "system");
  const std::vector<ConversationTurn> simple{turn(Role::Student, "I love fractions, is 1/2 + 1/4 equal to 3/4?")};
  c.expect(render_tutor_prompt(PromptTemplate::builtin(TemplateKind::Simple), simple, {P::Positive, 1.0}) ==
               test::read_file(test::golden_path("simple_positive.txt")),
           "simple");
  const std::vector<ConversationTurn> complex{
      turn(Role::Student, "The train leaves at 3 pm and travels for 2 hours."),
      turn(Role::Tutor, "Good. When does it arrive?"), turn(Role::Student, "At 5 pm.")};
  c.expect(render_tutor_prompt(PromptTemplate::builtin(TemplateKind::Complex), complex, {P::Neutral, 0.0}) ==
               test::read_file(test::golden_path("complex_neutral.txt")),
           "complex");
  const std::vector<ConversationTurn> judged{turn(Role::Tutor, "How many apples are in 4 boxes?"),
                                             turn(Role::Student, "4 + 6 = 10 apples.")};
  c.expect(render_judge_prompt("Each box holds 6 apples, so 4 boxes hold 4 x 6 = 24 apples.", judged,
                               "Close! Does adding the numbers match what happens when we have 4 boxes of 6 each?") ==
               test::read_file(test::golden_path("judge_fixture.txt")),
           "judge");
  return c.ok();
}

bool end_to_end(Check& c) {
  std::string last_prompt;
  auto backend = std::make_shared<FunctionTutor>([&](const std::string& prompt) {
    last_prompt = prompt;
    return std::string("What would you try next?");
  });
  TutorService service(std::make_shared<LexiconClassifier>(Lexicon::load(test::data_path("lexicon.tsv"))), backend);

  const auto on = service.create_session(SessionMode::EmotionOn, {}, 0);
  const auto neg = service.handle_message(on, "I hate this, I'm stuck", 10'000);
  c.expect(neg.strategy == PedagogicalStrategy::Motivate, "negative message did not yield Motivate");
  c.expect(last_prompt.find("Negative):\nNegative\n") != std::string::npos, "prompt lacks Negative sentiment");
  c.expect(neg.latency.count() < 100, str("latency ", neg.latency.count(), " ms"));
  const auto pos = service.handle_message(on, "I love this, that was fun", 20'000);
  c.expect(pos.strategy == PedagogicalStrategy::Challenge, "positive message did not yield Challenge");
  c.expect(pos.latency.count() < 100, str("latency ", pos.latency.count(), " ms"));

  std::mt19937 rng(1);
  for (int trial = 0; trial < 10; ++trial) {
    const auto plain = service.create_session(SessionMode::EmotionOff, {}, 0);
    const auto faced = service.create_session(SessionMode::EmotionOff, {}, 0);
    std::vector<EmotionSample> trace;
    for (int k = 0; k < 20; ++k) {
      trace.push_back({kAllEmotionLabels[rng() % kAllEmotionLabels.size()], 0.9, static_cast<TimestampMs>(k * 400)});
    }
    service.ingest_emotion_samples(faced, trace);
    for (const char* text : {"I love this", "so boring", "is it 12?"}) {
      service.handle_message(plain, text, 9'000);
      const auto a = last_prompt;
      service.handle_message(faced, text, 9'000);
      c.expect(a == last_prompt, str("emotion_off prompt changed with face samples, trial ", trial));
    }
  }
  return c.ok();
}

bool offline_benchmark(Check& c) {
  const auto bench = [](const std::string& f) { return test::data_path("bench/" + f); };
  BenchmarkOptions opt;
  for (const char* j : {"j1", "j2", "j3"}) {
    opt.judges.push_back(std::make_shared<ScriptedJudge>(j, bench(std::string("judge_") + j + ".jsonl")));
  }
  opt.preference = std::make_shared<ScriptedPreferenceJudge>(bench("preferences.jsonl"));
  opt.parallelism = 4;
  const auto report = run_benchmark(load_dataset(bench("dataset.jsonl")), opt);
  // Hand-computed: majority vote per record, then matches / 5.
  const std::array<double, 8> want = {3 / 5.0, 4 / 5.0, 4 / 5.0, 4 / 5.0, 4 / 5.0, 4 / 5.0, 3 / 5.0, 4 / 5.0};
  c.expect(report.damr.has_value() && *report.damr == want, "DAMR differs");
  c.expect(report.overall == 0.75, str("overall ", report.overall.value_or(-1)));
  c.expect(report.win_rate == 0.6, str("win rate ", report.win_rate.value_or(-1)));
  c.expect(report.n_records == 5 && report.n_skipped == 0, "record counts");
  return c.ok();
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<bool(Check&)>>> criteria = {
      {"aggregation matches high-precision oracle on 1000 random traces", aggregation_oracle},
      {"decay weight halves at the half-life and strictly decreases", decay},
      {"label-to-primitive mapping table and fixed points", mapping},
      {"fusion decision table (27 cells)", fusion},
      {"overall score reproduces published rows within 0.005", overall_rows},
      {"DAMR on 10 ensemble verdicts equals hand counts", damr_fixture},
      {"judge output parsing: skeleton, fenced, missing key", judge_parsing},
      {"majority vote fixtures", majority},
      {"correlations: extremes, oracle agreement, transform invariance", correlations},
      {"prompt goldens for system/simple/complex/judge", prompt_goldens},
      {"end-to-end message pipeline with scripted tutor", end_to_end},
      {"offline benchmark reproduces hand-computed report", offline_benchmark},
  };
  int failed = 0;
  for (const auto& [name, run] : criteria) {
    Check check;
    bool ok = false;
    try {
      ok = run(check);
    } catch (const std::exception& e) {
      check.notes.push_back(str("exception: ", e.what()));
    }
    std::cout << (ok ? "PASS  " : "FAIL  ") << name << "\n";
    for (const auto& note : check.notes) std::cout << "        " << note << "\n";
    failed += !ok;
  }
  std::cout << (criteria.size() - failed) << "/" << criteria.size() << " criteria passed\n";
  return failed == 0 ? 0 : 1;
}
