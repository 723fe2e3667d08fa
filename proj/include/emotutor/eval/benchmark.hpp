#pragma once

// Offline/online benchmark runner: optional candidate generation, judge
// fan-out, ensemble voting, DAMR, win rate and an audit trail per record.

#include <algorithm>
#include <atomic>
#include <fstream>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <unordered_map>
#include <vector>

#include <json.hpp>

#include "emotutor/errors.hpp"
#include "emotutor/eval/metrics.hpp"
#include "emotutor/eval/verdict.hpp"
#include "emotutor/json_io.hpp"
#include "emotutor/strategy.hpp"
#include "emotutor/text_emotion.hpp"
#include "emotutor/tutor_backend.hpp"

namespace emotutor::eval {

struct BenchmarkRecord {
  std::string problem;
  std::string solution;
  std::vector<ConversationTurn> history;
  std::string ground_truth_response;
  std::string candidate_response;  // empty until generated
};

/// One JSON object per line with problem / solution / history
/// ([{role, text}, ...]) / ground_truth_response and an optional
/// candidate_response. Blank lines are ignored.
inline std::vector<BenchmarkRecord> load_dataset(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw LoadError("cannot read dataset " + path);
  std::vector<BenchmarkRecord> records;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (detail::trim_ws(line).empty()) continue;
    const auto where = path + ":" + std::to_string(line_no);
    try {
      const auto j = json::parse(line);
      BenchmarkRecord r;
      r.problem = j.at("problem").get<std::string>();
      r.solution = j.at("solution").get<std::string>();
      r.history = j.at("history").get<std::vector<ConversationTurn>>();
      r.ground_truth_response = j.at("ground_truth_response").get<std::string>();
      r.candidate_response = j.value("candidate_response", "");
      if (r.problem.empty() || r.solution.empty() || r.ground_truth_response.empty() || r.history.empty()) {
        throw LoadError(where + ": problem, solution, history and ground_truth_response must be non-empty");
      }
      records.push_back(std::move(r));
    } catch (const json::exception& e) {
      throw LoadError(where + ": " + e.what());
    } catch (const InputError& e) {
      throw LoadError(where + ": " + e.what());
    }
  }
  if (records.empty()) throw LoadError("dataset " + path + " has no records");
  return records;
}

/// A pedagogical judge. Returns the raw reply for the rendered judge prompt
/// of record `index`, or throws BackendUnavailable.
class Judge {
 public:
  explicit Judge(std::string name) : name_(std::move(name)) {}
  virtual ~Judge() = default;
  const std::string& name() const noexcept { return name_; }
  virtual std::string evaluate(const std::string& prompt, std::size_t index) const = 0;

 private:
  std::string name_;
};

namespace detail {
/// Reads `{"index": i, <field>: ...}` lines into an index -> value map.
inline std::unordered_map<std::size_t, json> load_indexed_jsonl(const std::string& path, const char* field) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read fixture " + path);
  std::unordered_map<std::size_t, json> out;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim_ws(line).empty()) continue;
    try {
      const auto j = json::parse(line);
      out[j.at("index").get<std::size_t>()] = j.at(field);
    } catch (const json::exception& e) {
      throw ConfigError(path + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
  return out;
}
}  // namespace detail

/// Replays raw judge outputs from JSONL lines `{"index": i, "output": "..."}`.
/// A record without a line behaves like a failed judge call.
class ScriptedJudge final : public Judge {
 public:
  ScriptedJudge(std::string name, const std::string& path)
      : Judge(std::move(name)), outputs_(detail::load_indexed_jsonl(path, "output")) {}

  std::string evaluate(const std::string&, std::size_t index) const override {
    const auto it = outputs_.find(index);
    if (it == outputs_.end() || !it->second.is_string()) {
      throw BackendUnavailable("judge " + name() + " has no scripted output for record " + std::to_string(index));
    }
    return it->second.get<std::string>();
  }

 private:
  std::unordered_map<std::size_t, json> outputs_;
};

/// Chat-completions judge.
class RemoteJudge final : public Judge {
 public:
  RemoteJudge(std::string name, TutorBackendBinding binding)
      : Judge(std::move(name)), binding_(std::move(binding)) {
    binding_.validate();
  }

  std::string evaluate(const std::string& prompt, std::size_t) const override {
    ChatCompletionsTutor client(binding_);
    return client.generate(prompt);
  }

 private:
  TutorBackendBinding binding_;
};

/// Pairwise preference source for win rate: does it prefer the candidate
/// over the ground-truth response? Ties must be resolved by the judge.
class PreferenceJudge {
 public:
  virtual ~PreferenceJudge() = default;
  virtual bool prefers_candidate(const BenchmarkRecord& record, std::size_t index) const = 0;
};

/// JSONL lines `{"index": i, "prefers_candidate": true|false}`.
class ScriptedPreferenceJudge final : public PreferenceJudge {
 public:
  explicit ScriptedPreferenceJudge(const std::string& path)
      : prefs_(detail::load_indexed_jsonl(path, "prefers_candidate")) {}

  bool prefers_candidate(const BenchmarkRecord&, std::size_t index) const override {
    const auto it = prefs_.find(index);
    if (it == prefs_.end() || !it->second.is_boolean()) {
      throw BackendUnavailable("no scripted preference for record " + std::to_string(index));
    }
    return it->second.get<bool>();
  }

 private:
  std::unordered_map<std::size_t, json> prefs_;
};

/// Wire contract: POST {problem, solution, history, candidate_response,
/// reference_response} -> {"prefers_candidate": bool}.
class RemotePreferenceJudge final : public PreferenceJudge {
 public:
  RemotePreferenceJudge(std::string endpoint, std::chrono::milliseconds timeout)
      : endpoint_(std::move(endpoint)), timeout_(timeout) {
    http::split_url(endpoint_);
  }

  bool prefers_candidate(const BenchmarkRecord& r, std::size_t) const override {
    const json request = {{"problem", r.problem},
                          {"solution", r.solution},
                          {"history", r.history},
                          {"candidate_response", r.candidate_response},
                          {"reference_response", r.ground_truth_response}};
    const auto response = http::post(endpoint_, request.dump(), "application/json", timeout_);
    if (!response || response->status != 200) throw BackendUnavailable("preference judge unavailable");
    try {
      return json::parse(response->body).at("prefers_candidate").get<bool>();
    } catch (const json::exception& e) {
      throw BackendUnavailable(std::string("malformed preference reply: ") + e.what());
    }
  }

 private:
  std::string endpoint_;
  std::chrono::milliseconds timeout_;
};

enum class BenchmarkMode { Damr, WinRate, Both };

inline BenchmarkMode parse_benchmark_mode(std::string_view text) {
  if (text == "damr") return BenchmarkMode::Damr;
  if (text == "winrate") return BenchmarkMode::WinRate;
  if (text == "both") return BenchmarkMode::Both;
  throw ConfigError("unknown benchmark mode '" + std::string(text) + "'");
}

/// Candidate generation: the tutor sees emotion from the last student
/// utterance's text only.
struct CandidateGenerator {
  std::shared_ptr<TutorBackend> backend;
  std::shared_ptr<const TextClassifier> classifier;
  PromptTemplate tmpl = PromptTemplate::builtin(TemplateKind::System);
};

struct BenchmarkOptions {
  BenchmarkMode mode = BenchmarkMode::Both;
  std::vector<std::shared_ptr<const Judge>> judges;
  std::shared_ptr<const PreferenceJudge> preference;
  std::optional<CandidateGenerator> generator;
  DesiderataTable desiderata;
  std::size_t parallelism = 1;
  double max_skip_fraction = 0.2;
};

struct MetricsReport {
  std::optional<double> win_rate;
  std::optional<DimensionScores> damr;
  std::optional<double> overall;
  std::size_t n_records = 0;
  std::size_t n_skipped = 0;
  std::size_t n_damr = 0;     // records contributing to DAMR
  std::size_t n_winrate = 0;  // records contributing to win rate
  json audit = json::array();
};

inline json report_to_json(const MetricsReport& r) {
  json out;
  out["win_rate"] = r.win_rate ? json(*r.win_rate) : json(nullptr);
  if (r.damr) {
    json scores = json::object();
    for (auto dim : kAllDimensions) scores[std::string(display_name(dim))] = (*r.damr)[index_of(dim)];
    out["damr"] = scores;
  } else {
    out["damr"] = nullptr;
  }
  out["overall"] = r.overall ? json(*r.overall) : json(nullptr);
  out["n_records"] = r.n_records;
  out["n_skipped"] = r.n_skipped;
  out["n_damr"] = r.n_damr;
  out["n_winrate"] = r.n_winrate;
  out["records"] = r.audit;
  return out;
}

namespace detail {
struct RecordOutcome {
  std::optional<JudgeVerdict> ensemble;
  std::optional<bool> preference;
  bool skipped = false;
  json audit;
};

inline std::string generate_candidate(const CandidateGenerator& gen, const BenchmarkRecord& r) {
  if (r.history.empty() || r.history.back().role != Role::Student) {
    throw StateError("history must end with a student turn to generate a candidate");
  }
  TextEmotionAnnotation annotation = kNeutralAnnotation;
  try {
    annotation = gen.classifier->annotate(r.history.back().text);
  } catch (const ClassifierUnavailable&) {
  }
  return gen.backend->generate(render_tutor_prompt(gen.tmpl, r.history, annotation_to_primitive(annotation)));
}

inline RecordOutcome run_record(const BenchmarkOptions& opt, BenchmarkRecord record, std::size_t index) {
  RecordOutcome out;
  out.audit = {{"index", index}};
  auto skip = [&](const std::string& reason) {
    out.skipped = true;
    out.audit["status"] = "skipped";
    out.audit["reason"] = reason;
    return out;
  };

  if (opt.generator) {
    try {
      record.candidate_response = generate_candidate(*opt.generator, record);
    } catch (const Error& e) {
      return skip(std::string("candidate generation failed: ") + e.what());
    }
  }
  out.audit["candidate_response"] = record.candidate_response;

  const bool want_damr = opt.mode != BenchmarkMode::WinRate;
  const bool want_winrate = opt.mode != BenchmarkMode::Damr;

  if (want_damr) {
    const auto prompt = render_judge_prompt(record.solution, record.history, record.candidate_response);
    std::vector<JudgeVerdict> verdicts;
    json judged = json::array();
    for (const auto& judge : opt.judges) {
      try {
        verdicts.push_back(parse_judge_output(judge->evaluate(prompt, index), judge->name()));
        judged.push_back(verdict_to_json(verdicts.back()));
      } catch (const Error& e) {
        out.audit["verdicts"] = judged;
        return skip("judge " + judge->name() + ": " + e.what());
      }
    }
    out.ensemble = majority_vote(verdicts);
    out.audit["verdicts"] = judged;
    out.audit["ensemble"] = verdict_to_json(*out.ensemble)["labels"];
  }
  if (want_winrate) {
    try {
      out.preference = opt.preference->prefers_candidate(record, index);
      out.audit["prefers_candidate"] = *out.preference;
    } catch (const Error& e) {
      out.ensemble.reset();
      return skip(std::string("preference judge: ") + e.what());
    }
  }
  out.audit["status"] = "ok";
  return out;
}
}  // namespace detail

/// Scores `records`. Records whose judge, preference or generation call
/// fails are skipped and excluded from every denominator; more than
/// `max_skip_fraction` skipped fails the run with RunFailed.
inline MetricsReport run_benchmark(const std::vector<BenchmarkRecord>& records, const BenchmarkOptions& opt) {
  if (records.empty()) throw InputError("no benchmark records");
  if (opt.mode != BenchmarkMode::WinRate && opt.judges.empty()) throw ConfigError("DAMR needs at least one judge");
  if (opt.mode != BenchmarkMode::Damr && !opt.preference) throw ConfigError("win rate needs a preference judge");
  if (!opt.generator) {
    for (std::size_t i = 0; i < records.size(); ++i) {
      if (records[i].candidate_response.empty()) {
        throw ConfigError("record " + std::to_string(i) + " has no candidate_response and no tutor is configured");
      }
    }
  } else if (!opt.generator->backend || !opt.generator->classifier) {
    throw ConfigError("candidate generator needs a backend and a classifier");
  }

  std::vector<detail::RecordOutcome> outcomes(records.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < records.size(); i = next++) {
      outcomes[i] = detail::run_record(opt, records[i], i);
    }
  };
  const auto n_threads = std::clamp<std::size_t>(opt.parallelism, 1, records.size());
  std::vector<std::jthread> pool;
  for (std::size_t t = 1; t < n_threads; ++t) pool.emplace_back(worker);
  worker();
  pool.clear();

  MetricsReport report;
  report.n_records = records.size();
  std::vector<JudgeVerdict> ensembles;
  std::vector<bool> prefs;
  for (auto& o : outcomes) {
    report.n_skipped += o.skipped;
    if (o.ensemble) ensembles.push_back(*o.ensemble);
    if (o.preference) prefs.push_back(*o.preference);
    report.audit.push_back(std::move(o.audit));
  }
  if (static_cast<double>(report.n_skipped) > opt.max_skip_fraction * static_cast<double>(records.size())) {
    throw RunFailed(std::to_string(report.n_skipped) + " of " + std::to_string(records.size()) +
                    " records skipped, above the allowed fraction");
  }
  report.n_damr = ensembles.size();
  report.n_winrate = prefs.size();
  if (opt.mode != BenchmarkMode::WinRate && !ensembles.empty()) {
    report.damr = damr(ensembles, opt.desiderata);
    report.overall = overall_score(*report.damr);
  }
  if (opt.mode != BenchmarkMode::Damr && !prefs.empty()) {
    report.win_rate = win_rate(prefs);
  }
  return report;
}

}  // namespace emotutor::eval
