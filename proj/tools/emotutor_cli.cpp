// emotutor: run the tutoring service, inspect emotion traces, and score
// tutor responses offline or against live judges.

#include <atomic>
#include <chrono>
#include <csignal>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "emotutor/emotutor.hpp"

namespace {

using emotutor::json;

std::atomic<bool> g_stop_requested{false};

void on_signal(int) { g_stop_requested = true; }

int run_serve(int port, const std::string& host, const std::string& config_path) {
  using namespace emotutor;
  const auto config = ServiceConfig::load(config_path);
  auto classifier = make_classifier(config.classifier);
  std::shared_ptr<TutorBackend> backend = make_tutor_backend(config.tutor);
  TutorService service(classifier, backend, config.session);
  if (!config.templates_dir.empty()) {
    for (auto kind : {TemplateKind::System, TemplateKind::Simple, TemplateKind::Complex}) {
      const auto path = std::filesystem::path(config.templates_dir) / (std::string(to_string(kind)) + ".txt");
      service.set_template(PromptTemplate::load(kind, path.string()));
    }
  }
  if (!config.snapshot_path.empty() && std::filesystem::exists(config.snapshot_path)) {
    service.store().load(config.snapshot_path);
    std::cerr << "restored " << service.store().size() << " sessions from " << config.snapshot_path << "\n";
  }

  ApiServer server(service, config.face_recognizer);
  if (!config.static_dir.empty() && !server.mount_static(config.static_dir)) {
    throw ConfigError("static_dir does not exist: " + config.static_dir);
  }

  std::signal(SIGINT, on_signal);
  std::signal(SIGTERM, on_signal);
  std::jthread watcher([&server](std::stop_token token) {
    while (!token.stop_requested() && !g_stop_requested) {
      std::this_thread::sleep_for(std::chrono::milliseconds(100));
    }
    server.stop();
  });

  std::cerr << "listening on " << host << ":" << port << "\n";
  const bool ok = server.listen(host, port);
  watcher.request_stop();
  if (!config.snapshot_path.empty()) {
    service.store().save(config.snapshot_path);
    std::cerr << "saved " << service.store().size() << " sessions to " << config.snapshot_path << "\n";
  }
  if (!ok && !g_stop_requested) {
    std::cerr << "could not listen on " << host << ":" << port << "\n";
    return 1;
  }
  return 0;
}

int run_aggregate(const std::string& trace_path, emotutor::TimestampMs now, double half_life, bool raw_labels) {
  using namespace emotutor;
  std::ifstream in(trace_path);
  if (!in) throw LoadError("cannot read trace " + trace_path);
  std::vector<EmotionSample> samples;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      samples.push_back(json::parse(line).get<EmotionSample>());
    } catch (const json::exception& e) {
      throw InputError(trace_path + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
  AggregationConfig config;
  config.half_life_seconds = half_life;
  config.map_before_grouping = !raw_labels;
  std::cout << json(aggregate_temporal(samples, now, config)).dump() << "\n";
  return 0;
}

struct NamedUrl {
  std::string name;
  std::string url;
};

NamedUrl split_named(const std::string& arg) {
  const auto eq = arg.find('=');
  if (eq == std::string::npos || eq == 0) throw emotutor::ConfigError("expected NAME=URL, got '" + arg + "'");
  return {arg.substr(0, eq), arg.substr(eq + 1)};
}

constexpr std::string_view kScripted = "scripted:";

bool is_scripted(const std::string& url) { return url.rfind(kScripted, 0) == 0; }

std::string scripted_path(const std::string& url) { return url.substr(kScripted.size()); }

struct EvalArgs {
  std::string dataset;
  std::string mode = "both";
  std::vector<std::string> judges;
  std::string tutor;
  std::string preference;
  std::string desiderata;
  std::string out;
  std::size_t parallelism = 4;
  std::string lexicon;
  std::string template_kind = "system";
  std::string model;
  std::string auth_env;
  int timeout_ms = 60000;
};

int run_eval(const EvalArgs& args) {
  using namespace emotutor;
  using namespace emotutor::eval;

  // Dataset problems surface before any judge or tutor is contacted.
  const auto records = load_dataset(args.dataset);

  BenchmarkOptions options;
  options.mode = parse_benchmark_mode(args.mode);
  options.parallelism = args.parallelism;

  auto remote_binding = [&](const std::string& url) {
    TutorBackendBinding binding;
    binding.endpoint = url;
    binding.model_name = args.model;
    binding.auth_env = args.auth_env;
    binding.timeout = std::chrono::milliseconds(args.timeout_ms);
    return binding;
  };

  for (const auto& named : args.judges) {
    const auto [name, url] = split_named(named);
    if (is_scripted(url)) {
      options.judges.push_back(std::make_shared<ScriptedJudge>(name, scripted_path(url)));
    } else {
      options.judges.push_back(std::make_shared<RemoteJudge>(name, remote_binding(url)));
    }
  }
  if (!args.preference.empty()) {
    const auto [name, url] = split_named(args.preference);
    if (is_scripted(url)) {
      options.preference = std::make_shared<ScriptedPreferenceJudge>(scripted_path(url));
    } else {
      options.preference = std::make_shared<RemotePreferenceJudge>(url, std::chrono::milliseconds(args.timeout_ms));
    }
  }
  if (!args.tutor.empty()) {
    const auto [name, url] = split_named(args.tutor);
    CandidateGenerator gen;
    if (is_scripted(url)) {
      gen.backend = ScriptedTutor::from_file(scripted_path(url));
    } else {
      gen.backend = std::make_shared<ChatCompletionsTutor>(remote_binding(url));
    }
    gen.classifier = std::make_shared<LexiconClassifier>(args.lexicon.empty() ? Lexicon{} : Lexicon::load(args.lexicon));
    gen.tmpl = PromptTemplate::builtin(parse_template_kind(args.template_kind));
    options.generator = std::move(gen);
  }
  if (!args.desiderata.empty()) {
    std::ifstream in(args.desiderata);
    if (!in) throw ConfigError("cannot read desiderata " + args.desiderata);
    try {
      options.desiderata = DesiderataTable::from_json(json::parse(in));
    } catch (const json::exception& e) {
      throw ConfigError("desiderata " + args.desiderata + ": " + e.what());
    }
  }

  const auto report = report_to_json(run_benchmark(records, options));
  if (!args.out.empty()) {
    std::ofstream out(args.out);
    if (!out) throw ConfigError("cannot write report " + args.out);
    out << report.dump(2) << "\n";
  }
  auto summary = report;
  summary.erase("records");
  std::cout << summary.dump(2) << "\n";
  return 0;
}

int run_emotion_report(const std::string& path) {
  using namespace emotutor;
  std::ifstream in(path);
  if (!in) throw LoadError("cannot read " + path);
  std::vector<PrimitiveEmotion> predicted, gold;
  std::string line;
  while (std::getline(in, line)) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const auto j = json::parse(line);
    predicted.push_back(j.at("predicted").get<PrimitiveEmotion>());
    gold.push_back(j.at("gold").get<PrimitiveEmotion>());
  }
  const auto report = eval::classification_report(predicted, gold);
  json out = {{"accuracy", report.accuracy}, {"n", gold.size()}};
  for (auto cls : kAllPrimitives) {
    const auto& m = report[cls];
    out["classes"][std::string(to_string(cls))] = {{"precision", m.precision}, {"recall", m.recall},
                                                   {"f1", m.f1},               {"support", m.support},
                                                   {"absent", m.absent}};
  }
  std::cout << out.dump(2) << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Emotion-aware math tutoring service and evaluation tools"};
  app.require_subcommand(1);

  int port = 8080;
  std::string host = "0.0.0.0";
  std::string config_path;
  auto* serve = app.add_subcommand("serve", "Run the HTTP tutoring service");
  serve->add_option("--port", port, "Port to listen on")->check(CLI::Range(1, 65535));
  serve->add_option("--host", host, "Address to bind");
  serve->add_option("--config", config_path, "Service config (JSON)")->required()->check(CLI::ExistingFile);

  std::string trace_path;
  long long now = 0;
  double half_life = 120.0;
  bool raw_labels = false;
  auto* aggregate = app.add_subcommand("aggregate", "Aggregate a face-emotion trace (one JSON sample per line)");
  aggregate->add_option("--trace", trace_path, "Trace file")->required()->check(CLI::ExistingFile);
  aggregate->add_option("--now", now, "Aggregation time in ms since epoch")->required();
  aggregate->add_option("--half-life", half_life, "Half-life in seconds");
  aggregate->add_flag("--raw-labels", raw_labels, "Group raw labels instead of primitives");

  EvalArgs eval_args;
  auto* eval = app.add_subcommand("eval", "Score tutor responses with judge ensembles");
  eval->add_option("--dataset", eval_args.dataset, "Benchmark JSONL")->required();
  eval->add_option("--mode", eval_args.mode, "damr | winrate | both")
      ->check(CLI::IsMember({"damr", "winrate", "both"}));
  eval->add_option("--judges", eval_args.judges, "NAME=URL judges; URL may be scripted:FILE")->delimiter(',');
  eval->add_option("--tutor", eval_args.tutor, "NAME=URL tutor used to generate candidates");
  eval->add_option("--preference", eval_args.preference, "NAME=URL pairwise preference judge for win rate");
  eval->add_option("--desiderata", eval_args.desiderata, "Desired labels (JSON object)");
  eval->add_option("--out", eval_args.out, "Report file (JSON)");
  eval->add_option("--parallelism", eval_args.parallelism, "Concurrent records")->check(CLI::PositiveNumber);
  eval->add_option("--lexicon", eval_args.lexicon, "Lexicon for text emotion during candidate generation");
  eval->add_option("--template", eval_args.template_kind, "Tutor template: system | simple | complex");
  eval->add_option("--model", eval_args.model, "Model name sent to remote judges and tutor");
  eval->add_option("--auth-env", eval_args.auth_env, "Environment variable holding the API key");
  eval->add_option("--timeout-ms", eval_args.timeout_ms, "Per-call timeout for remote endpoints");

  std::string pairs_path;
  auto* report = app.add_subcommand("emotion-report", "Precision/recall/F1 of predicted vs. gold primitives");
  report->add_option("--file", pairs_path, "JSONL of {predicted, gold}")->required()->check(CLI::ExistingFile);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*serve) return run_serve(port, host, config_path);
    if (*aggregate) return run_aggregate(trace_path, now, half_life, raw_labels);
    if (*eval) return run_eval(eval_args);
    if (*report) return run_emotion_report(pairs_path);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
