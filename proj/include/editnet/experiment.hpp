// Copyright 2026 The EditNet Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <chrono>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "editnet/editor.hpp"
#include "editnet/encoder.hpp"
#include "editnet/oracle.hpp"
#include "editnet/parallel.hpp"
#include "editnet/summarizers.hpp"
#include "editnet/text.hpp"
#include "editnet/trainer.hpp"

namespace editnet {

// Everything a run needs. Serialized next to every command's outputs.
struct ExperimentConfig {
  std::string train_path;
  std::string val_path;
  std::string test_path;
  std::string extractor = "lead";  // "lead" or "oracle"
  std::size_t k = 5;
  double ratio = 0.9;
  EncoderConfig encoder;
  std::size_t m = 64;
  RewardWeights weights;
  std::size_t cap = kDefaultCap;
  std::size_t batch_size = 32;
  std::size_t epochs = 20;
  double lr = 1e-4;
  std::string out_dir = "run";
  std::uint64_t seed = 1;

  void validate() const {
    if (extractor != "lead" && extractor != "oracle") {
      throw std::invalid_argument("extractor must be \"lead\" or \"oracle\", got \"" + extractor + "\"");
    }
    if (k < 1) throw std::invalid_argument("k must be >= 1");
    if (!(ratio > 0.0 && ratio <= 1.0)) throw std::invalid_argument("ratio must lie in (0,1]");
    if (m < 1) throw std::invalid_argument("m must be >= 1");
    if (cap < 1) throw std::invalid_argument("cap must be >= 1");
    encoder.validate();
    weights.validate();
    train_config().validate();
    for (const auto* a : {&train_path, &val_path, &test_path}) {
      for (const auto* b : {&train_path, &val_path, &test_path}) {
        if (a != b && !a->empty() && *a == *b) throw std::invalid_argument("dataset split paths must be distinct");
      }
    }
  }

  OracleConfig oracle_config() const { return {weights, cap}; }

  TrainConfig train_config() const {
    TrainConfig c;
    c.batch_size = batch_size;
    c.epochs = epochs;
    c.seed = seed;
    c.lr = lr;
    c.workers = worker_count();
    return c;
  }

  Extractor make_extractor() const {
    return extractor == "oracle" ? greedy_oracle_extractor(k, weights) : lead_extractor(k);
  }
  Abstractor make_abstractor() const { return salience_abstractor(ratio); }

  std::string split_path(const std::string& split) const {
    if (split == "train") return train_path;
    if (split == "val") return val_path;
    if (split == "test") return test_path;
    throw std::invalid_argument("unknown split \"" + split + "\"");
  }

  std::filesystem::path out() const { return out_dir; }
  std::filesystem::path cache_path(const std::string& split) const { return out() / ("labels_" + split + ".jsonl"); }
  std::filesystem::path checkpoint_path() const { return out() / "checkpoint.json"; }
  std::filesystem::path log_path() const { return out() / "train_log.jsonl"; }
};

inline nlohmann::json to_json(const ExperimentConfig& c) {
  return {{"train", c.train_path},
          {"val", c.val_path},
          {"test", c.test_path},
          {"extractor", c.extractor},
          {"k", c.k},
          {"ratio", c.ratio},
          {"encoder", encoder_to_json(c.encoder)},
          {"m", c.m},
          {"reward_weights", {c.weights.alpha, c.weights.beta, c.weights.gamma}},
          {"cap", c.cap},
          {"batch_size", c.batch_size},
          {"epochs", c.epochs},
          {"lr", c.lr},
          {"out", c.out_dir},
          {"seed", c.seed}};
}

// Missing keys keep their defaults.
inline ExperimentConfig config_from_json(const nlohmann::json& j) {
  ExperimentConfig c;
  c.train_path = j.value("train", c.train_path);
  c.val_path = j.value("val", c.val_path);
  c.test_path = j.value("test", c.test_path);
  c.extractor = j.value("extractor", c.extractor);
  c.k = j.value("k", c.k);
  c.ratio = j.value("ratio", c.ratio);
  if (j.contains("encoder")) {
    const auto& e = j.at("encoder");
    c.encoder.n = e.value("n", c.encoder.n);
    c.encoder.hash_seed = e.value("hash_seed", c.encoder.hash_seed);
    c.encoder.context_window = e.value("context_window", c.encoder.context_window);
  }
  c.m = j.value("m", c.m);
  if (j.contains("reward_weights")) {
    const auto& w = j.at("reward_weights");
    c.weights = {w.at(0).get<double>(), w.at(1).get<double>(), w.at(2).get<double>()};
  }
  c.cap = j.value("cap", c.cap);
  c.batch_size = j.value("batch_size", c.batch_size);
  c.epochs = j.value("epochs", c.epochs);
  c.lr = j.value("lr", c.lr);
  c.out_dir = j.value("out", c.out_dir);
  c.seed = j.value("seed", c.seed);
  return c;
}

inline ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config " + path);
  return config_from_json(nlohmann::json::parse(in));
}

inline void write_json_file(const std::filesystem::path& path, const nlohmann::json& j) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << j.dump(2) << '\n';
}

inline void write_resolved_config(const ExperimentConfig& config) {
  std::filesystem::create_directories(config.out());
  write_json_file(config.out() / "config.json", to_json(config));
}

// ---- ingest ---------------------------------------------------------------

struct IngestReport {
  std::size_t accepted = 0;
  std::vector<RejectedRecord> rejected;
};

inline nlohmann::json to_json(const IngestReport& r) {
  nlohmann::json rejects = nlohmann::json::array();
  for (const auto& rej : r.rejected) rejects.push_back({{"line", rej.line}, {"reason", rej.reason}});
  return {{"accepted", r.accepted}, {"rejected", r.rejected.size()}, {"rejects", rejects}};
}

inline IngestReport cmd_ingest(const std::string& input, const std::string& output) {
  std::ifstream in(input);
  if (!in) throw std::runtime_error("cannot read " + input);
  auto scan = scan_dataset(in);
  write_dataset(output, scan.examples);
  return {scan.examples.size(), std::move(scan.rejected)};
}

// ---- label ----------------------------------------------------------------

struct SplitLabelReport {
  std::string split;
  std::size_t examples = 0;
  std::size_t labeled = 0;
  std::vector<LabelFailure> failures;
  double seconds = 0.0;
};

inline std::vector<SplitLabelReport> cmd_label(const ExperimentConfig& config, const std::vector<std::string>& splits) {
  config.validate();
  write_resolved_config(config);
  const auto extractor = config.make_extractor();
  const auto abstractor = config.make_abstractor();
  std::vector<SplitLabelReport> reports;
  std::size_t total_examples = 0, total_labeled = 0;
  for (const auto& split : splits) {
    const auto path = config.split_path(split);
    if (path.empty()) throw std::invalid_argument("no dataset path configured for split " + split);
    const auto start = std::chrono::steady_clock::now();
    const auto examples = load_dataset(path);
    auto result = label_dataset(examples, extractor, abstractor, config.oracle_config(), worker_count());
    std::ofstream out(config.cache_path(split));
    if (!out) throw std::runtime_error("cannot write " + config.cache_path(split).string());
    write_label_cache(out, config.oracle_config(), result.labeled);
    SplitLabelReport report;
    report.split = split;
    report.examples = examples.size();
    report.labeled = result.labeled.size();
    report.failures = std::move(result.failures);
    report.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    total_examples += report.examples;
    total_labeled += report.labeled;
    reports.push_back(std::move(report));
  }
  if (total_examples > 0 && total_labeled == 0) throw std::runtime_error("labeling failed for every example");
  return reports;
}

// ---- train ----------------------------------------------------------------

inline std::vector<TrainingItem> load_split_items(const ExperimentConfig& config, const std::string& split) {
  const auto cache_path = config.cache_path(split);
  std::ifstream in(cache_path);
  if (!in) {
    throw std::runtime_error("label cache " + cache_path.string() + " not found; run `editnet label --split " +
                             split + "` first");
  }
  const auto cache = read_label_cache(in);
  return join_items(load_dataset(config.split_path(split)), cache.labeled, config.encoder);
}

inline TrainResult cmd_train(const ExperimentConfig& config) {
  config.validate();
  const auto train_items = load_split_items(config, "train");
  std::vector<TrainingItem> val_items;
  if (!config.val_path.empty()) val_items = load_split_items(config, "val");
  write_resolved_config(config);

  const auto initial = EditorParams::initialize(config.m, config.encoder.n, hashing::splitmix64(config.seed));
  auto result = train(train_items, val_items, config.train_config(), initial, config.weights);
  save_checkpoint(config.checkpoint_path().string(), {result.best_params, config.encoder});
  std::ofstream log(config.log_path());
  if (!log) throw std::runtime_error("cannot write " + config.log_path().string());
  for (const auto& entry : result.log) log << to_json(entry).dump() << '\n';
  return result;
}

// ---- summarize ------------------------------------------------------------

// One sentence per line; blank lines are skipped.
inline Document read_document(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read document " + path);
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    if (line.find_first_not_of(" \t\r") != std::string::npos) lines.push_back(line);
  }
  return make_document(std::filesystem::path(path).filename().string(), lines);
}

// Each step as "<E|A|R>: sentence" (rejected sentences struck through as
// ~~text~~), then the mixed summary.
inline std::string format_summary(const MixedSummary& summary, const Document& document) {
  std::ostringstream out;
  for (const auto& step : summary.steps) {
    out << to_char(step.decision) << ": ";
    if (step.emitted) {
      out << join(*step.emitted);
    } else {
      out << "~~" << join(document.tokens(step.sentence)) << "~~";
    }
    out << '\n';
  }
  out << "\nSummary:\n";
  for (const auto& sentence : summary.text) out << join(sentence) << '\n';
  return out.str();
}

inline std::string cmd_summarize(const std::string& checkpoint_path, const std::string& document_path,
                                 const ExperimentConfig& config) {
  const auto checkpoint = load_checkpoint(checkpoint_path);
  Example example{read_document(document_path), {}};
  const auto extract = extract_lead(example.document, config.k);
  const auto summary = edit(example, extract, config.make_abstractor(), checkpoint.encoder, checkpoint.params);
  return format_summary(summary, example.document);
}

// ---- evaluate -------------------------------------------------------------

inline EvalReport cmd_evaluate(const std::string& checkpoint_path, const ExperimentConfig& config) {
  config.validate();
  if (config.test_path.empty()) throw std::invalid_argument("no test dataset configured");
  const auto checkpoint = load_checkpoint(checkpoint_path);
  const auto examples = load_dataset(config.test_path);
  auto report = evaluate(examples, checkpoint, config.make_extractor(), config.make_abstractor(), config.weights);
  write_resolved_config(config);
  write_json_file(config.out() / "eval_report.json", to_json(report));
  return report;
}

}  // namespace editnet
