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

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "editnet/experiment.hpp"
#include "editnet/synthetic.hpp"

namespace {

struct Overrides {
  std::optional<std::string> train, val, test, extractor, out;
  std::optional<std::size_t> k, n, m, context_window, cap, batch_size, epochs;
  std::optional<std::uint64_t> seed, hash_seed;
  std::optional<double> ratio, lr;
  std::vector<double> weights;

  void attach(CLI::App& app) {
    app.add_option("--train", train, "Training dataset (JSONL)");
    app.add_option("--val", val, "Validation dataset (JSONL)");
    app.add_option("--test", test, "Test dataset (JSONL)");
    app.add_option("--extractor", extractor, "lead | oracle");
    app.add_option("--k", k, "Sentences to extract");
    app.add_option("--ratio", ratio, "Abstractor attention-mass ratio in (0,1]");
    app.add_option("--n", n, "Sentence representation width");
    app.add_option("--hash-seed", hash_seed, "Encoder feature-hash seed");
    app.add_option("--context-window", context_window, "Encoder neighbour mixing window");
    app.add_option("--m", m, "Editor hidden width");
    app.add_option("--weights", weights, "Reward weights alpha beta gamma")->expected(3);
    app.add_option("--cap", cap, "Maximum extract length for enumeration");
    app.add_option("--batch-size", batch_size, "Mini-batch size");
    app.add_option("--epochs", epochs, "Training epochs");
    app.add_option("--lr", lr, "ADAM learning rate");
  }

  void apply(editnet::ExperimentConfig& c) const {
    if (train) c.train_path = *train;
    if (val) c.val_path = *val;
    if (test) c.test_path = *test;
    if (extractor) c.extractor = *extractor;
    if (out) c.out_dir = *out;
    if (k) c.k = *k;
    if (ratio) c.ratio = *ratio;
    if (n) c.encoder.n = *n;
    if (hash_seed) c.encoder.hash_seed = *hash_seed;
    if (context_window) c.encoder.context_window = *context_window;
    if (m) c.m = *m;
    if (weights.size() == 3) c.weights = {weights[0], weights[1], weights[2]};
    if (cap) c.cap = *cap;
    if (batch_size) c.batch_size = *batch_size;
    if (epochs) c.epochs = *epochs;
    if (lr) c.lr = *lr;
    if (seed) c.seed = *seed;
  }
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"editnet: editorial post-processing for extractive summaries"};
  app.require_subcommand(1);
  app.fallthrough();

  std::string config_path;
  Overrides overrides;
  app.add_option("--config", config_path, "Experiment config (JSON)");
  app.add_option("--seed", overrides.seed, "Seed for every random choice");
  app.add_option("--out", overrides.out, "Output directory");

  auto* ingest = app.add_subcommand("ingest", "Validate a dataset and rewrite it in canonical form");
  std::string ingest_in, ingest_out;
  ingest->add_option("--input", ingest_in, "Dataset to read")->required();
  ingest->add_option("--output", ingest_out, "Canonical dataset to write")->required();

  auto* label = app.add_subcommand("label", "Precompute soft labels for dataset splits");
  std::vector<std::string> splits;
  label->add_option("--split", splits, "train | val | test (repeatable; default: all configured)");
  overrides.attach(*label);

  auto* train = app.add_subcommand("train", "Train the editor from label caches");
  overrides.attach(*train);

  auto* summarize = app.add_subcommand("summarize", "Edit the lead extract of a document");
  std::string checkpoint_path, document_path;
  summarize->add_option("--checkpoint", checkpoint_path, "Checkpoint JSON")->required();
  summarize->add_option("--document", document_path, "Text file, one sentence per line")->required();
  overrides.attach(*summarize);

  auto* evaluate = app.add_subcommand("evaluate", "Decode the test split and report metrics");
  evaluate->add_option("--checkpoint", checkpoint_path, "Checkpoint JSON (default: <out>/checkpoint.json)");
  overrides.attach(*evaluate);

  auto* synth = app.add_subcommand("synth", "Write a synthetic corpus with known best decisions");
  editnet::SyntheticConfig synth_config;
  std::size_t synth_val = 300, synth_test = 500;
  synth->add_option("--examples", synth_config.examples, "Training examples");
  synth->add_option("--val-examples", synth_val, "Validation examples");
  synth->add_option("--test-examples", synth_test, "Test examples");
  synth->add_option("--kept", synth_config.k, "Reference sentences kept verbatim per document");
  overrides.attach(*synth);

  CLI11_PARSE(app, argc, argv);

  try {
    editnet::ExperimentConfig config;
    if (!config_path.empty()) config = editnet::load_config(config_path);
    overrides.apply(config);

    if (ingest->parsed()) {
      const auto report = editnet::cmd_ingest(ingest_in, ingest_out);
      std::cout << editnet::to_json(report).dump(2) << '\n';
    } else if (label->parsed()) {
      if (splits.empty()) {
        for (const char* s : {"train", "val", "test"}) {
          if (!config.split_path(s).empty()) splits.emplace_back(s);
        }
      }
      for (const auto& r : editnet::cmd_label(config, splits)) {
        std::cout << r.split << ": " << r.labeled << "/" << r.examples << " labeled in " << r.seconds << " s\n";
        for (const auto& f : r.failures) {
          std::cout << "  " << (f.cap_exceeded ? "cap exceeded" : "failed") << ": " << f.id << ": " << f.reason
                    << '\n';
        }
      }
    } else if (train->parsed()) {
      const auto result = editnet::cmd_train(config);
      for (const auto& entry : result.log) std::cout << editnet::to_json(entry).dump() << '\n';
      std::cout << "best epoch " << result.best_epoch << ", checkpoint " << config.checkpoint_path().string() << '\n';
    } else if (summarize->parsed()) {
      std::cout << editnet::cmd_summarize(checkpoint_path, document_path, config);
    } else if (evaluate->parsed()) {
      if (checkpoint_path.empty()) checkpoint_path = config.checkpoint_path().string();
      std::cout << editnet::to_json(editnet::cmd_evaluate(checkpoint_path, config)).dump(2) << '\n';
    } else if (synth->parsed()) {
      std::filesystem::create_directories(config.out());
      synth_config.seed = config.seed;
      auto write_split = [&](const std::string& name, std::size_t count, std::uint64_t salt) {
        auto split = synth_config;
        split.examples = count;
        split.seed = editnet::hashing::splitmix64(config.seed + salt);
        split.id_prefix = name;
        const auto path = (config.out() / (name + ".jsonl")).string();
        editnet::write_dataset(path, editnet::make_synthetic_corpus(split));
        return path;
      };
      config.train_path = write_split("train", synth_config.examples, 0);
      config.val_path = write_split("val", synth_val, 1);
      config.test_path = write_split("test", synth_test, 2);
      config.k = synth_config.k + 2;
      editnet::write_resolved_config(config);
      std::cout << "wrote " << config.train_path << ", " << config.val_path << ", " << config.test_path << " and "
                << (config.out() / "config.json").string() << '\n';
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
