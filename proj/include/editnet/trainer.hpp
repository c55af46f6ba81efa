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

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include <nlohmann/json.hpp>

#include "editnet/editor.hpp"
#include "editnet/oracle.hpp"
#include "editnet/parallel.hpp"
#include "editnet/rouge.hpp"

namespace editnet {

struct AdamState {
  EditorParams first;
  EditorParams second;
  std::uint64_t t = 0;
  double lr = 1e-4;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;

  static AdamState fresh(const EditorParams& like, double lr = 1e-4) {
    AdamState s;
    s.first = EditorParams::zeros(like.m, like.n);
    s.second = EditorParams::zeros(like.m, like.n);
    s.lr = lr;
    return s;
  }
};

// Bias-corrected ADAM, entrywise over every tensor.
inline void adam_step(EditorParams& params, const EditorParams& grads, AdamState& state) {
  if (grads.m != params.m || grads.n != params.n || state.first.m != params.m || state.first.n != params.n ||
      state.second.m != params.m || state.second.n != params.n) {
    throw std::invalid_argument("adam_step: shape mismatch");
  }
  state.t += 1;
  const double c1 = 1.0 - std::pow(state.beta1, static_cast<double>(state.t));
  const double c2 = 1.0 - std::pow(state.beta2, static_cast<double>(state.t));
  auto p = params.tensors();
  const auto g = grads.tensors();
  auto m1 = state.first.tensors();
  auto m2 = state.second.tensors();
  for (std::size_t k = 0; k < p.size(); ++k) {
    if (g[k].size() != p[k].size()) throw std::invalid_argument("adam_step: shape mismatch");
    for (std::size_t i = 0; i < p[k].size(); ++i) {
      m1[k][i] = state.beta1 * m1[k][i] + (1.0 - state.beta1) * g[k][i];
      m2[k][i] = state.beta2 * m2[k][i] + (1.0 - state.beta2) * g[k][i] * g[k][i];
      const double m_hat = m1[k][i] / c1;
      const double v_hat = m2[k][i] / c2;
      p[k][i] -= state.lr * m_hat / (std::sqrt(v_hat) + state.eps);
    }
  }
}

struct TrainConfig {
  std::size_t batch_size = 32;
  std::size_t epochs = 20;
  std::uint64_t seed = 1;
  double lr = 1e-4;
  std::size_t workers = 1;

  void validate() const {
    if (batch_size < 1) throw std::invalid_argument("batch_size must be >= 1");
    if (epochs < 1) throw std::invalid_argument("epochs must be >= 1");
    if (!(lr > 0)) throw std::invalid_argument("learning rate must be positive");
  }
};

// A labeled example joined with its reference and precomputed network inputs.
struct TrainingItem {
  LabeledExample labeled;
  ReferenceSummary reference;
  EditorInputs inputs;
};

inline TrainingItem make_training_item(const Example& example, LabeledExample labeled, const EncoderConfig& encoder) {
  TrainingItem item;
  item.inputs = prepare_inputs(example.document, labeled.extract, labeled.abstractions, encoder);
  item.reference = example.reference;
  item.labeled = std::move(labeled);
  return item;
}

// Joins cache records to dataset examples by id.
inline std::vector<TrainingItem> join_items(const std::vector<Example>& examples,
                                            const std::vector<LabeledExample>& labeled,
                                            const EncoderConfig& encoder) {
  std::unordered_map<std::string, const Example*> by_id;
  for (const auto& ex : examples) by_id.emplace(ex.document.id, &ex);
  std::vector<TrainingItem> items;
  items.reserve(labeled.size());
  for (const auto& l : labeled) {
    auto it = by_id.find(l.id);
    if (it == by_id.end()) throw std::runtime_error("label cache record " + l.id + " has no matching example");
    items.push_back(make_training_item(*it->second, l, encoder));
  }
  return items;
}

inline double summary_reward(const MixedSummary& summary, const ReferenceSummary& reference,
                             const RewardWeights& weights) {
  return reward(summary.text, reference, weights);
}

inline double mean_validation_reward(const std::vector<TrainingItem>& items, const EditorParams& params,
                                     const RewardWeights& weights) {
  if (items.empty()) return 0.0;
  double total = 0.0;
  for (const auto& item : items) total += summary_reward(edit(item.inputs, params), item.reference, weights);
  return total / static_cast<double>(items.size());
}

// Share of steps where free-running decoding picks the oracle's decision.
inline double decision_accuracy(const std::vector<TrainingItem>& items, const EditorParams& params) {
  std::size_t hits = 0, total = 0;
  for (const auto& item : items) {
    const auto summary = edit(item.inputs, params);
    for (std::size_t i = 0; i < summary.steps.size(); ++i) {
      hits += summary.steps[i].decision == item.labeled.best[i];
      ++total;
    }
  }
  return total ? static_cast<double>(hits) / static_cast<double>(total) : 0.0;
}

struct EpochLog {
  std::size_t epoch = 0;
  double train_loss = 0.0;
  double val_reward = 0.0;

  bool operator==(const EpochLog&) const = default;
};

inline nlohmann::json to_json(const EpochLog& log) {
  return {{"epoch", log.epoch}, {"train_loss", log.train_loss}, {"val_reward", log.val_reward}};
}

struct TrainResult {
  EditorParams best_params;
  std::size_t best_epoch = 0;
  std::vector<EpochLog> log;
  std::size_t optimizer_steps = 0;
};

// Teacher-forced mini-batch ADAM. After every epoch the validation set is
// decoded free-running; the epoch with the highest mean reward wins (earliest
// on ties, last epoch when there is no validation data).
inline TrainResult train(const std::vector<TrainingItem>& train_set, const std::vector<TrainingItem>& validation,
                         const TrainConfig& config, const EditorParams& initial, const RewardWeights& weights) {
  config.validate();
  initial.validate();
  if (train_set.empty()) throw std::invalid_argument("training set is empty");

  TrainResult result;
  EditorParams params = initial;
  AdamState adam = AdamState::fresh(params, config.lr);
  std::mt19937_64 rng(config.seed);
  std::vector<std::size_t> order(train_set.size());
  std::iota(order.begin(), order.end(), 0);

  std::optional<double> best_reward;
  std::vector<GradientResult> member(std::min(config.batch_size, train_set.size()));
  for (std::size_t epoch = 1; epoch <= config.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    double loss_total = 0.0;
    for (std::size_t start = 0; start < order.size(); start += config.batch_size) {
      const std::size_t count = std::min(config.batch_size, order.size() - start);
      parallel_for(count, config.workers, [&](std::size_t j) {
        const auto& item = train_set[order[start + j]];
        member[j] = gradients(item.inputs, item.labeled.labels, params, /*teacher_forcing=*/true);
      });
      EditorParams batch = EditorParams::zeros(params.m, params.n);
      auto acc = batch.tensors();
      for (std::size_t j = 0; j < count; ++j) {
        loss_total += member[j].loss;
        const auto g = member[j].grad.tensors();
        for (std::size_t k = 0; k < acc.size(); ++k)
          for (std::size_t i = 0; i < acc[k].size(); ++i) acc[k][i] += g[k][i];
      }
      const double scale = 1.0 / static_cast<double>(count);
      for (auto t : acc)
        for (double& v : t) v *= scale;
      adam_step(params, batch, adam);
      ++result.optimizer_steps;
    }

    EpochLog entry{epoch, loss_total / static_cast<double>(train_set.size()),
                   mean_validation_reward(validation, params, weights)};
    result.log.push_back(entry);
    const bool better = validation.empty() || !best_reward || entry.val_reward > *best_reward;
    if (better) {
      best_reward = entry.val_reward;
      result.best_params = params;
      result.best_epoch = epoch;
    }
  }
  return result;
}

struct EvalReport {
  std::size_t examples = 0;
  std::size_t steps = 0;
  double rouge_1 = 0.0;
  double rouge_2 = 0.0;
  double rouge_l = 0.0;
  double mean_reward = 0.0;
  DecisionDistribution decision_fractions{0.0, 0.0, 0.0};
  double abstracted_fraction = 0.0;  // mean share of emitted sentences that are abstractions
  std::optional<double> decision_accuracy;
};

inline nlohmann::json to_json(const EvalReport& r) {
  nlohmann::json j = {{"examples", r.examples},
                      {"steps", r.steps},
                      {"rouge_1", r.rouge_1},
                      {"rouge_2", r.rouge_2},
                      {"rouge_l", r.rouge_l},
                      {"mean_reward", r.mean_reward},
                      {"decision_fractions",
                       {{"E", r.decision_fractions[0]}, {"A", r.decision_fractions[1]}, {"R", r.decision_fractions[2]}}},
                      {"abstracted_fraction", r.abstracted_fraction}};
  if (r.decision_accuracy) j["decision_accuracy"] = *r.decision_accuracy;
  return j;
}

// Tallies corpus statistics over already-decoded summaries.
inline EvalReport summarize_decodes(const std::vector<MixedSummary>& decoded,
                                    const std::vector<ReferenceSummary>& references, const RewardWeights& weights) {
  if (decoded.size() != references.size()) throw std::invalid_argument("one reference per decoded summary");
  EvalReport r;
  r.examples = decoded.size();
  std::array<std::size_t, 3> counts{0, 0, 0};
  double abstracted_sum = 0.0;
  std::size_t non_empty = 0;
  for (std::size_t i = 0; i < decoded.size(); ++i) {
    const auto& s = decoded[i];
    const auto& ref = references[i].sentences;
    const auto r1 = rouge_n(s.text, ref, 1).f1;
    const auto r2 = rouge_n(s.text, ref, 2).f1;
    const auto rl = rouge_l(s.text, ref).f1;
    r.rouge_1 += r1;
    r.rouge_2 += r2;
    r.rouge_l += rl;
    r.mean_reward += weights.alpha * r1 + weights.beta * r2 + weights.gamma * rl;
    std::array<std::size_t, 3> local{0, 0, 0};
    for (const auto& step : s.steps) ++local[static_cast<int>(step.decision)];
    for (int k = 0; k < 3; ++k) counts[k] += local[k];
    r.steps += s.steps.size();
    if (local[0] + local[1] > 0) {
      abstracted_sum += static_cast<double>(local[1]) / static_cast<double>(local[0] + local[1]);
      ++non_empty;
    }
  }
  if (r.examples) {
    const double n = static_cast<double>(r.examples);
    r.rouge_1 /= n;
    r.rouge_2 /= n;
    r.rouge_l /= n;
    r.mean_reward /= n;
  }
  if (r.steps) {
    for (int k = 0; k < 3; ++k) r.decision_fractions[k] = static_cast<double>(counts[k]) / static_cast<double>(r.steps);
  }
  if (non_empty) r.abstracted_fraction = abstracted_sum / static_cast<double>(non_empty);
  return r;
}

// Decodes prepared items free-running and reports corpus statistics,
// including accuracy against the oracle sequences the items carry.
inline EvalReport evaluate(const std::vector<TrainingItem>& items, const EditorParams& params,
                           const RewardWeights& weights) {
  std::vector<MixedSummary> decoded;
  std::vector<ReferenceSummary> refs;
  std::size_t hits = 0, total = 0;
  for (const auto& item : items) {
    decoded.push_back(edit(item.inputs, params));
    refs.push_back(item.reference);
    for (std::size_t i = 0; i < decoded.back().steps.size() && i < item.labeled.best.size(); ++i) {
      hits += decoded.back().steps[i].decision == item.labeled.best[i];
      ++total;
    }
  }
  auto report = summarize_decodes(decoded, refs, weights);
  if (total) report.decision_accuracy = static_cast<double>(hits) / static_cast<double>(total);
  return report;
}

// Full pipeline over raw examples: extract, abstract, encode, decode.
inline EvalReport evaluate(const std::vector<Example>& examples, const Checkpoint& checkpoint,
                           const Extractor& extractor, const Abstractor& abstractor, const RewardWeights& weights) {
  std::vector<MixedSummary> decoded;
  std::vector<ReferenceSummary> refs;
  for (const auto& ex : examples) {
    const auto extract = extractor(ex);
    decoded.push_back(edit(ex, extract, abstractor, checkpoint.encoder, checkpoint.params));
    refs.push_back(ex.reference);
  }
  return summarize_decodes(decoded, refs, weights);
}

}  // namespace editnet
