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

#include <array>
#include <cstddef>
#include <functional>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "editnet/editor.hpp"
#include "editnet/parallel.hpp"
#include "editnet/rouge.hpp"
#include "editnet/summarizers.hpp"
#include "editnet/text.hpp"

namespace editnet {

using DecisionSequence = std::vector<Decision>;

inline std::string to_string(const DecisionSequence& seq) {
  std::string out;
  for (Decision d : seq) out.push_back(to_char(d));
  return out;
}

inline DecisionSequence sequence_from_string(const std::string& s) {
  DecisionSequence out;
  for (char c : s) out.push_back(decision_from_char(c));
  return out;
}

// E emits the extracted sentence, A its abstraction, R nothing.
inline std::vector<TokenList> realize(const Document& document, const ExtractResult& extract,
                                      const std::vector<TokenList>& abstractions, const DecisionSequence& sequence) {
  if (sequence.size() != extract.order.size() || abstractions.size() != extract.order.size()) {
    throw std::invalid_argument("decision sequence, extract, and abstractions differ in length");
  }
  std::vector<TokenList> out;
  for (std::size_t i = 0; i < sequence.size(); ++i) {
    if (sequence[i] == Decision::E) out.push_back(document.tokens(extract.order[i]));
    if (sequence[i] == Decision::A) out.push_back(abstractions[i]);
  }
  return out;
}

class CapExceeded : public std::length_error {
 public:
  CapExceeded(std::size_t steps, std::size_t cap)
      : std::length_error("enumeration cap exceeded (l=" + std::to_string(steps) + ", cap=" + std::to_string(cap) +
                          ")") {}
};

inline constexpr std::size_t kDefaultCap = 12;

// Rewards of all 3^l decision sequences. A sequence's index is its base-3
// code with the first decision most significant (E=0, A=1, R=2), so index
// order is lexicographic order with E < A < R.
class RewardTable {
 public:
  RewardTable() = default;
  RewardTable(std::size_t steps, std::vector<double> values) : steps_(steps), values_(std::move(values)) {
    if (values_.size() != count_for(steps_)) throw std::invalid_argument("reward table must hold 3^l entries");
  }

  static std::size_t count_for(std::size_t steps) {
    std::size_t c = 1;
    for (std::size_t i = 0; i < steps; ++i) c *= 3;
    return c;
  }

  static std::size_t code_of(const DecisionSequence& seq) {
    std::size_t code = 0;
    for (Decision d : seq) code = code * 3 + static_cast<std::size_t>(d);
    return code;
  }

  static DecisionSequence sequence_of(std::size_t code, std::size_t steps) {
    DecisionSequence seq(steps);
    for (std::size_t i = steps; i-- > 0;) {
      seq[i] = static_cast<Decision>(code % 3);
      code /= 3;
    }
    return seq;
  }

  std::size_t steps() const { return steps_; }
  std::size_t size() const { return values_.size(); }
  double operator[](std::size_t code) const { return values_[code]; }
  double at(const DecisionSequence& seq) const {
    if (seq.size() != steps_) throw std::invalid_argument("sequence length does not match reward table");
    return values_.at(code_of(seq));
  }
  const std::vector<double>& values() const { return values_; }

 private:
  std::size_t steps_ = 0;
  std::vector<double> values_;
};

using RewardFn = std::function<double(const std::vector<TokenList>& candidate)>;

namespace detail {

// Fills every code, reusing the value of the sequence with A replaced by E
// wherever the abstraction is identical to the extracted sentence (the two
// realize the same summary).
template <class Score>
RewardTable enumerate_with(std::size_t steps, const std::vector<char>& same_as_extract, std::size_t cap,
                           Score&& score) {
  if (steps > cap) throw CapExceeded(steps, cap);
  const std::size_t total = RewardTable::count_for(steps);
  std::vector<double> values(total);
  std::vector<std::size_t> place(steps);
  for (std::size_t i = 0, p = 1; i < steps; ++i, p *= 3) place[steps - 1 - i] = p;
  for (std::size_t code = 0; code < total; ++code) {
    std::size_t canonical = code;
    std::size_t rest = code;
    for (std::size_t i = 0; i < steps; ++i) {
      const std::size_t digit = rest / place[i];
      rest %= place[i];
      if (digit == 1 && same_as_extract[i]) canonical -= place[i];
    }
    values[code] = canonical != code ? values[canonical] : score(code);
  }
  return RewardTable(steps, std::move(values));
}

inline std::vector<char> identical_steps(const Document& document, const ExtractResult& extract,
                                         const std::vector<TokenList>& abstractions) {
  std::vector<char> same(extract.order.size());
  for (std::size_t i = 0; i < same.size(); ++i) same[i] = abstractions[i] == document.tokens(extract.order[i]);
  return same;
}

}  // namespace detail

inline RewardTable enumerate_rewards(const Document& document, const ExtractResult& extract,
                                     const std::vector<TokenList>& abstractions, const RewardFn& reward_fn,
                                     std::size_t cap = kDefaultCap) {
  const std::size_t steps = extract.order.size();
  if (abstractions.size() != steps) throw std::invalid_argument("need one abstraction per extracted sentence");
  return detail::enumerate_with(steps, detail::identical_steps(document, extract, abstractions), cap,
                                [&](std::size_t code) {
                                  return reward_fn(
                                      realize(document, extract, abstractions, RewardTable::sequence_of(code, steps)));
                                });
}

// ROUGE reward against the example's reference, on interned tokens.
inline RewardTable enumerate_rewards(const Example& example, const ExtractResult& extract,
                                     const std::vector<TokenList>& abstractions, const RewardWeights& weights,
                                     std::size_t cap = kDefaultCap) {
  const std::size_t steps = extract.order.size();
  if (abstractions.size() != steps) throw std::invalid_argument("need one abstraction per extracted sentence");
  if (steps > cap) throw CapExceeded(steps, cap);
  rouge::RewardScorer scorer(example.reference, weights);
  std::vector<rouge::IdList> extracted_ids, abstract_ids;
  for (std::size_t i = 0; i < steps; ++i) {
    extracted_ids.push_back(scorer.intern(example.document.tokens(extract.order[i])));
    abstract_ids.push_back(scorer.intern(abstractions[i]));
  }
  rouge::IdText candidate;
  return detail::enumerate_with(steps, detail::identical_steps(example.document, extract, abstractions), cap,
                                [&](std::size_t code) {
                                  candidate.clear();
                                  const auto seq = RewardTable::sequence_of(code, steps);
                                  for (std::size_t i = 0; i < steps; ++i) {
                                    if (seq[i] == Decision::E) candidate.push_back(extracted_ids[i]);
                                    if (seq[i] == Decision::A) candidate.push_back(abstract_ids[i]);
                                  }
                                  return scorer(candidate);
                                });
}

// Argmax; ties go to the lexicographically smallest sequence.
inline DecisionSequence best_sequence(const RewardTable& table) {
  if (table.size() == 0) throw std::invalid_argument("empty reward table");
  std::size_t best = 0;
  for (std::size_t code = 1; code < table.size(); ++code) {
    if (table[code] > table[best]) best = code;
  }
  return RewardTable::sequence_of(best, table.steps());
}

// Mean reward over complete sequences starting with (best_1..best_{i-1}, d),
// for every step i and decision d. Single pass over the table.
inline std::vector<std::array<double, 3>> prefix_means(const RewardTable& table, const DecisionSequence& best) {
  const std::size_t steps = table.steps();
  if (best.size() != steps) throw std::invalid_argument("best sequence length does not match reward table");
  std::vector<std::array<double, 3>> sums(steps, {0.0, 0.0, 0.0});
  for (std::size_t code = 0; code < table.size(); ++code) {
    const auto seq = RewardTable::sequence_of(code, steps);
    for (std::size_t i = 0; i < steps; ++i) {
      sums[i][static_cast<int>(seq[i])] += table[code];
      if (seq[i] != best[i]) break;
    }
  }
  for (std::size_t i = 0; i < steps; ++i) {
    const double count = static_cast<double>(RewardTable::count_for(steps - 1 - i));
    for (auto& s : sums[i]) s /= count;
  }
  return sums;
}

// Per-step soft labels: prefix means normalized over the three decisions,
// uniform when all three means are zero.
inline std::vector<DecisionDistribution> soft_labels(const RewardTable& table, const DecisionSequence& best) {
  std::vector<DecisionDistribution> labels;
  for (const auto& means : prefix_means(table, best)) {
    const double z = means[0] + means[1] + means[2];
    if (z == 0.0) {
      labels.push_back({1.0 / 3, 1.0 / 3, 1.0 / 3});
    } else {
      labels.push_back({means[0] / z, means[1] / z, means[2] / z});
    }
  }
  return labels;
}

struct LabeledExample {
  std::string id;
  ExtractResult extract;
  std::vector<TokenList> abstractions;
  std::vector<DecisionDistribution> labels;
  DecisionSequence best;
  double best_reward = 0.0;

  bool operator==(const LabeledExample&) const = default;
};

struct OracleConfig {
  RewardWeights weights;
  std::size_t cap = kDefaultCap;
};

inline LabeledExample label_example(const Example& example, const Extractor& extractor, const Abstractor& abstractor,
                                    const OracleConfig& config) {
  LabeledExample out;
  out.id = example.document.id;
  out.extract = extractor(example);
  out.extract.validate(example.document);
  if (out.extract.steps() > config.cap) throw CapExceeded(out.extract.steps(), config.cap);
  out.abstractions = abstract_all(example.document, out.extract, abstractor);
  const auto table = enumerate_rewards(example, out.extract, out.abstractions, config.weights, config.cap);
  out.best = best_sequence(table);
  out.best_reward = table.at(out.best);
  out.labels = soft_labels(table, out.best);
  return out;
}

struct LabelFailure {
  std::string id;
  std::string reason;
  bool cap_exceeded = false;
};

struct LabelingResult {
  std::vector<LabeledExample> labeled;
  std::vector<LabelFailure> failures;
};

// Labels every example independently; output keeps input order.
inline LabelingResult label_dataset(const std::vector<Example>& examples, const Extractor& extractor,
                                    const Abstractor& abstractor, const OracleConfig& config,
                                    std::size_t workers = 1) {
  std::vector<std::optional<LabeledExample>> slots(examples.size());
  std::vector<std::optional<LabelFailure>> errors(examples.size());
  parallel_for(examples.size(), workers, [&](std::size_t i) {
    try {
      slots[i] = label_example(examples[i], extractor, abstractor, config);
    } catch (const CapExceeded& e) {
      errors[i] = LabelFailure{examples[i].document.id, e.what(), true};
    } catch (const std::exception& e) {
      errors[i] = LabelFailure{examples[i].document.id, e.what(), false};
    }
  });
  LabelingResult result;
  for (std::size_t i = 0; i < examples.size(); ++i) {
    if (slots[i]) result.labeled.push_back(std::move(*slots[i]));
    if (errors[i]) result.failures.push_back(std::move(*errors[i]));
  }
  return result;
}

// Label cache: a header line, then one LabeledExample per line.
inline nlohmann::json cache_header(const OracleConfig& config) {
  return {{"cache_version", 1},
          {"reward_weights", {config.weights.alpha, config.weights.beta, config.weights.gamma}},
          {"cap", config.cap}};
}

inline nlohmann::json to_json(const LabeledExample& ex) {
  nlohmann::json likelihood = nlohmann::json::object();
  for (std::size_t i = 0; i < ex.extract.likelihood.size(); ++i) likelihood[std::to_string(i)] = ex.extract.likelihood[i];
  nlohmann::json labels = nlohmann::json::array();
  for (const auto& y : ex.labels) labels.push_back({y[0], y[1], y[2]});
  return {{"id", ex.id},
          {"order", ex.extract.order},
          {"P", likelihood},
          {"abstractions", ex.abstractions},
          {"labels", labels},
          {"best", to_string(ex.best)},
          {"best_reward", ex.best_reward}};
}

inline LabeledExample labeled_from_json(const nlohmann::json& j) {
  LabeledExample ex;
  ex.id = j.at("id").get<std::string>();
  ex.extract.order = j.at("order").get<std::vector<std::size_t>>();
  const auto& likelihood = j.at("P");
  ex.extract.likelihood.assign(likelihood.size(), 0.0);
  for (const auto& [key, value] : likelihood.items()) {
    const auto idx = static_cast<std::size_t>(std::stoul(key));
    if (idx >= ex.extract.likelihood.size()) throw std::runtime_error("label cache: likelihood index out of range");
    ex.extract.likelihood[idx] = value.get<double>();
  }
  ex.abstractions = j.at("abstractions").get<std::vector<TokenList>>();
  for (const auto& y : j.at("labels")) ex.labels.push_back({y.at(0).get<double>(), y.at(1).get<double>(), y.at(2).get<double>()});
  ex.best = sequence_from_string(j.at("best").get<std::string>());
  ex.best_reward = j.at("best_reward").get<double>();
  if (ex.labels.size() != ex.extract.order.size() || ex.best.size() != ex.extract.order.size() ||
      ex.abstractions.size() != ex.extract.order.size()) {
    throw std::runtime_error("label cache: record " + ex.id + " has inconsistent step counts");
  }
  return ex;
}

inline void write_label_cache(std::ostream& out, const OracleConfig& config,
                              const std::vector<LabeledExample>& labeled) {
  out << cache_header(config).dump() << '\n';
  for (const auto& ex : labeled) out << to_json(ex).dump() << '\n';
}

struct LabelCache {
  OracleConfig config;
  std::vector<LabeledExample> labeled;
};

inline LabelCache read_label_cache(std::istream& in) {
  LabelCache cache;
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("label cache: missing header");
  const auto header = nlohmann::json::parse(line);
  if (header.value("cache_version", 0) != 1) throw std::runtime_error("label cache: unsupported version");
  const auto& w = header.at("reward_weights");
  cache.config.weights = {w.at(0).get<double>(), w.at(1).get<double>(), w.at(2).get<double>()};
  cache.config.cap = header.at("cap").get<std::size_t>();
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    cache.labeled.push_back(labeled_from_json(nlohmann::json::parse(line)));
  }
  return cache;
}

}  // namespace editnet
