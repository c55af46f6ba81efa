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
#include <functional>
#include <limits>
#include <map>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include "editnet/rouge.hpp"
#include "editnet/text.hpp"

namespace editnet {

// Sentences chosen by an extractor, in selection order, together with the
// selection likelihood P(s) of every sentence in the document.
struct ExtractResult {
  std::vector<std::size_t> order;
  std::vector<double> likelihood;

  std::size_t steps() const { return order.size(); }
  bool operator==(const ExtractResult&) const = default;

  void validate(const Document& document) const {
    if (order.empty()) throw std::invalid_argument("extract selects no sentence");
    if (likelihood.size() != document.size()) throw std::invalid_argument("likelihood must cover every sentence");
    std::vector<char> seen(document.size(), 0);
    for (std::size_t idx : order) {
      if (idx >= document.size()) throw std::invalid_argument("extract index out of range");
      if (seen[idx]) throw std::invalid_argument("extract index repeated");
      seen[idx] = 1;
    }
    for (double p : likelihood) {
      if (!(p > 0.0 && p <= 1.0)) throw std::invalid_argument("selection likelihood outside (0,1]");
    }
  }
};

inline constexpr double kUnselectedLikelihood = 1e-6;

// First min(k, N) sentences; P(s) = 1 / (1 + position).
inline ExtractResult extract_lead(const Document& document, std::size_t k) {
  if (k < 1) throw std::invalid_argument("extract_lead requires k >= 1");
  ExtractResult out;
  const std::size_t l = std::min(k, document.size());
  for (std::size_t i = 0; i < l; ++i) out.order.push_back(i);
  out.likelihood.resize(document.size());
  for (std::size_t i = 0; i < document.size(); ++i) out.likelihood[i] = 1.0 / (1.0 + static_cast<double>(i));
  return out;
}

// Greedy reward maximization against the reference. Selected sentences get a
// softmax over their marginal gains; everything else is floored.
inline ExtractResult extract_greedy_oracle(const Example& example, std::size_t k, const RewardWeights& weights) {
  if (k < 1) throw std::invalid_argument("extract_greedy_oracle requires k >= 1");
  const Document& doc = example.document;
  rouge::RewardScorer scorer(example.reference, weights);
  rouge::IdText sentences;
  for (const auto& s : doc.sentences) sentences.push_back(scorer.intern(s.tokens));

  ExtractResult out;
  std::vector<double> gains;
  std::vector<char> used(doc.size(), 0);
  rouge::IdText running;
  double current = 0.0;
  while (out.order.size() < std::min(k, doc.size())) {
    std::size_t best = doc.size();
    double best_reward = -std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < doc.size(); ++j) {
      if (used[j]) continue;
      running.push_back(sentences[j]);
      const double r = scorer(running);
      running.pop_back();
      if (r > best_reward) {
        best_reward = r;
        best = j;
      }
    }
    // The first pick is unconditional so the extract is never empty.
    if (!out.order.empty() && best_reward <= current) break;
    used[best] = 1;
    running.push_back(sentences[best]);
    out.order.push_back(best);
    gains.push_back(best_reward - current);
    current = best_reward;
  }

  out.likelihood.assign(doc.size(), kUnselectedLikelihood);
  const double top = *std::max_element(gains.begin(), gains.end());
  double z = 0.0;
  for (double g : gains) z += std::exp(g - top);
  for (std::size_t i = 0; i < out.order.size(); ++i) out.likelihood[out.order[i]] = std::exp(gains[i] - top) / z;
  return out;
}

// Up to three consecutive sentences around a center sentence.
struct Chunk {
  std::vector<std::size_t> members;
  std::size_t center = 0;  // position of the centre sentence within members

  std::size_t center_sentence() const { return members.at(center); }
};

inline Chunk make_chunk(const Document& document, std::size_t i) {
  if (i >= document.size()) {
    throw std::out_of_range("chunk center " + std::to_string(i) + " out of range (N=" +
                            std::to_string(document.size()) + ")");
  }
  Chunk chunk;
  if (i > 0) chunk.members.push_back(i - 1);
  chunk.center = chunk.members.size();
  chunk.members.push_back(i);
  if (i + 1 < document.size()) chunk.members.push_back(i + 1);
  return chunk;
}

struct AttentionEntry {
  std::size_t sentence = 0;
  std::size_t position = 0;
  double weight = 0.0;
};

using AttentionMap = std::vector<AttentionEntry>;

// C'(w) = C(w) * P(s) / Z, with Z summing C * P over every entry.
inline AttentionMap rescale_attention(const AttentionMap& attention, std::span<const double> likelihood) {
  double z = 0.0;
  for (const auto& entry : attention) {
    if (entry.weight < 0) throw std::invalid_argument("negative attention weight");
    if (entry.sentence >= likelihood.size()) throw std::out_of_range("attention entry has no likelihood");
    z += entry.weight * likelihood[entry.sentence];
  }
  if (!(z > 0.0) || !std::isfinite(z)) throw std::domain_error("degenerate attention");
  AttentionMap out = attention;
  for (auto& entry : out) entry.weight = entry.weight * likelihood[entry.sentence] / z;
  return out;
}

struct AbstractResult {
  TokenList tokens;
  AttentionMap attention;
};

inline bool is_stopword(std::string_view token) {
  static const std::unordered_set<std::string_view> kStopwords = {
      "a",       "about",  "above", "after",   "again",  "against", "all",     "also",  "am",    "an",
      "and",     "any",    "are",   "as",      "at",     "be",      "because", "been",  "before", "being",
      "below",   "between", "both", "but",     "by",     "can",     "could",   "did",   "do",    "does",
      "doing",   "down",   "during", "each",   "even",   "few",     "for",     "from",  "further", "had",
      "has",     "have",   "having", "he",     "her",    "here",    "hers",    "him",   "his",   "how",
      "i",       "if",     "in",    "into",    "is",     "it",      "its",     "just",  "me",    "more",
      "most",    "my",     "no",    "nor",     "not",    "now",     "of",      "off",   "on",    "once",
      "only",    "or",     "other", "our",     "out",    "over",    "own",     "quite", "rather", "really",
      "same",    "she",    "should", "so",     "some",   "such",    "than",    "that",  "the",   "their",
      "them",    "then",   "there", "these",   "they",   "this",    "those",   "through", "to",  "too",
      "under",   "until",  "up",    "very",    "was",    "we",      "were",    "what",  "when",  "where",
      "which",   "while",  "who",   "whom",    "why",    "will",    "with",    "would", "you",   "your",
      "'s",      "said",   "says",  "well",    "still",  "yet",     "perhaps", "indeed", "simply", "actually"};
  return kStopwords.contains(token);
}

inline bool is_punctuation(std::string_view token) {
  static constexpr std::string_view kPunct = ".,;:!?\"'()-`";
  return !token.empty() && token.find_first_not_of(kPunct) == std::string_view::npos;
}

inline constexpr double kStopwordScore = 1e-6;

// Inverse-document-frequency attention over a chunk, with each member
// sentence treated as a document. Stopwords and punctuation get a tiny score.
inline AttentionMap chunk_attention(const Document& document, const Chunk& chunk) {
  const double members = static_cast<double>(chunk.members.size());
  std::map<std::string_view, int> df;
  for (std::size_t idx : chunk.members) {
    std::unordered_set<std::string_view> seen;
    for (const auto& t : document.tokens(idx)) {
      if (seen.insert(t).second) ++df[t];
    }
  }
  AttentionMap attention;
  for (std::size_t idx : chunk.members) {
    const auto& tokens = document.tokens(idx);
    for (std::size_t pos = 0; pos < tokens.size(); ++pos) {
      const auto& t = tokens[pos];
      const double score = (is_stopword(t) || is_punctuation(t)) ? kStopwordScore
                                                                  : std::log(1.0 + members / df.at(t));
      attention.push_back({idx, pos, score});
    }
  }
  return attention;
}

// Keeps the centre sentence's highest-attention tokens until their share of
// the centre's rescaled mass reaches `ratio`, then restores source order.
inline AbstractResult abstract_salience(const Document& document, const Chunk& chunk,
                                        std::span<const double> likelihood, double ratio) {
  if (!(ratio > 0.0 && ratio <= 1.0)) throw std::invalid_argument("compression ratio must lie in (0,1]");
  AbstractResult result;
  result.attention = rescale_attention(chunk_attention(document, chunk), likelihood);

  const std::size_t center = chunk.center_sentence();
  std::vector<std::pair<double, std::size_t>> ranked;
  for (const auto& entry : result.attention) {
    if (entry.sentence == center) ranked.emplace_back(entry.weight, entry.position);
  }
  std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
    return a.first != b.first ? a.first > b.first : a.second < b.second;
  });
  double total = 0.0;
  for (const auto& r : ranked) total += r.first;

  std::vector<std::size_t> kept;
  double mass = 0.0;
  for (const auto& [weight, position] : ranked) {
    kept.push_back(position);
    mass += weight;
    if (mass >= ratio * total) break;
  }
  std::sort(kept.begin(), kept.end());
  const auto& tokens = document.tokens(center);
  for (std::size_t pos : kept) result.tokens.push_back(tokens[pos]);
  return result;
}

using Extractor = std::function<ExtractResult(const Example&)>;
using Abstractor = std::function<AbstractResult(const Document&, const Chunk&, std::span<const double>)>;

inline Extractor lead_extractor(std::size_t k) {
  return [k](const Example& ex) { return extract_lead(ex.document, k); };
}

inline Extractor greedy_oracle_extractor(std::size_t k, RewardWeights weights) {
  return [k, weights](const Example& ex) { return extract_greedy_oracle(ex, k, weights); };
}

inline Abstractor salience_abstractor(double ratio) {
  if (!(ratio > 0.0 && ratio <= 1.0)) throw std::invalid_argument("compression ratio must lie in (0,1]");
  return [ratio](const Document& doc, const Chunk& chunk, std::span<const double> likelihood) {
    return abstract_salience(doc, chunk, likelihood, ratio);
  };
}

// Abstraction of every extracted sentence, in extract order.
inline std::vector<TokenList> abstract_all(const Document& document, const ExtractResult& extract,
                                           const Abstractor& abstractor) {
  std::vector<TokenList> out;
  out.reserve(extract.order.size());
  for (std::size_t idx : extract.order) {
    auto result = abstractor(document, make_chunk(document, idx), extract.likelihood);
    if (result.tokens.empty()) throw std::runtime_error("abstractor returned an empty sentence");
    out.push_back(std::move(result.tokens));
  }
  return out;
}

}  // namespace editnet
