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
#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "editnet/text.hpp"

namespace editnet {

struct RougeScore {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

struct RewardWeights {
  double alpha = 0.4;  // ROUGE-1
  double beta = 1.0;   // ROUGE-2
  double gamma = 0.5;  // ROUGE-L

  void validate() const {
    if (alpha < 0 || beta < 0 || gamma < 0) throw std::invalid_argument("reward weights must be non-negative");
    if (alpha == 0 && beta == 0 && gamma == 0) throw std::invalid_argument("at least one reward weight must be positive");
  }
  double total() const { return alpha + beta + gamma; }
};

inline RougeScore make_score(double hits, double candidate_total, double reference_total) {
  RougeScore s;
  if (candidate_total <= 0 || reference_total <= 0) return s;
  s.precision = hits / candidate_total;
  s.recall = hits / reference_total;
  if (s.precision + s.recall > 0) s.f1 = 2 * s.precision * s.recall / (s.precision + s.recall);
  return s;
}

namespace rouge {

// Integer-id view of text; all scoring runs on interned tokens.
using IdList = std::vector<int>;
using IdText = std::vector<IdList>;

class Vocabulary {
 public:
  int intern(const std::string& token) {
    auto [it, inserted] = ids_.try_emplace(token, static_cast<int>(ids_.size()));
    return it->second;
  }
  IdList intern(const TokenList& tokens) {
    IdList out;
    out.reserve(tokens.size());
    for (const auto& t : tokens) out.push_back(intern(t));
    return out;
  }
  IdText intern(const std::vector<TokenList>& text) {
    IdText out;
    out.reserve(text.size());
    for (const auto& s : text) out.push_back(intern(s));
    return out;
  }

 private:
  std::unordered_map<std::string, int> ids_;
};

// Sorted multiset of n-gram keys, collected per sentence (no n-gram spans a
// sentence boundary). Supports n <= 2 with exact 64-bit keys and falls back to
// a polynomial hash for longer n-grams.
inline std::vector<std::uint64_t> ngram_keys(const IdText& text, int n) {
  std::vector<std::uint64_t> keys;
  for (const auto& s : text) {
    if (s.size() < static_cast<std::size_t>(n)) continue;
    for (std::size_t i = 0; i + n <= s.size(); ++i) {
      std::uint64_t key;
      if (n == 1) {
        key = static_cast<std::uint32_t>(s[i]);
      } else if (n == 2) {
        key = (static_cast<std::uint64_t>(static_cast<std::uint32_t>(s[i])) << 32) | static_cast<std::uint32_t>(s[i + 1]);
      } else {
        key = 1469598103934665603ULL;
        for (int k = 0; k < n; ++k) key = (key ^ static_cast<std::uint32_t>(s[i + k])) * 1099511628211ULL;
      }
      keys.push_back(key);
    }
  }
  std::sort(keys.begin(), keys.end());
  return keys;
}

// Sum over keys of min(count in a, count in b), for sorted inputs.
inline std::size_t clipped_overlap(const std::vector<std::uint64_t>& a, const std::vector<std::uint64_t>& b) {
  std::size_t i = 0, j = 0, hits = 0;
  while (i < a.size() && j < b.size()) {
    if (a[i] < b[j]) {
      ++i;
    } else if (b[j] < a[i]) {
      ++j;
    } else {
      ++hits;
      ++i;
      ++j;
    }
  }
  return hits;
}

inline RougeScore rouge_n(const IdText& candidate, const IdText& reference, int n) {
  if (n < 1) throw std::invalid_argument("rouge_n requires n >= 1");
  const auto c = ngram_keys(candidate, n);
  const auto r = ngram_keys(reference, n);
  return make_score(static_cast<double>(clipped_overlap(c, r)), static_cast<double>(c.size()),
                    static_cast<double>(r.size()));
}

// Positions in `ref` covered by one longest common subsequence with `cand`.
inline void lcs_positions(const IdList& ref, const IdList& cand, std::vector<char>& covered) {
  const std::size_t rn = ref.size(), cn = cand.size();
  if (rn == 0 || cn == 0) return;
  std::vector<int> dp((rn + 1) * (cn + 1), 0);
  auto at = [&](std::size_t i, std::size_t j) -> int& { return dp[i * (cn + 1) + j]; };
  for (std::size_t i = 1; i <= rn; ++i) {
    for (std::size_t j = 1; j <= cn; ++j) {
      at(i, j) = ref[i - 1] == cand[j - 1] ? at(i - 1, j - 1) + 1 : std::max(at(i - 1, j), at(i, j - 1));
    }
  }
  std::size_t i = rn, j = cn;
  while (i > 0 && j > 0) {
    if (ref[i - 1] == cand[j - 1]) {
      covered[i - 1] = 1;
      --i;
      --j;
    } else if (at(i - 1, j) >= at(i, j - 1)) {
      --i;
    } else {
      --j;
    }
  }
}

// Summary-level ROUGE-L: per reference sentence, the union of LCS hits
// against every candidate sentence. Hits are clipped by token counts so a
// candidate token is never credited twice.
inline RougeScore rouge_l(const IdText& candidate, const IdText& reference) {
  std::size_t cand_total = 0, ref_total = 0;
  std::unordered_map<int, int> cand_counts, ref_counts;
  for (const auto& s : candidate) {
    cand_total += s.size();
    for (int t : s) ++cand_counts[t];
  }
  for (const auto& s : reference) {
    ref_total += s.size();
    for (int t : s) ++ref_counts[t];
  }
  if (cand_total == 0 || ref_total == 0) return {};

  std::size_t hits = 0;
  std::vector<char> covered;
  for (const auto& ref : reference) {
    covered.assign(ref.size(), 0);
    for (const auto& cand : candidate) lcs_positions(ref, cand, covered);
    for (std::size_t i = 0; i < ref.size(); ++i) {
      if (!covered[i]) continue;
      int& cc = cand_counts[ref[i]];
      int& rc = ref_counts[ref[i]];
      if (cc > 0 && rc > 0) {
        ++hits;
        --cc;
        --rc;
      }
    }
  }
  return make_score(static_cast<double>(hits), static_cast<double>(cand_total), static_cast<double>(ref_total));
}

// Reference-side n-grams cached for repeated scoring of many candidates.
class RewardScorer {
 public:
  RewardScorer(const ReferenceSummary& reference, RewardWeights weights) : weights_(weights) {
    weights_.validate();
    reference_ = vocab_.intern(reference.sentences);
    unigrams_ = ngram_keys(reference_, 1);
    bigrams_ = ngram_keys(reference_, 2);
  }

  IdList intern(const TokenList& tokens) { return vocab_.intern(tokens); }

  double operator()(const IdText& candidate) const {
    double r = 0.0;
    if (weights_.alpha != 0) {
      const auto c = ngram_keys(candidate, 1);
      r += weights_.alpha * make_score(static_cast<double>(clipped_overlap(c, unigrams_)),
                                       static_cast<double>(c.size()), static_cast<double>(unigrams_.size())).f1;
    }
    if (weights_.beta != 0) {
      const auto c = ngram_keys(candidate, 2);
      r += weights_.beta * make_score(static_cast<double>(clipped_overlap(c, bigrams_)),
                                      static_cast<double>(c.size()), static_cast<double>(bigrams_.size())).f1;
    }
    if (weights_.gamma != 0) r += weights_.gamma * rouge_l(candidate, reference_).f1;
    return r;
  }

  double operator()(const std::vector<TokenList>& candidate) { return (*this)(vocab_.intern(candidate)); }

 private:
  RewardWeights weights_;
  Vocabulary vocab_;
  IdText reference_;
  std::vector<std::uint64_t> unigrams_;
  std::vector<std::uint64_t> bigrams_;
};

}  // namespace rouge

inline RougeScore rouge_n(const std::vector<TokenList>& candidate, const std::vector<TokenList>& reference, int n) {
  rouge::Vocabulary vocab;
  auto c = vocab.intern(candidate);
  auto r = vocab.intern(reference);
  return rouge::rouge_n(c, r, n);
}

inline RougeScore rouge_n(const TokenList& candidate, const std::vector<TokenList>& reference, int n) {
  return rouge_n(std::vector<TokenList>{candidate}, reference, n);
}

inline RougeScore rouge_l(const std::vector<TokenList>& candidate, const std::vector<TokenList>& reference) {
  rouge::Vocabulary vocab;
  auto c = vocab.intern(candidate);
  auto r = vocab.intern(reference);
  return rouge::rouge_l(c, r);
}

inline double reward(const std::vector<TokenList>& candidate, const ReferenceSummary& reference,
                     const RewardWeights& weights) {
  const auto r1 = rouge_n(candidate, reference.sentences, 1);
  const auto r2 = rouge_n(candidate, reference.sentences, 2);
  const auto rl = rouge_l(candidate, reference.sentences);
  return weights.alpha * r1.f1 + weights.beta * r2.f1 + weights.gamma * rl.f1;
}

}  // namespace editnet
