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
#include <random>
#include <string>
#include <unordered_set>
#include <vector>

#include "editnet/text.hpp"

namespace editnet {

// Generated corpus where every decision has a known best answer.
//
// Each document holds, in order:
//   * k reference sentences copied verbatim (content words joined by
//     function words), best kept as-is;
//   * one padded sentence, inserted at a random position among them, whose
//     content words form a reference sentence on their own but which is
//     padded with filler adverbs, best replaced by its compression;
//   * a closing recap repeating one of the k sentences, best rejected.
struct SyntheticConfig {
  std::size_t examples = 600;
  std::size_t k = 3;
  std::uint64_t seed = 7;
  std::size_t vocabulary = 4000;
  std::string id_prefix = "syn";
};

namespace detail {

inline std::string pseudo_word(std::size_t i) {
  static const char* kOnsets[] = {"b", "d", "f", "g", "k", "l", "m", "n", "p", "r", "s", "t", "v", "z"};
  static const char* kNuclei[] = {"a", "e", "i", "o", "u", "ai", "ou"};
  std::string w;
  do {
    w += kOnsets[i % 14];
    i /= 14;
    w += kNuclei[i % 7];
    i /= 7;
  } while (i > 0);
  return w + "x";
}

}  // namespace detail

inline std::vector<Example> make_synthetic_corpus(const SyntheticConfig& config) {
  static const std::vector<std::string> kGlue = {"the", "of", "a", "in"};
  static const std::vector<std::string> kFiller = {"really", "just", "quite", "very"};
  std::mt19937_64 rng(config.seed);
  auto uniform = [&rng](std::size_t lo, std::size_t hi) {
    return std::uniform_int_distribution<std::size_t>(lo, hi)(rng);
  };

  std::vector<Example> corpus;
  corpus.reserve(config.examples);
  for (std::size_t e = 0; e < config.examples; ++e) {
    std::unordered_set<std::size_t> used;
    auto fresh_word = [&] {
      std::size_t w;
      do {
        w = uniform(0, config.vocabulary - 1);
      } while (!used.insert(w).second);
      return detail::pseudo_word(w);
    };

    Example ex;
    ex.document.id = config.id_prefix + "-" + std::to_string(e);
    std::vector<TokenList> kept;
    for (std::size_t s = 0; s < config.k; ++s) {
      TokenList sentence;
      const std::size_t words = uniform(4, 6);
      for (std::size_t w = 0; w < words; ++w) {
        if (w > 0) sentence.push_back(kGlue[uniform(0, kGlue.size() - 1)]);
        sentence.push_back(fresh_word());
      }
      sentence.push_back(".");
      kept.push_back(std::move(sentence));
    }

    TokenList compressed;
    const std::size_t words = uniform(3, 5);
    for (std::size_t w = 0; w < words; ++w) compressed.push_back(fresh_word());
    TokenList padded;
    for (std::size_t w = 0; w < compressed.size(); ++w) {
      padded.push_back(kFiller[uniform(0, kFiller.size() - 1)]);
      padded.push_back(compressed[w]);
    }
    padded.push_back(kFiller[uniform(0, kFiller.size() - 1)]);
    padded.push_back(".");

    const std::size_t padded_at = uniform(0, config.k);
    const std::size_t recap_of = uniform(0, config.k - 1);

    std::vector<TokenList> body = kept;
    body.insert(body.begin() + static_cast<std::ptrdiff_t>(padded_at), padded);
    body.push_back(kept[recap_of]);
    for (std::size_t i = 0; i < body.size(); ++i) ex.document.sentences.push_back({i, body[i]});

    ex.reference.sentences = kept;
    ex.reference.sentences.insert(ex.reference.sentences.begin() + static_cast<std::ptrdiff_t>(padded_at),
                                  compressed);
    corpus.push_back(std::move(ex));
  }
  return corpus;
}

}  // namespace editnet
