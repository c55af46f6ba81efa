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

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "editnet/text.hpp"

namespace editnet {

// Sentence representations e_s / a_s and the document representation d.
using SentenceVec = Eigen::VectorXd;
using DocVec = Eigen::VectorXd;

struct EncoderConfig {
  std::size_t n = 64;
  std::uint64_t hash_seed = 17;
  std::size_t context_window = 1;

  void validate() const {
    if (n < 1) throw std::invalid_argument("encoder width n must be >= 1");
  }
};

struct DocParams {
  Eigen::MatrixXd W_d;
  Eigen::VectorXd b_d;
};

namespace hashing {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// FNV-1a over the bytes, started from a seed-dependent offset.
inline std::uint64_t hash_bytes(std::string_view bytes, std::uint64_t seed) {
  std::uint64_t h = 1469598103934665603ULL ^ splitmix64(seed);
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return splitmix64(h);
}

}  // namespace hashing

// Signed feature hashing of unigrams and bigrams, L2-normalized.
inline SentenceVec hashed_vector(const TokenList& tokens, const EncoderConfig& config) {
  SentenceVec v = SentenceVec::Zero(static_cast<Eigen::Index>(config.n));
  auto add = [&](std::string_view feature) {
    const std::uint64_t h = hashing::hash_bytes(feature, config.hash_seed);
    const auto bucket = static_cast<Eigen::Index>(h % config.n);
    const double sign = (hashing::splitmix64(h) >> 63) ? -1.0 : 1.0;
    v[bucket] += sign;
  };
  std::string key;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    key.assign("\x01");
    key += tokens[i];
    add(key);
    if (i + 1 < tokens.size()) {
      key.assign("\x02");
      key += tokens[i];
      key.push_back('\x1f');
      key += tokens[i + 1];
      add(key);
    }
  }
  const double norm = v.norm();
  if (norm > 0) return v / norm;
  // Every feature cancelled; fall back to a fixed unit direction.
  v.setZero();
  v[static_cast<Eigen::Index>(hashing::hash_bytes("\x03", config.hash_seed) % config.n)] = 1.0;
  return v;
}

// Normalized mean of a window of hashed vectors.
inline SentenceVec mix_window(std::span<const SentenceVec> window, std::size_t center) {
  SentenceVec sum = window[0];
  for (std::size_t j = 1; j < window.size(); ++j) sum += window[j];
  sum /= static_cast<double>(window.size());
  const double norm = sum.norm();
  if (norm > 0) return sum / norm;
  return window[center];
}

namespace detail {

inline std::pair<std::size_t, std::size_t> window_bounds(std::size_t i, std::size_t count, std::size_t w) {
  const std::size_t lo = i >= w ? i - w : 0;
  const std::size_t hi = std::min(count - 1, i + w);
  return {lo, hi};
}

}  // namespace detail

inline std::vector<SentenceVec> encode_sentences(const Document& document, const EncoderConfig& config) {
  config.validate();
  const std::size_t count = document.size();
  std::vector<SentenceVec> raw;
  raw.reserve(count);
  for (const auto& s : document.sentences) raw.push_back(hashed_vector(s.tokens, config));

  std::vector<SentenceVec> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    const auto [lo, hi] = detail::window_bounds(i, count, config.context_window);
    out.push_back(mix_window(std::span<const SentenceVec>(raw).subspan(lo, hi - lo + 1), i - lo));
  }
  return out;
}

// Encodes `abstracted` as if it replaced sentence i in the document, reading
// back position i. Only the window around i is hashed.
inline SentenceVec encode_abstracted(const Document& document, std::size_t i, const TokenList& abstracted,
                                     const EncoderConfig& config) {
  config.validate();
  if (i >= document.size()) {
    throw std::out_of_range("sentence index " + std::to_string(i) + " out of range (N=" +
                            std::to_string(document.size()) + ")");
  }
  if (abstracted.empty()) throw std::invalid_argument("abstracted sentence is empty");
  const auto [lo, hi] = detail::window_bounds(i, document.size(), config.context_window);
  std::vector<SentenceVec> raw;
  raw.reserve(hi - lo + 1);
  for (std::size_t j = lo; j <= hi; ++j) {
    raw.push_back(hashed_vector(j == i ? abstracted : document.tokens(j), config));
  }
  return mix_window(raw, i - lo);
}

inline Eigen::VectorXd mean_vector(std::span<const SentenceVec> vecs) {
  if (vecs.empty()) throw std::invalid_argument("mean of an empty sentence list");
  Eigen::VectorXd sum = vecs[0];
  for (std::size_t j = 1; j < vecs.size(); ++j) {
    if (vecs[j].size() != sum.size()) throw std::invalid_argument("sentence vectors differ in width");
    sum += vecs[j];
  }
  return sum / static_cast<double>(vecs.size());
}

// d = tanh(W_d * mean(e) + b_d)
inline DocVec doc_representation(const Eigen::VectorXd& mean_e, const DocParams& params) {
  if (params.W_d.cols() != mean_e.size() || params.W_d.rows() != params.b_d.size()) {
    throw std::invalid_argument("document parameter shapes do not match n=" + std::to_string(mean_e.size()));
  }
  return (params.W_d * mean_e + params.b_d).array().tanh().matrix();
}

inline DocVec doc_representation(std::span<const SentenceVec> sentence_vecs, const DocParams& params) {
  return doc_representation(mean_vector(sentence_vecs), params);
}

}  // namespace editnet
