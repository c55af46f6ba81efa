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
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <fstream>
#include <optional>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include "editnet/encoder.hpp"
#include "editnet/summarizers.hpp"
#include "editnet/text.hpp"

namespace editnet {

enum class Decision : std::uint8_t { E = 0, A = 1, R = 2 };

inline constexpr std::array<Decision, 3> kDecisions = {Decision::E, Decision::A, Decision::R};

inline char to_char(Decision d) { return "EAR"[static_cast<int>(d)]; }

inline Decision decision_from_char(char c) {
  switch (c) {
    case 'E': return Decision::E;
    case 'A': return Decision::A;
    case 'R': return Decision::R;
    default: throw std::invalid_argument(std::string("unknown decision '") + c + "'");
  }
}

// Probability (or soft label) per decision, indexed by Decision.
using DecisionDistribution = std::array<double, 3>;

inline double at(const DecisionDistribution& dist, Decision d) { return dist[static_cast<int>(d)]; }

// Highest entry; ties resolve E before A before R.
inline Decision argmax(const DecisionDistribution& dist) {
  int best = 0;
  for (int k = 1; k < 3; ++k) {
    if (dist[k] > dist[best]) best = k;
  }
  return static_cast<Decision>(best);
}

struct EditorParams {
  std::size_t m = 0;
  std::size_t n = 0;
  Eigen::MatrixXd W_c;  // m x 4n
  Eigen::VectorXd b_c;  // m
  Eigen::MatrixXd V;    // 3 x m
  Eigen::VectorXd b;    // 3
  Eigen::MatrixXd W_g;  // n x n
  DocParams doc;        // W_d: n x n, b_d: n

  static EditorParams zeros(std::size_t m, std::size_t n) {
    if (m < 1 || n < 1) throw std::invalid_argument("editor dimensions must be positive");
    EditorParams p;
    p.m = m;
    p.n = n;
    const auto M = static_cast<Eigen::Index>(m), N = static_cast<Eigen::Index>(n);
    p.W_c = Eigen::MatrixXd::Zero(M, 4 * N);
    p.b_c = Eigen::VectorXd::Zero(M);
    p.V = Eigen::MatrixXd::Zero(3, M);
    p.b = Eigen::VectorXd::Zero(3);
    p.W_g = Eigen::MatrixXd::Zero(N, N);
    p.doc.W_d = Eigen::MatrixXd::Zero(N, N);
    p.doc.b_d = Eigen::VectorXd::Zero(N);
    return p;
  }

  // Matrices uniform in [-1/sqrt(fan_in), 1/sqrt(fan_in)], biases zero.
  static EditorParams initialize(std::size_t m, std::size_t n, std::uint64_t seed) {
    EditorParams p = zeros(m, n);
    std::mt19937_64 rng(seed);
    auto fill = [&rng](Eigen::MatrixXd& w) {
      const double bound = 1.0 / std::sqrt(static_cast<double>(w.cols()));
      std::uniform_real_distribution<double> dist(-bound, bound);
      for (Eigen::Index r = 0; r < w.rows(); ++r)
        for (Eigen::Index c = 0; c < w.cols(); ++c) w(r, c) = dist(rng);
    };
    fill(p.W_c);
    fill(p.V);
    fill(p.W_g);
    fill(p.doc.W_d);
    return p;
  }

  void validate() const {
    const auto M = static_cast<Eigen::Index>(m), N = static_cast<Eigen::Index>(n);
    const bool ok = W_c.rows() == M && W_c.cols() == 4 * N && b_c.size() == M && V.rows() == 3 && V.cols() == M &&
                    b.size() == 3 && W_g.rows() == N && W_g.cols() == N && doc.W_d.rows() == N &&
                    doc.W_d.cols() == N && doc.b_d.size() == N;
    if (!ok) throw std::invalid_argument("editor parameter shapes inconsistent with m, n");
    for (auto t : tensors()) {
      for (double v : t) {
        if (!std::isfinite(v)) throw std::invalid_argument("editor parameter is not finite");
      }
    }
  }

  // Flat views over every learnable tensor, in a fixed order.
  std::array<std::span<double>, 7> tensors() {
    return {std::span<double>(W_c.data(), W_c.size()), std::span<double>(b_c.data(), b_c.size()),
            std::span<double>(V.data(), V.size()),     std::span<double>(b.data(), b.size()),
            std::span<double>(W_g.data(), W_g.size()), std::span<double>(doc.W_d.data(), doc.W_d.size()),
            std::span<double>(doc.b_d.data(), doc.b_d.size())};
  }
  std::array<std::span<const double>, 7> tensors() const {
    auto spans = const_cast<EditorParams*>(this)->tensors();
    std::array<std::span<const double>, 7> out;
    for (std::size_t i = 0; i < spans.size(); ++i) out[i] = spans[i];
    return out;
  }

  static constexpr std::array<const char*, 7> kTensorNames = {"W_c", "b_c", "V", "b", "W_g", "W_d", "b_d"};
};

struct StepInput {
  SentenceVec e;
  SentenceVec a;
  Eigen::VectorXd g_prev;
  DocVec d;
};

namespace detail {

inline void check_width(const Eigen::VectorXd& v, std::size_t n, const char* what) {
  if (static_cast<std::size_t>(v.size()) != n) {
    throw std::invalid_argument(std::string(what) + " has width " + std::to_string(v.size()) + ", expected " +
                                std::to_string(n));
  }
}

inline DecisionDistribution softmax(const Eigen::Vector3d& logits) {
  const double top = logits.maxCoeff();
  DecisionDistribution p;
  double z = 0.0;
  for (int k = 0; k < 3; ++k) {
    p[k] = std::exp(logits[k] - top);
    z += p[k];
  }
  for (auto& v : p) v /= z;
  return p;
}

inline Eigen::VectorXd concat(const StepInput& in) {
  const auto n = in.e.size();
  Eigen::VectorXd x(4 * n);
  x << in.e, in.a, in.g_prev, in.d;
  return x;
}

}  // namespace detail

// softmax(V tanh(W_c [e, a, g_prev, d] + b_c) + b)
inline DecisionDistribution decision_distribution(const StepInput& input, const EditorParams& params) {
  detail::check_width(input.e, params.n, "e");
  detail::check_width(input.a, params.n, "a");
  detail::check_width(input.g_prev, params.n, "g");
  detail::check_width(input.d, params.n, "d");
  const Eigen::VectorXd hidden = (params.W_c * detail::concat(input) + params.b_c).array().tanh().matrix();
  const Eigen::Vector3d logits = params.V * hidden + params.b;
  return detail::softmax(logits);
}

// g_i = g_{i-1} + tanh(W_g h), h = e, a, or nothing for E, A, R.
inline Eigen::VectorXd update_state(const Eigen::VectorXd& g_prev, Decision decision, const SentenceVec& e,
                                    const SentenceVec& a, const Eigen::MatrixXd& W_g) {
  const auto n = static_cast<std::size_t>(W_g.rows());
  if (static_cast<std::size_t>(W_g.cols()) != n) throw std::invalid_argument("W_g must be square");
  detail::check_width(g_prev, n, "g");
  detail::check_width(e, n, "e");
  detail::check_width(a, n, "a");
  switch (decision) {
    case Decision::E: return g_prev + (W_g * e).array().tanh().matrix();
    case Decision::A: return g_prev + (W_g * a).array().tanh().matrix();
    case Decision::R: break;
  }
  return g_prev;
}

// Everything the network consumes for one example. With a frozen encoder
// these are constants and can be computed once per example.
struct EditorInputs {
  std::vector<std::size_t> order;
  std::vector<SentenceVec> e;           // per step
  std::vector<SentenceVec> a;           // per step
  Eigen::VectorXd mean_e;               // over all document sentences
  std::vector<TokenList> extracted;     // per step
  std::vector<TokenList> abstracted;    // per step

  std::size_t steps() const { return order.size(); }
};

inline EditorInputs prepare_inputs(const Document& document, const ExtractResult& extract,
                                   const std::vector<TokenList>& abstractions, const EncoderConfig& config) {
  extract.validate(document);
  if (abstractions.size() != extract.order.size()) {
    throw std::invalid_argument("need one abstraction per extracted sentence");
  }
  const auto sentence_vecs = encode_sentences(document, config);
  EditorInputs in;
  in.order = extract.order;
  in.mean_e = mean_vector(sentence_vecs);
  for (std::size_t step = 0; step < extract.order.size(); ++step) {
    const std::size_t idx = extract.order[step];
    in.e.push_back(sentence_vecs[idx]);
    in.a.push_back(encode_abstracted(document, idx, abstractions[step], config));
    in.extracted.push_back(document.tokens(idx));
    in.abstracted.push_back(abstractions[step]);
  }
  return in;
}

struct EditStep {
  std::size_t sentence = 0;
  Decision decision = Decision::E;
  std::optional<TokenList> emitted;
  DecisionDistribution distribution{};
};

struct MixedSummary {
  std::vector<EditStep> steps;
  std::vector<TokenList> text;
  Eigen::VectorXd final_state;
};

// Free-running greedy decoding.
inline MixedSummary edit(const EditorInputs& inputs, const EditorParams& params) {
  MixedSummary out;
  StepInput step_in;
  step_in.d = doc_representation(inputs.mean_e, params.doc);
  step_in.g_prev = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(params.n));
  for (std::size_t i = 0; i < inputs.steps(); ++i) {
    step_in.e = inputs.e[i];
    step_in.a = inputs.a[i];
    EditStep step;
    step.sentence = inputs.order[i];
    step.distribution = decision_distribution(step_in, params);
    step.decision = argmax(step.distribution);
    if (step.decision == Decision::E) step.emitted = inputs.extracted[i];
    if (step.decision == Decision::A) step.emitted = inputs.abstracted[i];
    if (step.emitted) out.text.push_back(*step.emitted);
    step_in.g_prev = update_state(step_in.g_prev, step.decision, inputs.e[i], inputs.a[i], params.W_g);
    out.steps.push_back(std::move(step));
  }
  out.final_state = step_in.g_prev;
  return out;
}

inline MixedSummary edit(const Example& example, const ExtractResult& extract, const Abstractor& abstractor,
                         const EncoderConfig& config, const EditorParams& params) {
  const auto abstractions = abstract_all(example.document, extract, abstractor);
  return edit(prepare_inputs(example.document, extract, abstractions, config), params);
}

inline constexpr double kLogClamp = 1e-12;

// -(1/l) sum_i sum_k y_ik log p_ik
inline double soft_cross_entropy(std::span<const DecisionDistribution> distributions,
                                 std::span<const DecisionDistribution> labels) {
  if (distributions.size() != labels.size()) throw std::invalid_argument("distribution/label count mismatch");
  if (distributions.empty()) throw std::invalid_argument("soft_cross_entropy needs at least one step");
  double total = 0.0;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    for (int k = 0; k < 3; ++k) {
      if (labels[i][k] != 0.0) total -= labels[i][k] * std::log(std::max(distributions[i][k], kLogClamp));
    }
  }
  return total / static_cast<double>(labels.size());
}

struct GradientResult {
  EditorParams grad;
  double loss = 0.0;
  std::vector<DecisionDistribution> distributions;
  std::vector<Decision> state_decisions;  // decisions that drove g
  std::vector<Eigen::VectorXd> states;    // g_1 .. g_l
};

// Loss and exact gradient of the unrolled forward pass. With teacher forcing
// the state follows argmax of each soft label; otherwise it follows the
// model's own argmax, treated as a constant.
inline GradientResult gradients(const EditorInputs& inputs, std::span<const DecisionDistribution> labels,
                                const EditorParams& params, bool teacher_forcing) {
  const std::size_t l = inputs.steps();
  if (labels.size() != l) throw std::invalid_argument("labels must cover every step");
  if (l == 0) throw std::invalid_argument("example has no steps");
  const auto n = static_cast<Eigen::Index>(params.n);

  const DocVec d = doc_representation(inputs.mean_e, params.doc);
  std::vector<Eigen::VectorXd> xs(l), hs(l), qs(l);
  std::vector<const SentenceVec*> state_inputs(l, nullptr);

  GradientResult result;
  result.grad = EditorParams::zeros(params.m, params.n);
  result.distributions.resize(l);
  result.state_decisions.resize(l);
  result.states.reserve(l);

  Eigen::VectorXd g = Eigen::VectorXd::Zero(n);
  for (std::size_t i = 0; i < l; ++i) {
    detail::check_width(inputs.e[i], params.n, "e");
    detail::check_width(inputs.a[i], params.n, "a");
    xs[i].resize(4 * n);
    xs[i] << inputs.e[i], inputs.a[i], g, d;
    hs[i] = (params.W_c * xs[i] + params.b_c).array().tanh().matrix();
    const Eigen::Vector3d logits = params.V * hs[i] + params.b;
    result.distributions[i] = detail::softmax(logits);
    const Decision decision = teacher_forcing ? argmax(labels[i]) : argmax(result.distributions[i]);
    result.state_decisions[i] = decision;
    if (decision == Decision::E) state_inputs[i] = &inputs.e[i];
    if (decision == Decision::A) state_inputs[i] = &inputs.a[i];
    if (state_inputs[i]) {
      qs[i] = (params.W_g * *state_inputs[i]).array().tanh().matrix();
      g += qs[i];
    }
    result.states.push_back(g);
  }
  result.loss = soft_cross_entropy(result.distributions, labels);

  const double inv_l = 1.0 / static_cast<double>(l);
  EditorParams& grad = result.grad;
  Eigen::VectorXd d_doc = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd d_state = Eigen::VectorXd::Zero(n);  // dL/dg_i, carried backwards
  for (std::size_t step = l; step-- > 0;) {
    // g_i feeds every later step; its gradient is complete here.
    if (state_inputs[step]) {
      const Eigen::VectorXd dq = d_state.array() * (1.0 - qs[step].array().square());
      grad.W_g.noalias() += dq * state_inputs[step]->transpose();
    }

    const auto& p = result.distributions[step];
    const auto& y = labels[step];
    double unclamped_mass = 0.0;
    for (int k = 0; k < 3; ++k) {
      if (p[k] >= kLogClamp) unclamped_mass += y[k];
    }
    Eigen::Vector3d d_logits;
    for (int k = 0; k < 3; ++k) {
      d_logits[k] = (p[k] * unclamped_mass - (p[k] >= kLogClamp ? y[k] : 0.0)) * inv_l;
    }
    grad.V.noalias() += d_logits * hs[step].transpose();
    grad.b += d_logits;
    const Eigen::VectorXd d_pre =
        (params.V.transpose() * d_logits).array() * (1.0 - hs[step].array().square());
    grad.W_c.noalias() += d_pre * xs[step].transpose();
    grad.b_c += d_pre;
    const Eigen::VectorXd d_x = params.W_c.transpose() * d_pre;
    // x_i = [e, a, g_{i-1}, d]
    d_state += d_x.segment(2 * n, n);
    d_doc += d_x.segment(3 * n, n);
  }
  const Eigen::VectorXd d_doc_pre = d_doc.array() * (1.0 - d.array().square());
  grad.doc.W_d.noalias() += d_doc_pre * inputs.mean_e.transpose();
  grad.doc.b_d += d_doc_pre;
  return result;
}

// Checkpoint: the editor parameters plus the encoder they were trained with.
struct Checkpoint {
  EditorParams params;
  EncoderConfig encoder;
};

namespace detail {

inline nlohmann::json matrix_json(const Eigen::MatrixXd& w) {
  nlohmann::json rows = nlohmann::json::array();
  for (Eigen::Index r = 0; r < w.rows(); ++r) {
    nlohmann::json row = nlohmann::json::array();
    for (Eigen::Index c = 0; c < w.cols(); ++c) row.push_back(w(r, c));
    rows.push_back(std::move(row));
  }
  return rows;
}

inline nlohmann::json vector_json(const Eigen::VectorXd& v) {
  nlohmann::json out = nlohmann::json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v[i]);
  return out;
}

inline Eigen::MatrixXd matrix_from_json(const nlohmann::json& j, std::size_t rows, std::size_t cols,
                                        const char* name) {
  if (!j.is_array() || j.size() != rows) throw std::runtime_error(std::string("checkpoint: bad shape for ") + name);
  Eigen::MatrixXd w(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  for (std::size_t r = 0; r < rows; ++r) {
    if (!j[r].is_array() || j[r].size() != cols) {
      throw std::runtime_error(std::string("checkpoint: bad shape for ") + name);
    }
    for (std::size_t c = 0; c < cols; ++c) {
      w(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = j[r][c].get<double>();
    }
  }
  return w;
}

inline Eigen::VectorXd vector_from_json(const nlohmann::json& j, std::size_t size, const char* name) {
  if (!j.is_array() || j.size() != size) throw std::runtime_error(std::string("checkpoint: bad shape for ") + name);
  Eigen::VectorXd v(static_cast<Eigen::Index>(size));
  for (std::size_t i = 0; i < size; ++i) v[static_cast<Eigen::Index>(i)] = j[i].get<double>();
  return v;
}

}  // namespace detail

inline nlohmann::json encoder_to_json(const EncoderConfig& c) {
  return {{"n", c.n}, {"hash_seed", c.hash_seed}, {"context_window", c.context_window}};
}

inline EncoderConfig encoder_from_json(const nlohmann::json& j) {
  EncoderConfig c;
  c.n = j.at("n").get<std::size_t>();
  c.hash_seed = j.at("hash_seed").get<std::uint64_t>();
  c.context_window = j.at("context_window").get<std::size_t>();
  c.validate();
  return c;
}

inline nlohmann::json checkpoint_to_json(const Checkpoint& ckpt) {
  const auto& p = ckpt.params;
  return {{"version", 1},
          {"m", p.m},
          {"n", p.n},
          {"W_c", detail::matrix_json(p.W_c)},
          {"b_c", detail::vector_json(p.b_c)},
          {"V", detail::matrix_json(p.V)},
          {"b", detail::vector_json(p.b)},
          {"W_g", detail::matrix_json(p.W_g)},
          {"W_d", detail::matrix_json(p.doc.W_d)},
          {"b_d", detail::vector_json(p.doc.b_d)},
          {"encoder", encoder_to_json(ckpt.encoder)}};
}

inline Checkpoint checkpoint_from_json(const nlohmann::json& j) {
  if (j.value("version", 0) != 1) throw std::runtime_error("checkpoint: unsupported version");
  Checkpoint ckpt;
  ckpt.encoder = encoder_from_json(j.at("encoder"));
  const auto m = j.at("m").get<std::size_t>();
  const auto n = j.at("n").get<std::size_t>();
  if (n != ckpt.encoder.n) {
    throw std::runtime_error("checkpoint: editor width n=" + std::to_string(n) + " does not match encoder width " +
                             std::to_string(ckpt.encoder.n));
  }
  auto& p = ckpt.params;
  p.m = m;
  p.n = n;
  p.W_c = detail::matrix_from_json(j.at("W_c"), m, 4 * n, "W_c");
  p.b_c = detail::vector_from_json(j.at("b_c"), m, "b_c");
  p.V = detail::matrix_from_json(j.at("V"), 3, m, "V");
  p.b = detail::vector_from_json(j.at("b"), 3, "b");
  p.W_g = detail::matrix_from_json(j.at("W_g"), n, n, "W_g");
  p.doc.W_d = detail::matrix_from_json(j.at("W_d"), n, n, "W_d");
  p.doc.b_d = detail::vector_from_json(j.at("b_d"), n, "b_d");
  p.validate();
  return ckpt;
}

inline void save_checkpoint(const std::string& path, const Checkpoint& ckpt) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write checkpoint " + path);
  out << checkpoint_to_json(ckpt).dump() << '\n';
}

inline Checkpoint load_checkpoint(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open checkpoint " + path);
  return checkpoint_from_json(nlohmann::json::parse(in));
}

}  // namespace editnet
