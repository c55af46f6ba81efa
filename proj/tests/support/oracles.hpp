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

// Independent reference implementations used by the test suite. They follow
// the model definitions with plain loops and share no code with the library
// beyond the data types.

#include <algorithm>
#include <array>
#include <cmath>
#include <random>
#include <vector>

#include "editnet/editor.hpp"

namespace editnet::testing {

using Vec = std::vector<double>;

inline Vec to_vec(const Eigen::VectorXd& v) { return Vec(v.data(), v.data() + v.size()); }

inline Vec mat_vec(const Eigen::MatrixXd& w, const Vec& x) {
  Vec out(static_cast<std::size_t>(w.rows()), 0.0);
  for (Eigen::Index r = 0; r < w.rows(); ++r) {
    double s = 0.0;
    for (Eigen::Index c = 0; c < w.cols(); ++c) s += w(r, c) * x[static_cast<std::size_t>(c)];
    out[static_cast<std::size_t>(r)] = s;
  }
  return out;
}

inline std::array<double, 3> naive_softmax(const std::array<double, 3>& z) {
  const double top = std::max({z[0], z[1], z[2]});
  std::array<double, 3> p{};
  double sum = 0;
  for (int k = 0; k < 3; ++k) sum += p[k] = std::exp(z[k] - top);
  for (auto& v : p) v /= sum;
  return p;
}

inline Vec naive_doc(const EditorParams& p, const Eigen::VectorXd& mean_e) {
  Vec d = mat_vec(p.doc.W_d, to_vec(mean_e));
  for (std::size_t i = 0; i < d.size(); ++i) d[i] = std::tanh(d[i] + p.doc.b_d[static_cast<Eigen::Index>(i)]);
  return d;
}

inline std::array<double, 3> naive_distribution(const EditorParams& p, const Vec& e, const Vec& a, const Vec& g,
                                                const Vec& d) {
  Vec x;
  for (const Vec* part : {&e, &a, &g, &d}) x.insert(x.end(), part->begin(), part->end());
  Vec h = mat_vec(p.W_c, x);
  for (std::size_t j = 0; j < h.size(); ++j) h[j] = std::tanh(h[j] + p.b_c[static_cast<Eigen::Index>(j)]);
  std::array<double, 3> z{};
  for (int k = 0; k < 3; ++k) {
    z[k] = p.b[k];
    for (std::size_t j = 0; j < h.size(); ++j) z[k] += p.V(k, static_cast<Eigen::Index>(j)) * h[j];
  }
  return naive_softmax(z);
}

inline int naive_argmax(const std::array<double, 3>& p) {
  int best = 0;
  for (int k = 1; k < 3; ++k)
    if (p[k] > p[best]) best = k;
  return best;
}

struct NaiveRun {
  std::vector<std::array<double, 3>> distributions;
  std::vector<int> decisions;
  std::vector<Vec> states;
  double loss = 0.0;
};

// Unrolled forward pass. `decisions` (0=E, 1=A, 2=R) drives the state when
// non-empty; otherwise the model's own argmax does.
inline NaiveRun naive_run(const EditorParams& p, const EditorInputs& in, const std::vector<DecisionDistribution>& y,
                          const std::vector<int>& decisions = {}) {
  NaiveRun run;
  const Vec d = naive_doc(p, in.mean_e);
  Vec g(p.n, 0.0);
  for (std::size_t i = 0; i < in.steps(); ++i) {
    const Vec e = to_vec(in.e[i]), a = to_vec(in.a[i]);
    const auto dist = naive_distribution(p, e, a, g, d);
    run.distributions.push_back(dist);
    const int dec = decisions.empty() ? naive_argmax(dist) : decisions[i];
    run.decisions.push_back(dec);
    if (dec != 2) {
      const Vec q = mat_vec(p.W_g, dec == 0 ? e : a);
      for (std::size_t j = 0; j < g.size(); ++j) g[j] += std::tanh(q[j]);
    }
    run.states.push_back(g);
  }
  if (!y.empty()) {
    double total = 0;
    for (std::size_t i = 0; i < y.size(); ++i)
      for (int k = 0; k < 3; ++k)
        if (y[i][k] != 0) total -= y[i][k] * std::log(std::max(run.distributions[i][k], 1e-12));
    run.loss = total / static_cast<double>(y.size());
  }
  return run;
}

inline Eigen::VectorXd random_unit(std::mt19937_64& rng, std::size_t n) {
  std::normal_distribution<double> g(0, 1);
  Eigen::VectorXd v(static_cast<Eigen::Index>(n));
  for (Eigen::Index i = 0; i < v.size(); ++i) v[i] = g(rng);
  return v.normalized();
}

inline EditorInputs random_inputs(std::mt19937_64& rng, std::size_t n, std::size_t steps) {
  EditorInputs in;
  for (std::size_t i = 0; i < steps; ++i) {
    in.order.push_back(i);
    in.e.push_back(random_unit(rng, n));
    in.a.push_back(random_unit(rng, n));
    in.extracted.push_back({"e" + std::to_string(i)});
    in.abstracted.push_back({"a" + std::to_string(i)});
  }
  in.mean_e = random_unit(rng, n) * 0.5;
  return in;
}

inline std::vector<DecisionDistribution> random_labels(std::mt19937_64& rng, std::size_t steps) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<DecisionDistribution> y(steps);
  for (auto& row : y) {
    double s = 0;
    for (auto& v : row) s += v = u(rng) + 1e-3;
    for (auto& v : row) v /= s;
  }
  return y;
}

inline EditorParams random_params(std::mt19937_64& rng, std::size_t m, std::size_t n, double scale) {
  auto p = EditorParams::zeros(m, n);
  std::uniform_real_distribution<double> u(-scale, scale);
  for (auto t : p.tensors())
    for (double& v : t) v = u(rng);
  return p;
}

struct GradientCheck {
  double worst_relative = 0.0;
  std::size_t checked = 0;
  std::size_t failures = 0;
};

// Central differences on every parameter entry against the analytic
// gradient. Entries whose magnitude is below `small` are compared in
// absolute terms.
inline GradientCheck check_gradient(const EditorParams& params, const EditorInputs& in,
                                    const std::vector<DecisionDistribution>& y, bool teacher_forcing,
                                    double rel_tol = 1e-4, double abs_tol = 1e-8, double small = 1e-6) {
  const auto analytic = gradients(in, y, params, teacher_forcing);
  std::vector<int> decisions;
  for (auto dec : analytic.state_decisions) decisions.push_back(static_cast<int>(dec));

  GradientCheck out;
  EditorParams probe = params;
  auto probe_tensors = probe.tensors();
  const auto grad_tensors = analytic.grad.tensors();
  for (std::size_t t = 0; t < probe_tensors.size(); ++t) {
    for (std::size_t i = 0; i < probe_tensors[t].size(); ++i) {
      double& v = probe_tensors[t][i];
      const double saved = v;
      const double h = 1e-5 * std::max(1.0, std::abs(saved));
      v = saved + h;
      const double up = naive_run(probe, in, y, decisions).loss;
      v = saved - h;
      const double down = naive_run(probe, in, y, decisions).loss;
      v = saved;
      const double numeric = (up - down) / (2 * h);
      const double exact = grad_tensors[t][i];
      ++out.checked;
      const double scale = std::max(std::abs(numeric), std::abs(exact));
      if (scale < small) {
        if (std::abs(numeric - exact) > abs_tol) ++out.failures;
        continue;
      }
      const double rel = std::abs(numeric - exact) / scale;
      out.worst_relative = std::max(out.worst_relative, rel);
      if (rel > rel_tol) ++out.failures;
    }
  }
  return out;
}

}  // namespace editnet::testing
