//
// Copyright 2026 The svlc-kit Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//

#ifndef SVLC_TESTS_LOSS_ORACLE_H_
#define SVLC_TESTS_LOSS_ORACLE_H_

// Brute-force reference for the batch losses. Evaluates the formulas
// literally: S = exp(tau * cos), ratios of S, plain double loops, no
// log-domain tricks and no shared code with the library.

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "svlc/losses.h"

namespace svlc::testing {

using Rows = std::vector<std::vector<double>>;

inline double oracle_cos(const std::vector<double>& a, const std::vector<double>& b) {
  double ab = 0, aa = 0, bb = 0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    ab += a[k] * b[k];
    aa += a[k] * a[k];
    bb += b[k] * b[k];
  }
  return ab / (std::sqrt(aa) * std::sqrt(bb));
}

inline double oracle_s(const std::vector<double>& a, const std::vector<double>& b, double tau) {
  return std::exp(tau * oracle_cos(a, b));
}

// Mean over i of -log(S(T_i,I_i)/sum_j S(T_i,I_j)) - log(S(T_i,I_i)/sum_k S(T_k,I_i)).
// `extra_texts` join the k-sum only (merged negatives).
inline double oracle_contrastive(const Rows& t, const Rows& im, double tau, const Rows& extra_texts = {}) {
  const std::size_t n = t.size();
  double total = 0;
  for (std::size_t i = 0; i < n; ++i) {
    double sii = oracle_s(t[i], im[i], tau);
    double row = 0, col = 0;
    for (std::size_t j = 0; j < n; ++j) row += oracle_s(t[i], im[j], tau);
    for (std::size_t k = 0; k < n; ++k) col += oracle_s(t[k], im[i], tau);
    for (const auto& e : extra_texts) col += oracle_s(e, im[i], tau);
    total += -std::log(sii / row) - std::log(sii / col);
  }
  return total / static_cast<double>(n);
}

inline double oracle_negatives(const Rows& t, const Rows& im, const Rows& neg, const std::vector<bool>& mask,
                               double tau) {
  double total = 0;
  std::size_t used = 0;
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (!mask[i]) continue;
    double sp = oracle_s(t[i], im[i], tau);
    double sn = oracle_s(neg[i], im[i], tau);
    total += -std::log(sp / (sp + sn));
    ++used;
  }
  return used ? total / static_cast<double>(used) : 0.0;
}

// Mean over masked rows of -log(S(P_i, K_i) / sum_j S(P_i, K_j)).
inline double oracle_analogy(const Rows& pos, const Rows& keys, const std::vector<bool>& mask, double tau) {
  double total = 0;
  std::size_t used = 0;
  for (std::size_t i = 0; i < pos.size(); ++i) {
    if (!mask[i]) continue;
    double num = oracle_s(pos[i], keys[i], tau);
    double den = 0;
    for (std::size_t j = 0; j < keys.size(); ++j) den += oracle_s(pos[i], keys[j], tau);
    total += -std::log(num / den);
    ++used;
  }
  return used ? total / static_cast<double>(used) : 0.0;
}

// Random batch with Gaussian rows; masks drawn with probability 1/2 unless
// `full_masks`. Masked-out rows stay random (nonzero).
inline EmbeddingBatch random_batch(std::uint64_t seed, std::size_t n, std::size_t d, bool with_neg,
                                   bool with_pos, bool full_masks = true) {
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::bernoulli_distribution coin(0.5);
  auto fill = [&] {
    Matrix m(n, d);
    for (double& v : m.data()) v = normal(gen);
    return m;
  };
  EmbeddingBatch b;
  b.text = fill();
  b.image = fill();
  if (with_neg) {
    b.neg_text = fill();
    b.has_neg.assign(n, true);
    if (!full_masks) {
      for (std::size_t i = 0; i < n; ++i) b.has_neg[i] = coin(gen);
    }
  }
  if (with_pos) {
    b.pos_text = fill();
    b.has_pos.assign(n, true);
    if (!full_masks) {
      for (std::size_t i = 0; i < n; ++i) b.has_pos[i] = coin(gen);
    }
  }
  return b;
}

inline Rows rows_of(const Matrix& m) { return m.to_rows(); }

inline Rows masked_rows(const Matrix& m, const std::vector<bool>& mask) {
  Rows out;
  for (std::size_t i = 0; i < m.rows(); ++i) {
    if (mask[i]) out.emplace_back(m.row(i).begin(), m.row(i).end());
  }
  return out;
}

inline double relative_error(double got, double want) {
  double scale = std::max(std::abs(got), std::abs(want));
  return scale == 0 ? 0 : std::abs(got - want) / scale;
}

// Central differences of total_loss with respect to every embedding entry
// and tau, compared against the analytic gradient. Returns the worst
// |a - f| / max(|a|, |f|, floor).
inline double max_gradient_error(const EmbeddingBatch& batch, const LossConfig& cfg, double h = 1e-6,
                                 double floor = 1e-3) {
  LossOutput out = total_loss(batch, cfg);
  double worst = 0;
  auto check = [&](double analytic, double numeric) {
    double scale = std::max({std::abs(analytic), std::abs(numeric), floor});
    worst = std::max(worst, std::abs(analytic - numeric) / scale);
  };
  auto sweep = [&](Matrix EmbeddingBatch::*member, const Matrix& grad) {
    EmbeddingBatch probe = batch;
    Matrix& m = probe.*member;
    for (std::size_t k = 0; k < m.data().size(); ++k) {
      const double saved = m.data()[k];
      m.data()[k] = saved + h;
      double up = total_loss(probe, cfg).total;
      m.data()[k] = saved - h;
      double down = total_loss(probe, cfg).total;
      m.data()[k] = saved;
      check(grad.data()[k], (up - down) / (2 * h));
    }
  };
  auto sweep_opt = [&](std::optional<Matrix> EmbeddingBatch::*member, const Matrix& grad) {
    if (!(batch.*member)) return;
    EmbeddingBatch probe = batch;
    Matrix& m = *(probe.*member);
    for (std::size_t k = 0; k < m.data().size(); ++k) {
      const double saved = m.data()[k];
      m.data()[k] = saved + h;
      double up = total_loss(probe, cfg).total;
      m.data()[k] = saved - h;
      double down = total_loss(probe, cfg).total;
      m.data()[k] = saved;
      check(grad.data()[k], (up - down) / (2 * h));
    }
  };
  sweep(&EmbeddingBatch::text, out.gradients.text);
  sweep(&EmbeddingBatch::image, out.gradients.image);
  sweep_opt(&EmbeddingBatch::neg_text, out.gradients.neg_text);
  sweep_opt(&EmbeddingBatch::pos_text, out.gradients.pos_text);

  LossConfig up = cfg, down = cfg;
  up.tau += h;
  down.tau -= h;
  check(out.gradients.tau, (total_loss(batch, up).total - total_loss(batch, down).total) / (2 * h));
  return worst;
}

}  // namespace svlc::testing

#endif  // SVLC_TESTS_LOSS_ORACLE_H_
