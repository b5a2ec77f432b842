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

#include "svlc/losses.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "svlc/common.h"

namespace svlc {

namespace {

// Unit-normalized copy of the rows in use; unused rows stay zero.
struct UnitRows {
  Matrix unit;
  std::vector<double> norm;
};

UnitRows normalize_rows(const Matrix& m, const std::vector<bool>& active) {
  UnitRows out{Matrix(m.rows(), m.cols()), std::vector<double>(m.rows(), 0.0)};
  for (std::size_t r = 0; r < m.rows(); ++r) {
    if (!active[r]) continue;
    double len = norm(m.row(r));
    out.norm[r] = len;
    for (std::size_t c = 0; c < m.cols(); ++c) out.unit(r, c) = m(r, c) / len;
  }
  return out;
}

// Accumulates d(loss)/d(logit) for logit = tau * c, c = <ua_i, ub_j>, into
// gradients with respect to the unit rows. `project_to_raw` converts them.
void backprop_pair(const UnitRows& a, std::size_t i, Matrix& grad_a, const UnitRows& b,
                   std::size_t j, Matrix& grad_b, double c, double dlogit, double tau,
                   double& grad_tau) {
  grad_tau += dlogit * c;
  const double s = dlogit * tau;
  const double* ua = a.unit.row(i).data();
  const double* ub = b.unit.row(j).data();
  double* ga = grad_a.row(i).data();
  double* gb = grad_b.row(j).data();
  const std::size_t d = a.unit.cols();
  for (std::size_t k = 0; k < d; ++k) {
    ga[k] += s * ub[k];
    gb[k] += s * ua[k];
  }
}

// Maps unit-row gradients g to raw-row gradients (g - <g,u>u) / |x|, in place.
// Rows with zero norm were never used and keep their zero gradient.
void project_to_raw(const UnitRows& rows, Matrix& grad) {
  for (std::size_t r = 0; r < grad.rows(); ++r) {
    if (rows.norm[r] == 0.0) continue;
    auto g = grad.row(r);
    auto u = rows.unit.row(r);
    const double c = dot(g, u);
    const double inv = 1.0 / rows.norm[r];
    for (std::size_t k = 0; k < g.size(); ++k) g[k] = (g[k] - c * u[k]) * inv;
  }
}

double log_sum_exp(std::span<const double> xs) {
  double hi = *std::max_element(xs.begin(), xs.end());
  double acc = 0.0;
  for (double x : xs) acc += std::exp(x - hi);
  return hi + std::log(acc);
}

// log(1 + exp(x)) without overflow.
double softplus(double x) { return x > 0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x)); }

double sigmoid(double x) {
  if (x >= 0) return 1.0 / (1.0 + std::exp(-x));
  double e = std::exp(x);
  return e / (1.0 + e);
}

LossGradients zero_gradients(const EmbeddingBatch& b) {
  LossGradients g;
  g.text = Matrix(b.size(), b.dim());
  g.image = Matrix(b.size(), b.dim());
  if (b.neg_text) g.neg_text = Matrix(b.size(), b.dim());
  if (b.pos_text) g.pos_text = Matrix(b.size(), b.dim());
  return g;
}

std::vector<bool> all_rows(const EmbeddingBatch& b) { return std::vector<bool>(b.size(), true); }

void check_rows_nonzero(const Matrix& m, const std::vector<bool>& active, const char* what) {
  for (std::size_t r = 0; r < m.rows(); ++r) {
    if (!active[r]) continue;
    double len = norm(m.row(r));
    if (!(len > 0.0) || !std::isfinite(len)) {
      throw DomainError(std::string(what) + " row " + std::to_string(r) +
                        " has zero or non-finite norm");
    }
  }
}

void check_optional(const std::optional<Matrix>& m, const std::vector<bool>& mask, std::size_t n,
                    std::size_t d, const char* what) {
  if (!mask.empty() && mask.size() != n) {
    throw DomainError(std::string(what) + " mask length differs from batch size");
  }
  if (!m) {
    if (std::find(mask.begin(), mask.end(), true) != mask.end()) {
      throw DomainError(std::string(what) + " mask set but no embeddings supplied");
    }
    return;
  }
  if (m->rows() != n || m->cols() != d) throw DomainError(std::string(what) + " shape mismatch");
}

// Per-row -log softmax at the diagonal for queries q_i against keys k_j,
// averaged over the active query rows.
LossTerm diagonal_softmax_loss(const EmbeddingBatch& batch, const LossConfig& cfg,
                               const Matrix& queries, const std::vector<bool>& active,
                               const Matrix& keys, bool keys_are_images) {
  validate(batch);
  validate(cfg);
  const std::size_t n = batch.size();
  LossTerm term;
  term.grad = zero_gradients(batch);
  std::size_t used = static_cast<std::size_t>(std::count(active.begin(), active.end(), true));
  if (used == 0) {
    term.no_rows = true;
    return term;
  }

  UnitRows uq = normalize_rows(queries, active);
  UnitRows uk = normalize_rows(keys, all_rows(batch));
  Matrix& grad_k = keys_are_images ? term.grad.image : term.grad.text;
  std::vector<double> logits(n);
  std::vector<double> cosines(n);
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    if (!active[i]) continue;
    for (std::size_t j = 0; j < n; ++j) cosines[j] = dot(uq.unit.row(i), uk.unit.row(j));
    for (std::size_t j = 0; j < n; ++j) logits[j] = cfg.tau * cosines[j];
    double lse = log_sum_exp(logits);
    total += lse - logits[i];
    for (std::size_t j = 0; j < n; ++j) {
      double dlogit = (std::exp(logits[j] - lse) - (i == j ? 1.0 : 0.0)) / static_cast<double>(used);
      backprop_pair(uq, i, term.grad.pos_text, uk, j, grad_k, cosines[j], dlogit, cfg.tau,
                    term.grad.tau);
    }
  }
  project_to_raw(uq, term.grad.pos_text);
  project_to_raw(uk, grad_k);
  term.value = total / static_cast<double>(used);
  return term;
}

void axpy(double a, const Matrix& x, Matrix& y) {
  auto xs = x.data();
  auto ys = y.data();
  for (std::size_t k = 0; k < xs.size(); ++k) ys[k] += a * xs[k];
}

}  // namespace

void validate(const EmbeddingBatch& batch) {
  const std::size_t n = batch.text.rows();
  const std::size_t d = batch.text.cols();
  if (n == 0) throw DomainError("empty embedding batch");
  if (d == 0) throw DomainError("zero embedding dimension");
  if (batch.image.rows() != n || batch.image.cols() != d) {
    throw DomainError("image embeddings must match text embeddings in shape");
  }
  check_optional(batch.neg_text, batch.has_neg, n, d, "negative");
  check_optional(batch.pos_text, batch.has_pos, n, d, "analogy");
  check_rows_nonzero(batch.text, all_rows(batch), "text");
  check_rows_nonzero(batch.image, all_rows(batch), "image");
  if (batch.neg_text) check_rows_nonzero(*batch.neg_text, negative_rows(batch), "negative");
  if (batch.pos_text) check_rows_nonzero(*batch.pos_text, positive_rows(batch), "analogy");
}

std::vector<bool> negative_rows(const EmbeddingBatch& batch) {
  if (!batch.neg_text) return std::vector<bool>(batch.size(), false);
  if (batch.has_neg.empty()) return std::vector<bool>(batch.size(), true);
  return batch.has_neg;
}

std::vector<bool> positive_rows(const EmbeddingBatch& batch) {
  if (!batch.pos_text) return std::vector<bool>(batch.size(), false);
  if (batch.has_pos.empty()) return std::vector<bool>(batch.size(), true);
  return batch.has_pos;
}

std::string_view to_string(NegMode mode) {
  return mode == NegMode::kSeparateLoss ? "separate_loss" : "merged_into_contrastive";
}

std::optional<NegMode> parse_neg_mode(std::string_view name) {
  if (name == "separate_loss" || name == "separate") return NegMode::kSeparateLoss;
  if (name == "merged_into_contrastive" || name == "merged") return NegMode::kMergedIntoContrastive;
  return std::nullopt;
}

void validate(const LossConfig& cfg) {
  if (!std::isfinite(cfg.tau)) throw DomainError("tau must be finite");
  if (!std::isfinite(cfg.alpha) || cfg.alpha < 0) throw DomainError("alpha must be finite and >= 0");
  if (!std::isfinite(cfg.beta) || cfg.beta < 0) throw DomainError("beta must be finite and >= 0");
}

double cosine(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw DomainError("cosine: dimension mismatch");
  double na = norm(a);
  double nb = norm(b);
  if (!(na > 0.0) || !(nb > 0.0)) throw DomainError("cosine: zero-norm vector");
  return dot(a, b) / (na * nb);
}

double similarity(std::span<const double> a, std::span<const double> b, double tau) {
  return std::exp(tau * cosine(a, b));
}

LossTerm contrastive_loss(const EmbeddingBatch& batch, const LossConfig& cfg) {
  validate(batch);
  validate(cfg);
  const std::size_t n = batch.size();
  LossTerm term;
  term.grad = zero_gradients(batch);

  UnitRows ut = normalize_rows(batch.text, all_rows(batch));
  UnitRows ui = normalize_rows(batch.image, all_rows(batch));

  // Text-side candidates: the n captions, then (merged mode) every negative.
  struct Candidate {
    const UnitRows* rows;
    std::size_t index;
    Matrix* grad;
  };
  std::vector<Candidate> texts;
  for (std::size_t i = 0; i < n; ++i) texts.push_back({&ut, i, &term.grad.text});
  UnitRows un;
  if (cfg.neg_mode == NegMode::kMergedIntoContrastive && batch.neg_text) {
    auto neg_rows = negative_rows(batch);
    un = normalize_rows(*batch.neg_text, neg_rows);
    for (std::size_t i = 0; i < n; ++i) {
      if (neg_rows[i]) texts.push_back({&un, i, &term.grad.neg_text});
    }
  }
  const std::size_t nt = texts.size();

  Matrix cosines(nt, n);
  Matrix logits(nt, n);
  for (std::size_t k = 0; k < nt; ++k) {
    for (std::size_t j = 0; j < n; ++j) {
      cosines(k, j) = dot(texts[k].rows->unit.row(texts[k].index), ui.unit.row(j));
      logits(k, j) = cfg.tau * cosines(k, j);
    }
  }

  Matrix dlogits(nt, n);
  const double inv_n = 1.0 / static_cast<double>(n);
  double total = 0.0;

  // Text -> image: each caption picks its image among the n images.
  for (std::size_t i = 0; i < n; ++i) {
    double lse = log_sum_exp(logits.row(i));
    total += lse - logits(i, i);
    for (std::size_t j = 0; j < n; ++j) {
      dlogits(i, j) += (std::exp(logits(i, j) - lse) - (i == j ? 1.0 : 0.0)) * inv_n;
    }
  }
  // Image -> text: each image picks its caption among all text candidates.
  std::vector<double> column(nt);
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t k = 0; k < nt; ++k) column[k] = logits(k, j);
    double lse = log_sum_exp(column);
    total += lse - logits(j, j);
    for (std::size_t k = 0; k < nt; ++k) {
      dlogits(k, j) += (std::exp(column[k] - lse) - (k == j ? 1.0 : 0.0)) * inv_n;
    }
  }
  term.value = total * inv_n;

  for (std::size_t k = 0; k < nt; ++k) {
    for (std::size_t j = 0; j < n; ++j) {
      backprop_pair(*texts[k].rows, texts[k].index, *texts[k].grad, ui, j, term.grad.image,
                    cosines(k, j), dlogits(k, j), cfg.tau, term.grad.tau);
    }
  }
  project_to_raw(ut, term.grad.text);
  project_to_raw(ui, term.grad.image);
  if (nt > n) project_to_raw(un, term.grad.neg_text);
  return term;
}

LossTerm negatives_loss(const EmbeddingBatch& batch, const LossConfig& cfg) {
  validate(batch);
  validate(cfg);
  const std::size_t n = batch.size();
  LossTerm term;
  term.grad = zero_gradients(batch);
  auto active = negative_rows(batch);
  std::size_t used = static_cast<std::size_t>(std::count(active.begin(), active.end(), true));
  if (used == 0) {
    term.no_rows = true;
    return term;
  }

  UnitRows ut = normalize_rows(batch.text, active);
  UnitRows ui = normalize_rows(batch.image, active);
  UnitRows un = normalize_rows(*batch.neg_text, active);
  const double inv = 1.0 / static_cast<double>(used);
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    if (!active[i]) continue;
    double cpos = dot(ut.unit.row(i), ui.unit.row(i));
    double cneg = dot(un.unit.row(i), ui.unit.row(i));
    double pos = cfg.tau * cpos;
    double neg = cfg.tau * cneg;
    // -log(e^pos / (e^pos + e^neg)) = softplus(neg - pos)
    total += softplus(neg - pos);
    double w = sigmoid(neg - pos) * inv;
    backprop_pair(ut, i, term.grad.text, ui, i, term.grad.image, cpos, -w, cfg.tau,
                  term.grad.tau);
    backprop_pair(un, i, term.grad.neg_text, ui, i, term.grad.image, cneg, w, cfg.tau,
                  term.grad.tau);
  }
  project_to_raw(ut, term.grad.text);
  project_to_raw(ui, term.grad.image);
  project_to_raw(un, term.grad.neg_text);
  term.value = total * inv;
  return term;
}

LossTerm analogy_text_loss(const EmbeddingBatch& batch, const LossConfig& cfg) {
  validate(batch);
  if (!batch.pos_text) {
    LossTerm t;
    t.grad = zero_gradients(batch);
    t.no_rows = true;
    return t;
  }
  return diagonal_softmax_loss(batch, cfg, *batch.pos_text, positive_rows(batch), batch.text,
                               /*keys_are_images=*/false);
}

LossTerm analogy_image_loss(const EmbeddingBatch& batch, const LossConfig& cfg) {
  validate(batch);
  if (!batch.pos_text) {
    LossTerm t;
    t.grad = zero_gradients(batch);
    t.no_rows = true;
    return t;
  }
  return diagonal_softmax_loss(batch, cfg, *batch.pos_text, positive_rows(batch), batch.image,
                               /*keys_are_images=*/true);
}

LossOutput total_loss(const EmbeddingBatch& batch, const LossConfig& cfg) {
  LossTerm cont = contrastive_loss(batch, cfg);
  LossTerm at = analogy_text_loss(batch, cfg);
  LossTerm ai = analogy_image_loss(batch, cfg);

  LossOutput out;
  out.gradients = std::move(cont.grad);
  out.parts.contrastive = cont.value;
  if (cfg.neg_mode == NegMode::kSeparateLoss) {
    LossTerm neg = negatives_loss(batch, cfg);
    out.parts.negatives = neg.value;
    out.no_negatives = neg.no_rows;
    LossGradients& g = out.gradients;
    axpy(cfg.alpha, neg.grad.text, g.text);
    axpy(cfg.alpha, neg.grad.image, g.image);
    axpy(cfg.alpha, neg.grad.neg_text, g.neg_text);
    g.tau += cfg.alpha * neg.grad.tau;
  } else {
    auto rows = negative_rows(batch);
    out.no_negatives = std::find(rows.begin(), rows.end(), true) == rows.end();
  }
  out.parts.analogy_text = at.value;
  out.parts.analogy_image = ai.value;
  out.no_positives = at.no_rows;

  LossGradients& g = out.gradients;
  for (const LossTerm* t : {&at, &ai}) {
    axpy(cfg.beta, t->grad.text, g.text);
    axpy(cfg.beta, t->grad.image, g.image);
    axpy(cfg.beta, t->grad.pos_text, g.pos_text);
    g.tau += cfg.beta * t->grad.tau;
  }

  out.total = out.parts.contrastive + cfg.alpha * out.parts.negatives +
              cfg.beta * (out.parts.analogy_text + out.parts.analogy_image);
  return out;
}

}  // namespace svlc
