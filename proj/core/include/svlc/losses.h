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

#ifndef SVLC_LOSSES_H_
#define SVLC_LOSSES_H_

#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "svlc/matrix.h"

namespace svlc {

// Row-aligned embeddings for one training batch. Row i of every matrix
// belongs to pair i. Negative and analogy rows are optional per row; rows
// whose mask is false are ignored and may be all zero.
struct EmbeddingBatch {
  Matrix text;   // n x d
  Matrix image;  // n x d
  std::optional<Matrix> neg_text;
  std::optional<Matrix> pos_text;
  // Empty mask means "every row" when the matching matrix is present.
  std::vector<bool> has_neg;
  std::vector<bool> has_pos;

  std::size_t size() const { return text.rows(); }
  std::size_t dim() const { return text.cols(); }
};

// Throws DomainError on shape mismatch, empty batch, mask length mismatch,
// masks set without a matrix, or a zero-norm row that is in use.
void validate(const EmbeddingBatch& batch);

// Effective per-row masks after applying the empty-mask defaults.
std::vector<bool> negative_rows(const EmbeddingBatch& batch);
std::vector<bool> positive_rows(const EmbeddingBatch& batch);

enum class NegMode {
  kSeparateLoss,           // negatives feed their own pairwise loss
  kMergedIntoContrastive,  // negatives become extra text rows in the CLIP loss
};

std::string_view to_string(NegMode mode);
std::optional<NegMode> parse_neg_mode(std::string_view name);

struct LossConfig {
  double tau = 1.0;
  double alpha = 1.0;
  double beta = 1.0;
  NegMode neg_mode = NegMode::kSeparateLoss;
};

void validate(const LossConfig& cfg);

// Gradients with respect to every input. neg_text / pos_text are empty
// matrices when the batch has none.
struct LossGradients {
  Matrix text;
  Matrix image;
  Matrix neg_text;
  Matrix pos_text;
  double tau = 0.0;
};

struct LossTerm {
  double value = 0.0;
  LossGradients grad;
  // Set when no row contributed (mean over an empty set is taken as 0).
  bool no_rows = false;
};

struct LossParts {
  double contrastive = 0.0;
  double negatives = 0.0;
  double analogy_text = 0.0;
  double analogy_image = 0.0;
};

struct LossOutput {
  double total = 0.0;
  LossParts parts;
  LossGradients gradients;
  bool no_negatives = false;
  bool no_positives = false;
};

double cosine(std::span<const double> a, std::span<const double> b);

// exp(tau * cosine(a, b)). Throws DomainError on a zero vector.
double similarity(std::span<const double> a, std::span<const double> b, double tau);

// Symmetric InfoNCE, averaged over pairs. In merged mode the negative rows
// join the text side as extra candidates for every image's softmax.
LossTerm contrastive_loss(const EmbeddingBatch& batch, const LossConfig& cfg);

// Mean over rows with a negative of -log(S(T,I) / (S(T,I) + S(T_neg,I))).
LossTerm negatives_loss(const EmbeddingBatch& batch, const LossConfig& cfg);

// Mean over rows with an analogy of -log softmax_j S(T_sim_i, T_j) at j = i.
LossTerm analogy_text_loss(const EmbeddingBatch& batch, const LossConfig& cfg);

// As analogy_text_loss against the images.
LossTerm analogy_image_loss(const EmbeddingBatch& batch, const LossConfig& cfg);

// contrastive + alpha * negatives + beta * (analogy_text + analogy_image).
// In merged mode the separate negatives term is not used and reads 0.
LossOutput total_loss(const EmbeddingBatch& batch, const LossConfig& cfg);

}  // namespace svlc

#endif  // SVLC_LOSSES_H_
