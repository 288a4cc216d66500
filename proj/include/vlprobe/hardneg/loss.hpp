#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

namespace vlprobe {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Rows 0..n_trivial-1 of `images` and `texts` are the trivial pairs (image i
/// matches text i); the remaining rows are hard negatives.
struct EmbeddingBatch {
  Matrix images;
  Matrix texts;
  int n_trivial = 0;
  std::vector<int> hn_groups;       // source candidate set of each hard-negative row
  std::vector<int> trivial_groups;  // candidate set of each trivial pair, -1 for none

  int n_hn() const { return static_cast<int>(images.rows()) - n_trivial; }
};

/// Throws PreconditionError on shape mismatches, zero-norm rows or an empty trivial set.
void validate_batch(const EmbeddingBatch& b);

/// Which hard negatives enter a trivial query's denominators.
enum class HnScope {
  WholeBatch,  // every hard negative in the batch
  OwnGroup     // only those sharing the query's trivial group
};

/// CLIP's initial temperature magnitude.
inline constexpr double kDefaultTau = 100.0;

/// exp(tau * cos(a, b)). Throws PreconditionError for zero vectors or tau <= 0.
double similarity(const Vector& a, const Vector& b, double tau);

struct LossConfig {
  double lambda = 0.2;
  int n_trivial = 2048;
  int n_hn = 768;
  HnScope scope = HnScope::WholeBatch;
};

/// Hard-negative aware image-to-text loss, summed over trivial images.
double loss_hn_i2t(const EmbeddingBatch& b, double tau, HnScope scope = HnScope::WholeBatch);
/// Text-to-image mirror, summed over trivial texts.
double loss_hn_t2i(const EmbeddingBatch& b, double tau, HnScope scope = HnScope::WholeBatch);
/// Symmetric in-batch contrastive loss over the trivial pairs only:
/// 0.5 * (mean image-to-text cross entropy + mean text-to-image cross entropy).
double loss_clip(const EmbeddingBatch& b, double tau);
/// loss_clip + lambda * (loss_hn_i2t + loss_hn_t2i). Throws PreconditionError for lambda < 0.
double loss_total(const EmbeddingBatch& b, double tau, double lambda, HnScope scope = HnScope::WholeBatch);

struct LossGradient {
  double loss = 0.0;
  Matrix images;  // d loss / d embedding, same shape as the batch
  Matrix texts;
  double log_tau = 0.0;  // d loss / d log(tau)
};

LossGradient grad_loss(const EmbeddingBatch& b, double tau, double lambda, HnScope scope = HnScope::WholeBatch);

}  // namespace vlprobe
