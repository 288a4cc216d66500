#pragma once

#include <cstdint>

#include <json.hpp>

#include "vlprobe/hardneg/loss.hpp"

namespace vlprobe {

struct GradcheckOptions {
  int batches = 100;
  int n_trivial = 6;
  int n_hn = 3;
  int dim = 8;
  double h = 1e-4;
  double tolerance = 1e-5;
  double lambda = 0.2;
  HnScope scope = HnScope::WholeBatch;
  std::uint64_t seed = 0;
  bool flip_sign = false;  // corrupts the analytic gradient to prove the check can fail
};

struct GradcheckReport {
  int batches = 0;
  int failed_batches = 0;
  double max_rel_error = 0.0;              // per gradient block, 2-norm
  double max_elementwise_rel_error = 0.0;  // diagnostic only
  bool passed() const { return failed_batches == 0; }
};

/// Random batch with entries uniform in [-1, 1] and hard negatives split into groups of three.
EmbeddingBatch random_batch(int n_trivial, int n_hn, int dim, std::uint64_t seed);

/// Relative error |a - n| / max(|a|, |n|, 1e-8).
double relative_error(double analytic, double numeric);
/// ||a - n|| / max(||a||, ||n||, 1e-8).
double relative_error(const Matrix& analytic, const Matrix& numeric);

/// Compares every analytic partial (embeddings and log tau) against central
/// differences of loss_total. A batch fails when the relative error of the
/// image block, the text block or the log tau partial exceeds the tolerance.
GradcheckReport run_gradcheck(const GradcheckOptions& opts);

nlohmann::json gradcheck_to_json(const GradcheckReport& r, const GradcheckOptions& opts);

}  // namespace vlprobe
