#include "vlprobe/hardneg/gradcheck.hpp"

#include <algorithm>
#include <cmath>

#include "vlprobe/core/error.hpp"
#include "vlprobe/core/seed.hpp"

namespace vlprobe {

EmbeddingBatch random_batch(int n_trivial, int n_hn, int dim, std::uint64_t seed) {
  if (n_trivial < 1 || n_hn < 0 || dim < 1) throw PreconditionError("invalid batch shape");
  SeededRng rng(seed);
  EmbeddingBatch b;
  b.n_trivial = n_trivial;
  const int rows = n_trivial + n_hn;
  b.images.resize(rows, dim);
  b.texts.resize(rows, dim);
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < dim; ++c) {
      b.images(r, c) = rng.uniform(-1.0, 1.0);
      b.texts(r, c) = rng.uniform(-1.0, 1.0);
    }
  }
  for (int k = 0; k < n_hn; ++k) b.hn_groups.push_back(k / 3);
  for (int i = 0; i < n_trivial; ++i) b.trivial_groups.push_back(n_hn == 0 ? -1 : i % ((n_hn + 2) / 3));
  return b;
}

double relative_error(double analytic, double numeric) {
  return std::abs(analytic - numeric) / std::max({std::abs(analytic), std::abs(numeric), 1e-8});
}

double relative_error(const Matrix& analytic, const Matrix& numeric) {
  return (analytic - numeric).norm() / std::max({analytic.norm(), numeric.norm(), 1e-8});
}

GradcheckReport run_gradcheck(const GradcheckOptions& o) {
  if (o.batches < 1 || !(o.h > 0.0)) throw PreconditionError("gradcheck needs at least one batch and h > 0");
  GradcheckReport report;
  for (int i = 0; i < o.batches; ++i) {
    const auto seed = derive_seed(o.seed, {{"gradcheck", static_cast<std::uint64_t>(i)}});
    auto b = random_batch(o.n_trivial, o.n_hn, o.dim, seed);
    SeededRng rng(derive_seed(seed, {{"tau", 0}}));
    const double log_tau = rng.uniform(0.0, std::log(10.0));
    const double tau = std::exp(log_tau);

    auto g = grad_loss(b, tau, o.lambda, o.scope);
    if (o.flip_sign) {
      g.images = -g.images;
      g.texts = -g.texts;
      g.log_tau = -g.log_tau;
    }
    const auto central = [&](Matrix& m, Eigen::Index r, Eigen::Index c) {
      const double keep = m(r, c);
      m(r, c) = keep + o.h;
      const double up = loss_total(b, tau, o.lambda, o.scope);
      m(r, c) = keep - o.h;
      const double down = loss_total(b, tau, o.lambda, o.scope);
      m(r, c) = keep;
      return (up - down) / (2.0 * o.h);
    };
    Matrix num_images(b.images.rows(), b.images.cols());
    Matrix num_texts(b.texts.rows(), b.texts.cols());
    double elementwise = 0.0;
    for (Eigen::Index r = 0; r < b.images.rows(); ++r) {
      for (Eigen::Index c = 0; c < b.images.cols(); ++c) {
        num_images(r, c) = central(b.images, r, c);
        num_texts(r, c) = central(b.texts, r, c);
        elementwise = std::max({elementwise, relative_error(g.images(r, c), num_images(r, c)),
                                relative_error(g.texts(r, c), num_texts(r, c))});
      }
    }
    const double up = loss_total(b, std::exp(log_tau + o.h), o.lambda, o.scope);
    const double down = loss_total(b, std::exp(log_tau - o.h), o.lambda, o.scope);
    const double tau_err = relative_error(g.log_tau, (up - down) / (2.0 * o.h));
    const double worst =
        std::max({relative_error(g.images, num_images), relative_error(g.texts, num_texts), tau_err});
    report.max_elementwise_rel_error = std::max({report.max_elementwise_rel_error, elementwise, tau_err});

    ++report.batches;
    report.max_rel_error = std::max(report.max_rel_error, worst);
    if (!(worst <= o.tolerance)) ++report.failed_batches;
  }
  return report;
}

nlohmann::json gradcheck_to_json(const GradcheckReport& r, const GradcheckOptions& o) {
  return {{"format_version", 1},
          {"batches", r.batches},
          {"failed_batches", r.failed_batches},
          {"max_rel_error", r.max_rel_error},
          {"max_elementwise_rel_error", r.max_elementwise_rel_error},
          {"tolerance", o.tolerance},
          {"h", o.h},
          {"lambda", o.lambda},
          {"shape", {{"n_trivial", o.n_trivial}, {"n_hn", o.n_hn}, {"dim", o.dim}}},
          {"scope", o.scope == HnScope::WholeBatch ? "whole_batch" : "own_group"},
          {"passed", r.passed()}};
}

}  // namespace vlprobe
