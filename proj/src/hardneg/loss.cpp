#include "vlprobe/hardneg/loss.hpp"

#include <cmath>
#include <string>

#include "vlprobe/core/error.hpp"

namespace vlprobe {

void validate_batch(const EmbeddingBatch& b) {
  if (b.n_trivial < 1) throw PreconditionError("batch has no trivial pairs");
  if (b.images.rows() != b.texts.rows() || b.images.cols() != b.texts.cols()) {
    throw PreconditionError("image and text embeddings differ in shape");
  }
  if (b.images.rows() < b.n_trivial) throw PreconditionError("fewer rows than trivial pairs");
  if (static_cast<int>(b.hn_groups.size()) != b.n_hn()) throw PreconditionError("one group tag per hard negative is required");
  if (!b.trivial_groups.empty() && static_cast<int>(b.trivial_groups.size()) != b.n_trivial) {
    throw PreconditionError("trivial group tags must cover every trivial pair");
  }
  for (Eigen::Index r = 0; r < b.images.rows(); ++r) {
    if (b.images.row(r).norm() == 0.0 || b.texts.row(r).norm() == 0.0) {
      throw PreconditionError("zero-norm embedding in row " + std::to_string(r));
    }
  }
}

double similarity(const Vector& a, const Vector& b, double tau) {
  if (a.size() != b.size()) throw PreconditionError("embedding dimensions differ");
  if (!(tau > 0.0)) throw PreconditionError("temperature must be positive");
  const double na = a.norm(), nb = b.norm();
  if (na == 0.0 || nb == 0.0) throw PreconditionError("similarity of a zero vector");
  return std::exp(tau * a.dot(b) / (na * nb));
}

namespace {

Matrix normalized(const Matrix& m) { return m.rowwise().normalized(); }

// Cosine blocks of one batch.
struct Cosines {
  Matrix it, ih, hi;  // trivial images x trivial texts, trivial images x hn texts, hn images x trivial texts
  Matrix ti, th, hi_img, hh_txt;  // normalized rows: trivial images, trivial texts, hn images, hn texts
};

Cosines cosines(const EmbeddingBatch& b) {
  validate_batch(b);
  const auto n = b.n_trivial, h = b.n_hn();
  Cosines c;
  const Matrix img = normalized(b.images), txt = normalized(b.texts);
  c.ti = img.topRows(n);
  c.th = txt.topRows(n);
  c.hi_img = img.bottomRows(h);
  c.hh_txt = txt.bottomRows(h);
  c.it = c.ti * c.th.transpose();
  c.ih = c.ti * c.hh_txt.transpose();
  c.hi = c.hi_img * c.th.transpose();
  return c;
}

bool in_scope(const EmbeddingBatch& b, HnScope scope, int query, int hn) {
  if (scope == HnScope::WholeBatch) return true;
  if (b.trivial_groups.empty()) return false;
  const int g = b.trivial_groups[static_cast<std::size_t>(query)];
  return g >= 0 && g == b.hn_groups[static_cast<std::size_t>(hn)];
}

// Cross entropy of one query: the positive logit against `trivial` logits and
// the in-scope hard-negative logits. Writes d/dlogit into the output rows.
double query_loss(const Eigen::Ref<const Vector>& trivial, const Eigen::Ref<const Vector>& hn,
                  const std::vector<bool>& hn_mask, int positive, double tau, Vector* d_trivial, Vector* d_hn) {
  double m = tau * trivial.maxCoeff();
  for (Eigen::Index k = 0; k < hn.size(); ++k) {
    if (hn_mask[static_cast<std::size_t>(k)]) m = std::max(m, tau * hn[k]);
  }
  double z = 0.0;
  for (Eigen::Index j = 0; j < trivial.size(); ++j) z += std::exp(tau * trivial[j] - m);
  for (Eigen::Index k = 0; k < hn.size(); ++k) {
    if (hn_mask[static_cast<std::size_t>(k)]) z += std::exp(tau * hn[k] - m);
  }
  const double lse = m + std::log(z);
  if (d_trivial) {
    *d_trivial = (tau * trivial.array() - lse).exp().matrix();
    (*d_trivial)[positive] -= 1.0;
  }
  if (d_hn) {
    d_hn->resize(hn.size());
    for (Eigen::Index k = 0; k < hn.size(); ++k) {
      (*d_hn)[k] = hn_mask[static_cast<std::size_t>(k)] ? std::exp(tau * hn[k] - lse) : 0.0;
    }
  }
  return lse - tau * trivial[positive];
}

struct Accumulated {
  double clip = 0.0, hn_i2t = 0.0, hn_t2i = 0.0;
  // d loss / d logit, split by cosine block, already weighted.
  Matrix g_it, g_ih, g_hi;
};

enum Terms : unsigned { kClip = 1, kHnI2t = 2, kHnT2i = 4 };

Accumulated accumulate(const EmbeddingBatch& b, const Cosines& c, double tau, double lambda, HnScope scope,
                       unsigned terms, bool want_grad) {
  const int n = b.n_trivial, h = b.n_hn();
  Accumulated a;
  if (want_grad) {
    a.g_it = Matrix::Zero(n, n);
    a.g_ih = Matrix::Zero(n, h);
    a.g_hi = Matrix::Zero(h, n);
  }
  const Vector none(0);
  const std::vector<bool> no_mask;
  Vector dt, dh;
  for (int i = 0; i < n; ++i) {
    std::vector<bool> mask(static_cast<std::size_t>(h));
    for (int k = 0; k < h; ++k) mask[static_cast<std::size_t>(k)] = in_scope(b, scope, i, k);
    const Vector row = c.it.row(i).transpose();
    const Vector col = c.it.col(i);
    if (terms & kClip) {
      a.clip += 0.5 / n * query_loss(row, none, no_mask, i, tau, want_grad ? &dt : nullptr, nullptr);
      if (want_grad) a.g_it.row(i) += 0.5 / n * dt.transpose();
      a.clip += 0.5 / n * query_loss(col, none, no_mask, i, tau, want_grad ? &dt : nullptr, nullptr);
      if (want_grad) a.g_it.col(i) += 0.5 / n * dt;
    }
    if (terms & kHnI2t) {
      const Vector hn = c.ih.row(i).transpose();
      a.hn_i2t += query_loss(row, hn, mask, i, tau, want_grad ? &dt : nullptr, want_grad ? &dh : nullptr);
      if (want_grad) {
        a.g_it.row(i) += lambda * dt.transpose();
        a.g_ih.row(i) += lambda * dh.transpose();
      }
    }
    if (terms & kHnT2i) {
      const Vector hn = c.hi.col(i);
      a.hn_t2i += query_loss(col, hn, mask, i, tau, want_grad ? &dt : nullptr, want_grad ? &dh : nullptr);
      if (want_grad) {
        a.g_it.col(i) += lambda * dt;
        a.g_hi.col(i) += lambda * dh;
      }
    }
  }
  return a;
}

void check_tau(double tau) {
  if (!(tau > 0.0) || !std::isfinite(tau)) throw PreconditionError("temperature must be positive and finite");
}

void check_lambda(double lambda) {
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) throw PreconditionError("lambda must be non-negative");
}

// Gradient of the rows of `raw` given the gradient with respect to their normalized versions.
Matrix through_normalization(const Matrix& raw, const Matrix& unit, const Matrix& g_unit) {
  Matrix out(raw.rows(), raw.cols());
  for (Eigen::Index r = 0; r < raw.rows(); ++r) {
    const double norm = raw.row(r).norm();
    const double along = unit.row(r).dot(g_unit.row(r));
    out.row(r) = (g_unit.row(r) - along * unit.row(r)) / norm;
  }
  return out;
}

}  // namespace

double loss_hn_i2t(const EmbeddingBatch& b, double tau, HnScope scope) {
  check_tau(tau);
  return accumulate(b, cosines(b), tau, 1.0, scope, kHnI2t, false).hn_i2t;
}

double loss_hn_t2i(const EmbeddingBatch& b, double tau, HnScope scope) {
  check_tau(tau);
  return accumulate(b, cosines(b), tau, 1.0, scope, kHnT2i, false).hn_t2i;
}

double loss_clip(const EmbeddingBatch& b, double tau) {
  check_tau(tau);
  return accumulate(b, cosines(b), tau, 0.0, HnScope::WholeBatch, kClip, false).clip;
}

double loss_total(const EmbeddingBatch& b, double tau, double lambda, HnScope scope) {
  check_tau(tau);
  check_lambda(lambda);
  const unsigned terms = lambda == 0.0 ? kClip : (kClip | kHnI2t | kHnT2i);
  const auto a = accumulate(b, cosines(b), tau, lambda, scope, terms, false);
  if (lambda == 0.0) return a.clip;
  return a.clip + lambda * (a.hn_i2t + a.hn_t2i);
}

LossGradient grad_loss(const EmbeddingBatch& b, double tau, double lambda, HnScope scope) {
  check_tau(tau);
  check_lambda(lambda);
  const auto c = cosines(b);
  const unsigned terms = lambda == 0.0 ? kClip : (kClip | kHnI2t | kHnT2i);
  const auto a = accumulate(b, c, tau, lambda, scope, terms, true);

  LossGradient g;
  g.loss = lambda == 0.0 ? a.clip : a.clip + lambda * (a.hn_i2t + a.hn_t2i);
  // Logits are tau * cosine, so d/dlog(tau) = sum(dL/dlogit * logit).
  g.log_tau = tau * ((a.g_it.array() * c.it.array()).sum() + (a.g_ih.array() * c.ih.array()).sum() +
                     (a.g_hi.array() * c.hi.array()).sum());
  const Matrix s_it = tau * a.g_it, s_ih = tau * a.g_ih, s_hi = tau * a.g_hi;
  const Matrix g_ti = s_it * c.th + s_ih * c.hh_txt;
  const Matrix g_th = s_it.transpose() * c.ti + s_hi.transpose() * c.hi_img;
  const Matrix g_hi = s_hi * c.th;
  const Matrix g_hh = s_ih.transpose() * c.ti;

  const int n = b.n_trivial, h = b.n_hn();
  g.images.resize(b.images.rows(), b.images.cols());
  g.texts.resize(b.texts.rows(), b.texts.cols());
  g.images.topRows(n) = through_normalization(b.images.topRows(n), c.ti, g_ti);
  g.texts.topRows(n) = through_normalization(b.texts.topRows(n), c.th, g_th);
  if (h > 0) {
    g.images.bottomRows(h) = through_normalization(b.images.bottomRows(h), c.hi_img, g_hi);
    g.texts.bottomRows(h) = through_normalization(b.texts.bottomRows(h), c.hh_txt, g_hh);
  }
  return g;
}

}  // namespace vlprobe
