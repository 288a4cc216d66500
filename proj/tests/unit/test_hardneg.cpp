#include <doctest.h>

#include <cmath>
#include <map>
#include <numeric>
#include <set>

#include "fixtures.hpp"
#include "vlprobe/core/error.hpp"
#include "vlprobe/core/seed.hpp"
#include "vlprobe/dataset/dataset.hpp"
#include "vlprobe/hardneg/batch.hpp"
#include "vlprobe/hardneg/gradcheck.hpp"
#include "vlprobe/hardneg/loss.hpp"

using namespace vlprobe;

namespace {

// Straight-line re-implementation from the formula text, on plain vectors.
using Vec = std::vector<double>;

double dot(const Vec& a, const Vec& b) {
  double s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double s_ref(const Vec& a, const Vec& b, double tau) {
  return std::exp(tau * dot(a, b) / (std::sqrt(dot(a, a)) * std::sqrt(dot(b, b))));
}

Vec row(const Matrix& m, int r) {
  Vec v(static_cast<std::size_t>(m.cols()));
  for (int c = 0; c < m.cols(); ++c) v[c] = m(r, c);
  return v;
}

double oracle_hn(const EmbeddingBatch& b, double tau, bool i2t) {
  const Matrix& q = i2t ? b.images : b.texts;
  const Matrix& k = i2t ? b.texts : b.images;
  const int n = static_cast<int>(q.rows());
  double total = 0;
  for (int i = 0; i < b.n_trivial; ++i) {
    double denom = 0;
    for (int j = 0; j < n; ++j) denom += s_ref(row(q, i), row(k, j), tau);
    total += -std::log(s_ref(row(q, i), row(k, i), tau) / denom);
  }
  return total;
}

double oracle_clip(const EmbeddingBatch& b, double tau) {
  double a = 0, c = 0;
  for (int i = 0; i < b.n_trivial; ++i) {
    double di = 0, dt = 0;
    for (int j = 0; j < b.n_trivial; ++j) {
      di += s_ref(row(b.images, i), row(b.texts, j), tau);
      dt += s_ref(row(b.texts, i), row(b.images, j), tau);
    }
    a += -std::log(s_ref(row(b.images, i), row(b.texts, i), tau) / di);
    c += -std::log(s_ref(row(b.texts, i), row(b.images, i), tau) / dt);
  }
  return 0.5 * (a / b.n_trivial + c / b.n_trivial);
}

EmbeddingBatch uniform_batch(int n_t, int n_hn, int d) {
  EmbeddingBatch b;
  b.images = Matrix::Constant(n_t + n_hn, d, 0.3);
  b.texts = Matrix::Constant(n_t + n_hn, d, 0.7);
  b.n_trivial = n_t;
  for (int i = 0; i < n_hn; ++i) b.hn_groups.push_back(i / 3);
  return b;
}

EmbeddingBatch take_rows(const EmbeddingBatch& b, int n_hn) {
  EmbeddingBatch o;
  o.n_trivial = b.n_trivial;
  o.images = b.images.topRows(b.n_trivial + n_hn);
  o.texts = b.texts.topRows(b.n_trivial + n_hn);
  o.hn_groups.assign(b.hn_groups.begin(), b.hn_groups.begin() + n_hn);
  o.trivial_groups = b.trivial_groups;
  return o;
}

TestCase fake_case(SubsetKind s, int index) {
  TestCase tc;
  tc.subset = s;
  tc.id = case_id(s, static_cast<std::uint64_t>(index));
  for (int i = 0; i < subset_cardinality(s); ++i) tc.images.push_back("x");
  return tc;
}

}  // namespace

TEST_CASE("similarity examples") {
  Vector a(3), b(3), c(3);
  a << 1, 0, 0;
  b << 0, 5, 0;
  c << -2, 0, 0;
  CHECK(similarity(a, a, 1.0) == doctest::Approx(std::exp(1.0)));
  CHECK(similarity(a, b, 3.0) == doctest::Approx(1.0));
  CHECK(similarity(a, c, 2.0) == doctest::Approx(std::exp(-2.0)));
  CHECK_THROWS_AS(similarity(a, Vector::Zero(3), 1.0), PreconditionError);
  CHECK_THROWS_AS(similarity(a, a, 0.0), PreconditionError);
}

TEST_CASE("uniform batches give ln(n_t + n_hn) per query") {
  for (const auto [nt, nhn] : std::vector<std::pair<int, int>>{{1, 0}, {4, 3}, {16, 9}, {64, 24}}) {
    const auto b = uniform_batch(nt, nhn, 8);
    for (const double tau : {1.0, 7.5, kDefaultTau}) {
      CHECK(std::abs(loss_hn_i2t(b, tau) / nt - std::log(nt + nhn)) <= 1e-12);
      CHECK(std::abs(loss_hn_t2i(b, tau) / nt - std::log(nt + nhn)) <= 1e-12);
      CHECK(std::abs(loss_clip(b, tau) - std::log(nt)) <= 1e-12);
    }
  }
}

TEST_CASE("a single pair without hard negatives has zero loss") {
  const auto b = random_batch(1, 0, 5, 3);
  CHECK(loss_hn_i2t(b, 10.0) == 0.0);
  CHECK(loss_hn_t2i(b, 10.0) == 0.0);
  CHECK(loss_clip(b, 10.0) == 0.0);
}

TEST_CASE("losses match the straight-line oracle") {
  for (std::uint64_t s = 0; s < 20; ++s) {
    const auto b = random_batch(8, 4, 16, s);
    for (const double tau : {0.5, 3.0, 20.0}) {
      CHECK(loss_hn_i2t(b, tau) == doctest::Approx(oracle_hn(b, tau, true)).epsilon(1e-12));
      CHECK(loss_hn_t2i(b, tau) == doctest::Approx(oracle_hn(b, tau, false)).epsilon(1e-12));
      CHECK(loss_clip(b, tau) == doctest::Approx(oracle_clip(b, tau)).epsilon(1e-12));
      const double total = oracle_clip(b, tau) + 0.2 * (oracle_hn(b, tau, true) + oracle_hn(b, tau, false));
      CHECK(loss_total(b, tau, 0.2) == doctest::Approx(total).epsilon(1e-12));
    }
  }
}

TEST_CASE("lambda zero is the plain contrastive loss bit for bit") {
  for (std::uint64_t s = 0; s < 50; ++s) {
    const auto b = random_batch(6, 6, 8, s);
    CHECK(loss_total(b, 13.0, 0.0) == loss_clip(b, 13.0));
    CHECK(grad_loss(b, 13.0, 0.0).loss == loss_clip(b, 13.0));
  }
  CHECK_THROWS_AS(loss_total(random_batch(2, 0, 3, 1), 1.0, -0.1), PreconditionError);
}

TEST_CASE("the gap to lambda zero is linear in lambda") {
  const auto b = random_batch(8, 6, 8, 42);
  const double base = loss_total(b, 4.0, 0.0);
  const double g1 = loss_total(b, 4.0, 0.2) - base;
  const double g2 = loss_total(b, 4.0, 0.4) - base;
  CHECK(g2 == doctest::Approx(2 * g1).epsilon(1e-12));
}

TEST_CASE("adding a hard negative never decreases the loss") {
  for (std::uint64_t s = 0; s < 200; ++s) {
    const auto full = random_batch(5, 9, 6, s);
    double prev_i = -1, prev_t = -1, prev_total = -1;
    for (int k = 0; k <= 9; ++k) {
      const auto b = take_rows(full, k);
      const double li = loss_hn_i2t(b, 9.0), lt = loss_hn_t2i(b, 9.0), tot = loss_total(b, 9.0, 0.2);
      CHECK(li >= prev_i);
      CHECK(lt >= prev_t);
      CHECK(tot >= prev_total);
      prev_i = li;
      prev_t = lt;
      prev_total = tot;
    }
  }
}

TEST_CASE("losses are permutation and scale invariant") {
  const auto b = random_batch(7, 6, 8, 9);
  const double tau = 6.0;
  EmbeddingBatch p = b;
  const std::vector<int> perm_t{3, 0, 6, 1, 5, 2, 4};
  const std::vector<int> perm_h{2, 5, 0, 4, 1, 3};
  for (int i = 0; i < 7; ++i) {
    p.images.row(i) = b.images.row(perm_t[i]);
    p.texts.row(i) = b.texts.row(perm_t[i]);
  }
  for (int i = 0; i < 6; ++i) {
    p.images.row(7 + i) = b.images.row(7 + perm_h[i]);
    p.texts.row(7 + i) = b.texts.row(7 + perm_h[i]);
    p.hn_groups[i] = b.hn_groups[perm_h[i]];
  }
  CHECK(loss_total(p, tau, 0.2) == doctest::Approx(loss_total(b, tau, 0.2)).epsilon(1e-13));
  CHECK(loss_hn_i2t(p, tau) == doctest::Approx(loss_hn_i2t(b, tau)).epsilon(1e-13));

  EmbeddingBatch s = b;
  s.images.row(2) *= 17.5;
  s.texts.row(9) *= 0.003;
  CHECK(loss_total(s, tau, 0.2) == doctest::Approx(loss_total(b, tau, 0.2)).epsilon(1e-13));
  CHECK(loss_hn_t2i(s, tau) == doctest::Approx(loss_hn_t2i(b, tau)).epsilon(1e-13));
}

TEST_CASE("own-group scope only sees the query's candidate set") {
  auto b = random_batch(4, 6, 8, 5);
  b.hn_groups = {0, 0, 0, 1, 1, 1};
  b.trivial_groups = {0, 1, -1, -1};
  CHECK(loss_hn_i2t(b, 3.0, HnScope::OwnGroup) < loss_hn_i2t(b, 3.0, HnScope::WholeBatch));
  const auto none = take_rows(b, 0);
  double expected = 0;
  {
    // Queries 2 and 3 have no group: their terms match the no-hard-negative batch.
    auto solo = b;
    solo.trivial_groups = {-1, -1, -1, -1};
    expected = loss_hn_i2t(none, 3.0);
    CHECK(loss_hn_i2t(solo, 3.0, HnScope::OwnGroup) == doctest::Approx(expected));
  }
}

TEST_CASE("analytic gradients match central differences") {
  GradcheckOptions o;
  const auto r = run_gradcheck(o);
  CHECK(r.batches == 100);
  CHECK(r.passed());
  CHECK(r.max_rel_error <= 1e-5);
  CHECK(r.max_elementwise_rel_error >= r.max_rel_error);
  o.lambda = 0.0;
  CHECK(run_gradcheck(o).passed());
  o.lambda = 0.2;
  o.scope = HnScope::OwnGroup;
  CHECK(run_gradcheck(o).passed());
}

TEST_CASE("a sign-flipped gradient fails the check") {
  GradcheckOptions o;
  o.batches = 10;
  o.flip_sign = true;
  const auto r = run_gradcheck(o);
  CHECK_FALSE(r.passed());
  CHECK(r.failed_batches == 10);
  CHECK(gradcheck_to_json(r, o)["passed"] == false);
}

TEST_CASE("relative error") {
  Matrix a(1, 2), n(1, 2);
  a << 3, 4;
  n << 3, 4.5;
  CHECK(relative_error(a, n) == doctest::Approx(0.5 / std::sqrt(29.25)));
  CHECK(relative_error(1.0, 1.0) == 0.0);
  CHECK(relative_error(2.0, 1.0) == doctest::Approx(0.5));
  CHECK(relative_error(0.0, 1e-10) == doctest::Approx(1e-2));
}

TEST_CASE("log tau gradient vanishes at lambda zero on uniform batches") {
  const auto b = uniform_batch(5, 3, 4);
  CHECK(std::abs(grad_loss(b, 2.0, 0.0).log_tau) < 1e-12);
}

TEST_CASE("gradients shrink as margins grow") {
  // Orthonormal rows: every trivial pair is the unique argmax and scaling tau
  // scales every logit margin.
  EmbeddingBatch b;
  b.n_trivial = 6;
  b.images = Matrix::Identity(9, 9);
  b.texts = Matrix::Identity(9, 9);
  b.hn_groups = {0, 0, 0};
  double prev = INFINITY;
  for (const double tau : {2.0, 3.0, 5.0, 8.0, 13.0, 21.0, 34.0}) {
    const auto g = grad_loss(b, tau, 0.2);
    const double norm = std::sqrt(g.images.squaredNorm() + g.texts.squaredNorm());
    CHECK(norm > 0.0);
    CHECK(norm < prev);
    prev = norm;
  }
}

TEST_CASE("batch validation") {
  auto b = random_batch(3, 3, 4, 1);
  b.texts.row(4).setZero();
  CHECK_THROWS_AS(validate_batch(b), PreconditionError);
  b = random_batch(3, 3, 4, 1);
  b.texts = b.texts.topRows(5).eval();
  CHECK_THROWS_AS(validate_batch(b), PreconditionError);
  b = random_batch(3, 3, 4, 1);
  b.n_trivial = 0;
  CHECK_THROWS_AS(loss_hn_i2t(b, 1.0), PreconditionError);
}

TEST_CASE("hard-negative batches take whole candidate sets") {
  std::vector<TestCase> count_cases;
  for (int i = 0; i < 5; ++i) count_cases.push_back(fake_case(SubsetKind::Count, i));
  const auto one = build_hn_batch(count_cases, 100, 10, 9, 3);
  REQUIRE(one.hard_negatives.size() == 9);
  for (int k = 0; k < 9; ++k) {
    CHECK(one.hard_negatives[k].case_id == one.hard_negatives[0].case_id);
    CHECK(one.hard_negatives[k].index == k);
  }
  CHECK(one.trivial.size() == 10);
  std::set<std::size_t> distinct(one.trivial.begin(), one.trivial.end());
  CHECK(distinct.size() == 10);
  CHECK(build_hn_batch(count_cases, 100, 10, 9, 3) == one);
  CHECK_FALSE(build_hn_batch(count_cases, 100, 10, 9, 4) == one);

  std::vector<TestCase> mixed;
  int idx = 0;
  for (int r = 0; r < 40; ++r) {
    for (const auto s : kAllSubsets) mixed.push_back(fake_case(s, idx++));
  }
  const auto spec = build_hn_batch(mixed, 5000, 2048, 768, 11);
  CHECK(spec.hard_negatives.size() == 768);
  std::map<int, std::vector<HnItem>> groups;
  for (const auto& h : spec.hard_negatives) groups[h.group].push_back(h);
  std::size_t total = 0;
  for (const auto& [g, items] : groups) {
    const auto& id = items[0].case_id;
    const auto it = std::find_if(mixed.begin(), mixed.end(), [&](const TestCase& t) { return t.id == id; });
    REQUIRE(it != mixed.end());
    CHECK(items.size() == static_cast<std::size_t>(it->k()));
    total += items.size();
  }
  CHECK(total == 768);
  CHECK(batch_spec_from_json(batch_spec_to_json(spec)) == spec);

  CHECK_THROWS_AS(build_hn_batch(count_cases, 100, 10, 50, 1), InfeasibleError);
  CHECK_THROWS_AS(build_hn_batch(count_cases, 5, 10, 9, 1), InfeasibleError);
}

TEST_CASE("matrix files round trip at float precision") {
  fixtures::TempDir dir("matrix");
  Matrix m(3, 4);
  m << 1, -2, 3.25, 0, 1e-3, 5, 6, 7, -8, 9, 10, 1.0 / 3;
  write_matrix(dir.path / "m.bin", m);
  const auto r = read_matrix(dir.path / "m.bin");
  REQUIRE(r.rows() == 3);
  REQUIRE(r.cols() == 4);
  CHECK((r - m.cast<float>().cast<double>()).norm() == 0.0);
  CHECK(std::filesystem::file_size(dir.path / "m.bin") == 8 + 12 * 4);
  std::filesystem::resize_file(dir.path / "m.bin", 20);
  CHECK_THROWS_AS(read_matrix(dir.path / "m.bin"), ValidationError);
}
