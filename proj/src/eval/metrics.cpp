#include "vlprobe/eval/metrics.hpp"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <exception>
#include <thread>

#include "vlprobe/core/error.hpp"
#include "vlprobe/semantics/vocabulary.hpp"

namespace vlprobe {

std::vector<std::string> class_prompts() {
  std::vector<std::string> out;
  for (const auto& c : coco_categories()) out.push_back("a photo of a " + c);
  return out;
}

double chance_level(SubsetKind subset, Metric metric) {
  if (metric == Metric::Cls) return 1.0 / static_cast<double>(coco_categories().size());
  return 1.0 / subset_cardinality(subset);
}

namespace {

void check_matrix(const ScoreMatrix& m) {
  for (const auto& row : m) {
    if (row.size() != m.size()) throw PreconditionError("score matrix is not square");
  }
}

// Outcome of one query whose correct answer is `truth`.
RowOutcome strict_argmax(std::span<const double> scores, std::size_t truth) {
  const double best = *std::max_element(scores.begin(), scores.end());
  if (scores[truth] < best) return {0, 0};
  const auto at_best = std::count(scores.begin(), scores.end(), best);
  return at_best == 1 ? RowOutcome{1, 0} : RowOutcome{0, 1};
}

}  // namespace

RowOutcome i2t_outcome(const ScoreMatrix& m) {
  check_matrix(m);
  RowOutcome out;
  for (std::size_t i = 0; i < m.size(); ++i) {
    const auto r = strict_argmax(m[i], i);
    out.correct += r.correct;
    out.ties += r.ties;
  }
  return out;
}

RowOutcome t2i_outcome(const ScoreMatrix& m) {
  check_matrix(m);
  RowOutcome out;
  std::vector<double> col(m.size());
  for (std::size_t j = 0; j < m.size(); ++j) {
    for (std::size_t i = 0; i < m.size(); ++i) col[i] = m[i][j];
    const auto r = strict_argmax(col, j);
    out.correct += r.correct;
    out.ties += r.ties;
  }
  return out;
}

namespace {

struct CaseOutcome {
  RowOutcome i2t, t2i, cls;
  int k = 0;
  int cls_queries = 0;
};

CaseOutcome score_case(const TestCase& tc, Scorer& scorer, const EvalOptions& opts,
                       std::span<const std::string> prompts) {
  CaseOutcome out;
  const auto m = scorer.match_scores(tc);
  if (m.size() != static_cast<std::size_t>(tc.k())) throw PreconditionError("scorer returned a matrix of the wrong size");
  out.k = tc.k();
  out.i2t = i2t_outcome(m);
  out.t2i = t2i_outcome(m);
  if (!opts.with_cls) return out;
  for (int i = 0; i < tc.k(); ++i) {
    const auto present = tc.categories_in(i);
    if (present.empty()) continue;
    if (opts.cls_rule == ClsRule::PerObject) {
      for (std::size_t slot = 0; slot < present.size(); ++slot) {
        const auto s = scorer.class_scores(tc, {i, static_cast<int>(slot)}, prompts);
        if (s.size() != prompts.size()) throw PreconditionError("scorer returned the wrong number of class scores");
        const auto r = strict_argmax(s, static_cast<std::size_t>(category_index(present[slot])));
        out.cls.correct += r.correct;
        out.cls.ties += r.ties;
        ++out.cls_queries;
      }
    } else {
      const auto s = scorer.class_scores(tc, {i, ClsQuery::kWholeImage}, prompts);
      if (s.size() != prompts.size()) throw PreconditionError("scorer returned the wrong number of class scores");
      const double best = *std::max_element(s.begin(), s.end());
      bool all_true = true;
      int at_best = 0;
      for (std::size_t c = 0; c < s.size(); ++c) {
        if (s[c] != best) continue;
        ++at_best;
        const bool is_true = std::any_of(present.begin(), present.end(),
                                         [&](const std::string& p) { return category_index(p) == static_cast<int>(c); });
        all_true = all_true && is_true;
      }
      out.cls.correct += all_true ? 1 : 0;
      out.cls.ties += (!all_true && at_best > 1) ? 1 : 0;
      ++out.cls_queries;
    }
  }
  return out;
}

[[noreturn]] void rethrow_for_case(const std::string& id) {
  const auto prefix = "case " + id + ": ";
  try {
    throw;
  } catch (const TransportError& e) {
    throw TransportError(prefix + e.what(), std::nullopt, e.code());
  } catch (const BackendError& e) {
    throw BackendError(prefix + e.what(), std::nullopt, e.code());
  } catch (const ConfigError& e) {
    throw ConfigError(prefix + e.what());
  } catch (const ValidationError& e) {
    throw ValidationError(prefix + e.what());
  } catch (const PreconditionError& e) {
    throw PreconditionError(prefix + e.what());
  } catch (const std::exception& e) {
    throw Error(prefix + e.what());
  }
}

}  // namespace

EvalReport evaluate(std::span<const TestCase> cases, Scorer& scorer, const EvalOptions& opts) {
  const auto prompts = class_prompts();
  std::vector<CaseOutcome> outcomes(cases.size());
  std::vector<std::exception_ptr> errors(cases.size());
  std::atomic<std::size_t> next{0};
  const auto worker = [&] {
    for (auto i = next++; i < cases.size(); i = next++) {
      try {
        try {
          outcomes[i] = score_case(cases[i], scorer, opts, prompts);
        } catch (...) {
          rethrow_for_case(cases[i].id);
        }
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const int jobs = std::max(1, std::min<int>(opts.jobs, static_cast<int>(cases.size())));
  if (jobs == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (int j = 0; j < jobs; ++j) pool.emplace_back(worker);
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }

  EvalReport r;
  r.scorer = scorer.name();
  r.cls_rule = opts.cls_rule;
  r.with_cls = opts.with_cls;
  std::map<SubsetKind, std::size_t> cls_cases;
  for (std::size_t i = 0; i < cases.size(); ++i) {
    const auto& o = outcomes[i];
    auto& s = r.subsets[cases[i].subset];
    ++s.cases;
    s.i2t.accuracy += static_cast<double>(o.i2t.correct) / o.k;
    s.i2t.queries += static_cast<std::size_t>(o.k);
    s.i2t.ties += static_cast<std::size_t>(o.i2t.ties);
    s.t2i.accuracy += static_cast<double>(o.t2i.correct) / o.k;
    s.t2i.queries += static_cast<std::size_t>(o.k);
    s.t2i.ties += static_cast<std::size_t>(o.t2i.ties);
    if (o.cls_queries > 0) {
      s.cls.accuracy += static_cast<double>(o.cls.correct) / o.cls_queries;
      s.cls.queries += static_cast<std::size_t>(o.cls_queries);
      s.cls.ties += static_cast<std::size_t>(o.cls.ties);
      ++cls_cases[cases[i].subset];
    }
  }
  for (auto& [subset, s] : r.subsets) {
    s.i2t.accuracy /= static_cast<double>(s.cases);
    s.t2i.accuracy /= static_cast<double>(s.cases);
    if (cls_cases[subset] > 0) s.cls.accuracy /= static_cast<double>(cls_cases[subset]);
  }
  return r;
}

namespace {

double overall(const EvalReport& r, MetricSummary SubsetResult::*field) {
  double sum = 0.0;
  std::size_t n = 0;
  for (const auto& [subset, s] : r.subsets) {
    sum += (s.*field).accuracy * static_cast<double>(s.cases);
    n += s.cases;
  }
  return n == 0 ? 0.0 : sum / static_cast<double>(n);
}

}  // namespace

double i2t_acc(std::span<const TestCase> cases, Scorer& scorer) {
  return overall(evaluate(cases, scorer, {.with_cls = false}), &SubsetResult::i2t);
}

double t2i_acc(std::span<const TestCase> cases, Scorer& scorer) {
  return overall(evaluate(cases, scorer, {.with_cls = false}), &SubsetResult::t2i);
}

double cls_acc(std::span<const TestCase> cases, Scorer& scorer, std::span<const std::string> prompts, ClsRule rule) {
  const auto& vocab = coco_categories();
  if (prompts.size() != vocab.size()) {
    const auto missing = prompts.size() < vocab.size() ? vocab[prompts.size()] : std::string("(extra prompts)");
    throw PreconditionError("missing class prompt for category " + missing);
  }
  const auto r = evaluate(cases, scorer, {.with_cls = true, .cls_rule = rule});
  return overall(r, &SubsetResult::cls);
}

namespace {

nlohmann::json summary_json(const MetricSummary& m) {
  return {{"accuracy", m.accuracy}, {"queries", m.queries}, {"ties", m.ties}};
}

}  // namespace

nlohmann::json report_to_json(const EvalReport& r) {
  nlohmann::json subsets = nlohmann::json::object();
  for (const auto& [subset, s] : r.subsets) {
    nlohmann::json j = {{"cases", s.cases}, {"i2t", summary_json(s.i2t)}, {"t2i", summary_json(s.t2i)}};
    if (r.with_cls) j["cls"] = summary_json(s.cls);
    subsets[std::string(to_string(subset))] = std::move(j);
  }
  return {{"format_version", 1},
          {"scorer", r.scorer},
          {"dataset_sha256", r.dataset_sha256},
          {"cls_rule", r.cls_rule == ClsRule::PerObject ? "per_object" : "either_category"},
          {"subsets", subsets}};
}

std::string summary_table(const EvalReport& r) {
  std::string out;
  char line[160];
  std::snprintf(line, sizeof line, "%-18s %8s %8s %8s %8s\n", "subset", "cases", "i2t", "t2i", "cls");
  out += line;
  for (const auto& [subset, s] : r.subsets) {
    char cls[16] = "-";
    if (r.with_cls) std::snprintf(cls, sizeof cls, "%.1f", 100.0 * s.cls.accuracy);
    std::snprintf(line, sizeof line, "%-18s %8zu %8.1f %8.1f %8s\n", std::string(to_string(subset)).c_str(), s.cases,
                  100.0 * s.i2t.accuracy, 100.0 * s.t2i.accuracy, cls);
    out += line;
  }
  return out;
}

}  // namespace vlprobe
