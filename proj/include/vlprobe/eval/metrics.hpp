#pragma once

#include <cstddef>
#include <map>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "vlprobe/dataset/dataset.hpp"
#include "vlprobe/eval/scorer.hpp"

namespace vlprobe {

enum class Metric { I2T, T2I, Cls };

/// How CLS treats images with two categories.
enum class ClsRule {
  PerObject,      // one query per visible category, on that object's region
  EitherCategory  // one query per image; correct when the top class is any visible category
};

/// "a photo of a {class name}" for every vocabulary entry.
std::vector<std::string> class_prompts();

/// 1/K for the matching metrics, 1/80 for CLS.
double chance_level(SubsetKind subset, Metric metric);

struct RowOutcome {
  int correct = 0;
  int ties = 0;
};

/// Indicator sums over rows (i2t) or columns (t2i) of one matrix; a tie at
/// the maximum counts as a failure.
RowOutcome i2t_outcome(const ScoreMatrix& m);
RowOutcome t2i_outcome(const ScoreMatrix& m);

struct MetricSummary {
  double accuracy = 0.0;
  std::size_t queries = 0;
  std::size_t ties = 0;
};

struct SubsetResult {
  std::size_t cases = 0;
  MetricSummary i2t;
  MetricSummary t2i;
  MetricSummary cls;
};

struct EvalOptions {
  bool with_cls = true;
  ClsRule cls_rule = ClsRule::PerObject;
  int jobs = 1;
};

struct EvalReport {
  std::string scorer;
  std::string dataset_sha256;
  ClsRule cls_rule = ClsRule::PerObject;
  bool with_cls = true;
  std::map<SubsetKind, SubsetResult> subsets;
};

/// Scores every case once and aggregates per subset: per-case mean over
/// queries, then mean over cases. Scorer failures are rethrown with the
/// case id prepended.
EvalReport evaluate(std::span<const TestCase> cases, Scorer& scorer, const EvalOptions& opts = {});

double i2t_acc(std::span<const TestCase> cases, Scorer& scorer);
double t2i_acc(std::span<const TestCase> cases, Scorer& scorer);
double cls_acc(std::span<const TestCase> cases, Scorer& scorer, std::span<const std::string> prompts,
               ClsRule rule = ClsRule::PerObject);

nlohmann::json report_to_json(const EvalReport& r);
/// One row per subset with i2t / t2i / cls in percent.
std::string summary_table(const EvalReport& r);

}  // namespace vlprobe
