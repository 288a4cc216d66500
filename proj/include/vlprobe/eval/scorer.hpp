#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "vlprobe/backends/backend.hpp"
#include "vlprobe/dataset/dataset.hpp"

namespace vlprobe {

/// K x K similarity scores of one case; rows are images, columns texts.
using ScoreMatrix = std::vector<std::vector<double>>;

/// One CLS query: an image and one of the categories visible in it, or the
/// whole image when `slot` is kWholeImage.
struct ClsQuery {
  static constexpr int kWholeImage = -1;
  int image = 0;
  int slot = 0;  // index into TestCase::categories
};

/// Source of image-text similarities. Scores must be positive and finite and
/// deterministic for a given (case, image, text). Implementations are called
/// from several threads at once.
class Scorer {
 public:
  virtual ~Scorer() = default;
  virtual std::string name() const = 0;
  virtual ScoreMatrix match_scores(const TestCase& tc) = 0;
  /// Scores of the query's region against each class prompt. Prompt c
  /// names vocabulary category c.
  virtual std::vector<double> class_scores(const TestCase& tc, const ClsQuery& q,
                                           std::span<const std::string> prompts) = 0;
};

/// Uniform scores keyed by a hash of (seed, case id, image, text).
class RandomScorer final : public Scorer {
 public:
  explicit RandomScorer(std::uint64_t seed) : seed_(seed) {}
  std::string name() const override { return "random"; }
  ScoreMatrix match_scores(const TestCase& tc) override;
  std::vector<double> class_scores(const TestCase& tc, const ClsQuery& q, std::span<const std::string> prompts) override;

 private:
  std::uint64_t seed_;
};

/// Ground truth: 2 for the matching pair or true class, 1 otherwise.
class OracleScorer final : public Scorer {
 public:
  std::string name() const override { return "oracle"; }
  ScoreMatrix match_scores(const TestCase& tc) override;
  std::vector<double> class_scores(const TestCase& tc, const ClsQuery& q, std::span<const std::string> prompts) override;
};

/// Precomputed scores loaded from JSON:
///   {"format_version": 1, "scorer": name,
///    "cases": {"<case id>": {"match": [[...]], "cls": {"<image>/<slot>" or "<image>": [80 scores]}}}}
/// Missing entries raise ConfigError naming the case id.
class TableScorer final : public Scorer {
 public:
  explicit TableScorer(nlohmann::json table);
  static TableScorer load(const std::filesystem::path& path);
  std::string name() const override { return name_; }
  ScoreMatrix match_scores(const TestCase& tc) override;
  std::vector<double> class_scores(const TestCase& tc, const ClsQuery& q, std::span<const std::string> prompts) override;

 private:
  const nlohmann::json& entry(const TestCase& tc) const;
  nlohmann::json table_;
  std::string name_;
};

/// exp(cosine) of backend embeddings. Images are read from the dataset root;
/// CLS queries on two-object images embed the object's crop.
class EmbeddingScorer final : public Scorer {
 public:
  EmbeddingScorer(Backend& backend, std::filesystem::path root) : backend_(backend), root_(std::move(root)) {}
  std::string name() const override { return "embedding:" + backend_.name(); }
  ScoreMatrix match_scores(const TestCase& tc) override;
  std::vector<double> class_scores(const TestCase& tc, const ClsQuery& q, std::span<const std::string> prompts) override;

 private:
  std::vector<Embedding> embed_items(std::span<const EmbedItem> items);
  Backend& backend_;
  std::filesystem::path root_;
  std::mutex mutex_;
  std::vector<Embedding> prompt_cache_;  // guarded by mutex_
  std::vector<std::string> cached_prompts_;
};

/// Writes a score table in the TableScorer format by querying another scorer.
nlohmann::json dump_score_table(Scorer& scorer, std::span<const TestCase> cases, std::span<const std::string> prompts);

}  // namespace vlprobe
