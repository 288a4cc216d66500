#include "vlprobe/eval/scorer.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "vlprobe/core/error.hpp"
#include "vlprobe/core/png_io.hpp"
#include "vlprobe/core/seed.hpp"
#include "vlprobe/semantics/vocabulary.hpp"

namespace vlprobe {

namespace {

double unit_score(std::uint64_t h) {
  return 1.0 + static_cast<double>(mix64(h) >> 11) * 0x1.0p-53;
}

ScoreMatrix square(int k, double fill) {
  return ScoreMatrix(static_cast<std::size_t>(k), std::vector<double>(static_cast<std::size_t>(k), fill));
}

void check_query(const TestCase& tc, const ClsQuery& q) {
  if (q.image < 0 || q.image >= tc.k()) throw PreconditionError(tc.id + ": CLS query image out of range");
  if (q.slot < ClsQuery::kWholeImage || q.slot >= static_cast<int>(tc.categories.size())) {
    throw PreconditionError(tc.id + ": CLS query slot out of range");
  }
}

}  // namespace

ScoreMatrix RandomScorer::match_scores(const TestCase& tc) {
  auto m = square(tc.k(), 0.0);
  const auto id = fnv1a64(tc.id);
  for (int i = 0; i < tc.k(); ++i) {
    for (int j = 0; j < tc.k(); ++j) {
      m[i][j] = unit_score(derive_seed(seed_, {{"match", id},
                                               {"image", static_cast<std::uint64_t>(i)},
                                               {"text", static_cast<std::uint64_t>(j)}}));
    }
  }
  return m;
}

std::vector<double> RandomScorer::class_scores(const TestCase& tc, const ClsQuery& q,
                                               std::span<const std::string> prompts) {
  check_query(tc, q);
  std::vector<double> s(prompts.size());
  const auto id = fnv1a64(tc.id);
  for (std::size_t c = 0; c < prompts.size(); ++c) {
    s[c] = unit_score(derive_seed(seed_, {{"cls", id},
                                          {"image", static_cast<std::uint64_t>(q.image)},
                                          {"slot", static_cast<std::uint64_t>(q.slot + 1)},
                                          {"class", c}}));
  }
  return s;
}

ScoreMatrix OracleScorer::match_scores(const TestCase& tc) {
  auto m = square(tc.k(), 1.0);
  for (int i = 0; i < tc.k(); ++i) m[i][i] = 2.0;
  return m;
}

std::vector<double> OracleScorer::class_scores(const TestCase& tc, const ClsQuery& q,
                                               std::span<const std::string> prompts) {
  check_query(tc, q);
  std::vector<double> s(prompts.size(), 1.0);
  const auto mark = [&](const std::string& category) {
    const auto c = static_cast<std::size_t>(category_index(category));
    if (c < s.size()) s[c] = 2.0;
  };
  if (q.slot == ClsQuery::kWholeImage) {
    for (const auto& c : tc.categories_in(q.image)) mark(c);
  } else {
    mark(tc.categories[static_cast<std::size_t>(q.slot)]);
  }
  return s;
}

TableScorer::TableScorer(nlohmann::json table) : table_(std::move(table)) {
  if (!table_.is_object() || table_.value("format_version", 0) != 1 || !table_.contains("cases")) {
    throw ConfigError("score table needs format_version 1 and a cases object");
  }
  name_ = "table:" + table_.value("scorer", std::string("unnamed"));
}

TableScorer TableScorer::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open score table " + path.string());
  try {
    return TableScorer(nlohmann::json::parse(in));
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("malformed score table " + path.string() + ": " + e.what());
  }
}

const nlohmann::json& TableScorer::entry(const TestCase& tc) const {
  const auto& cases = table_.at("cases");
  const auto it = cases.find(tc.id);
  if (it == cases.end()) throw ConfigError("score table has no entry for case " + tc.id);
  return *it;
}

ScoreMatrix TableScorer::match_scores(const TestCase& tc) {
  const auto& e = entry(tc);
  ScoreMatrix m;
  try {
    m = e.at("match").get<ScoreMatrix>();
  } catch (const nlohmann::json::exception&) {
    throw ConfigError("score table entry for case " + tc.id + " has no valid match matrix");
  }
  if (m.size() != static_cast<std::size_t>(tc.k())) throw ConfigError("score table case " + tc.id + ": matrix is not K x K");
  for (const auto& row : m) {
    if (row.size() != m.size()) throw ConfigError("score table case " + tc.id + ": matrix is not K x K");
    for (double v : row) {
      if (!std::isfinite(v) || v <= 0.0) throw ConfigError("score table case " + tc.id + ": scores must be positive and finite");
    }
  }
  return m;
}

std::vector<double> TableScorer::class_scores(const TestCase& tc, const ClsQuery& q,
                                              std::span<const std::string> prompts) {
  check_query(tc, q);
  const auto& e = entry(tc);
  const auto key = q.slot == ClsQuery::kWholeImage ? std::to_string(q.image)
                                                    : std::to_string(q.image) + "/" + std::to_string(q.slot);
  if (!e.contains("cls") || !e.at("cls").contains(key)) {
    throw ConfigError("score table case " + tc.id + " has no class scores for " + key);
  }
  auto s = e.at("cls").at(key).get<std::vector<double>>();
  if (s.size() != prompts.size()) throw ConfigError("score table case " + tc.id + ": class score count differs from prompts");
  return s;
}

std::vector<Embedding> EmbeddingScorer::embed_items(std::span<const EmbedItem> items) {
  std::lock_guard lock(mutex_);
  return embed(backend_, items);
}

ScoreMatrix EmbeddingScorer::match_scores(const TestCase& tc) {
  std::vector<EmbedItem> items;
  for (const auto& f : tc.images) items.emplace_back(read_png(root_ / f));
  for (const auto& t : tc.texts) items.emplace_back(t);
  const auto e = embed_items(items);
  auto m = square(tc.k(), 0.0);
  const auto k = static_cast<std::size_t>(tc.k());
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = 0; j < k; ++j) m[i][j] = std::exp(cosine(e[i], e[k + j]));
  }
  return m;
}

std::vector<double> EmbeddingScorer::class_scores(const TestCase& tc, const ClsQuery& q,
                                                  std::span<const std::string> prompts) {
  check_query(tc, q);
  std::vector<Embedding> classes;
  {
    std::lock_guard lock(mutex_);
    if (!std::equal(prompts.begin(), prompts.end(), cached_prompts_.begin(), cached_prompts_.end())) {
      std::vector<EmbedItem> items(prompts.begin(), prompts.end());
      prompt_cache_ = embed(backend_, items);
      cached_prompts_.assign(prompts.begin(), prompts.end());
    }
    classes = prompt_cache_;
  }
  auto image = read_png(root_ / tc.images[static_cast<std::size_t>(q.image)]);
  if (q.slot != ClsQuery::kWholeImage && tc.categories_in(q.image).size() > 1) {
    const auto mask = read_mask_png(root_ / tc.masks[static_cast<std::size_t>(q.image)][static_cast<std::size_t>(q.slot)]);
    if (const auto box = mask.bounds()) image = image.crop(*box);
  }
  const std::vector<EmbedItem> query{std::move(image)};
  const auto e = embed_items(query).front();
  std::vector<double> s(prompts.size());
  for (std::size_t c = 0; c < prompts.size(); ++c) s[c] = std::exp(cosine(e, classes[c]));
  return s;
}

nlohmann::json dump_score_table(Scorer& scorer, std::span<const TestCase> cases, std::span<const std::string> prompts) {
  nlohmann::json out = {{"format_version", 1}, {"scorer", scorer.name()}, {"cases", nlohmann::json::object()}};
  for (const auto& tc : cases) {
    nlohmann::json e = {{"match", scorer.match_scores(tc)}, {"cls", nlohmann::json::object()}};
    for (int i = 0; i < tc.k(); ++i) {
      const auto present = tc.categories_in(i);
      for (std::size_t slot = 0; slot < present.size(); ++slot) {
        e["cls"][std::to_string(i) + "/" + std::to_string(slot)] =
            scorer.class_scores(tc, {i, static_cast<int>(slot)}, prompts);
      }
      if (!present.empty()) e["cls"][std::to_string(i)] = scorer.class_scores(tc, {i, ClsQuery::kWholeImage}, prompts);
    }
    out["cases"][tc.id] = std::move(e);
  }
  return out;
}

}  // namespace vlprobe
