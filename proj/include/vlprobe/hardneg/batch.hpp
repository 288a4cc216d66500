#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "vlprobe/dataset/dataset.hpp"
#include "vlprobe/hardneg/loss.hpp"

namespace vlprobe {

/// One hard-negative item: candidate `index` of a test case (its image and its text).
struct HnItem {
  std::string case_id;
  int index = 0;
  int group = 0;  // position of the case among the selected candidate sets
  friend bool operator==(const HnItem&, const HnItem&) = default;
};

/// Which items make up one training batch.
struct EmbeddingBatchSpec {
  std::vector<std::size_t> trivial;  // indices into the trivial pool
  std::vector<HnItem> hard_negatives;
  std::uint64_t seed = 0;
  friend bool operator==(const EmbeddingBatchSpec&, const EmbeddingBatchSpec&) = default;
};

/// Picks `n_t` distinct trivial pairs from a pool of `trivial_pool` and whole
/// candidate sets until exactly `n_hn` hard negatives are selected.
/// Deterministic per seed. Throws InfeasibleError when a pool is exhausted.
EmbeddingBatchSpec build_hn_batch(std::span<const TestCase> cases, std::size_t trivial_pool, int n_t, int n_hn,
                                  std::uint64_t seed);

nlohmann::json batch_spec_to_json(const EmbeddingBatchSpec& s);
EmbeddingBatchSpec batch_spec_from_json(const nlohmann::json& j);

/// Matrix file: uint32 rows, uint32 cols (little-endian), then rows * cols
/// float32 values in row-major order.
void write_matrix(const std::filesystem::path& path, const Matrix& m);
Matrix read_matrix(const std::filesystem::path& path);

}  // namespace vlprobe
