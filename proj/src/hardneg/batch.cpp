#include "vlprobe/hardneg/batch.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <numeric>

#include "vlprobe/core/error.hpp"
#include "vlprobe/core/seed.hpp"

namespace vlprobe {

EmbeddingBatchSpec build_hn_batch(std::span<const TestCase> cases, std::size_t trivial_pool, int n_t, int n_hn,
                                  std::uint64_t seed) {
  if (n_t < 1 || n_hn < 0) throw PreconditionError("need n_t >= 1 and n_hn >= 0");
  if (trivial_pool < static_cast<std::size_t>(n_t)) {
    throw InfeasibleError("trivial pool exhausted: " + std::to_string(trivial_pool) + " pairs for n_t=" + std::to_string(n_t));
  }
  EmbeddingBatchSpec spec;
  spec.seed = seed;

  SeededRng trivial_rng(derive_seed(seed, {{"trivial", 0}}));
  std::vector<std::size_t> pool(trivial_pool);
  std::iota(pool.begin(), pool.end(), std::size_t{0});
  for (int i = 0; i < n_t; ++i) {
    const auto j = static_cast<std::size_t>(i) + trivial_rng.below(trivial_pool - static_cast<std::size_t>(i));
    std::swap(pool[static_cast<std::size_t>(i)], pool[j]);
    spec.trivial.push_back(pool[static_cast<std::size_t>(i)]);
  }

  std::vector<std::size_t> order(cases.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  SeededRng case_rng(derive_seed(seed, {{"hard_negative", 0}}));
  for (std::size_t i = order.size(); i > 1; --i) std::swap(order[i - 1], order[case_rng.below(i)]);
  int remaining = n_hn;
  int group = 0;
  for (const auto c : order) {
    if (remaining == 0) break;
    const auto& tc = cases[c];
    if (tc.k() > remaining) continue;
    for (int i = 0; i < tc.k(); ++i) spec.hard_negatives.push_back({tc.id, i, group});
    remaining -= tc.k();
    ++group;
  }
  if (remaining != 0) {
    throw InfeasibleError("hard-negative pool exhausted: whole candidate sets cannot fill n_hn=" + std::to_string(n_hn) +
                          " (" + std::to_string(remaining) + " short)");
  }
  return spec;
}

nlohmann::json batch_spec_to_json(const EmbeddingBatchSpec& s) {
  nlohmann::json hn = nlohmann::json::array();
  for (const auto& h : s.hard_negatives) hn.push_back({{"case", h.case_id}, {"index", h.index}, {"group", h.group}});
  return {{"format_version", 1}, {"seed", s.seed}, {"trivial", s.trivial}, {"hard_negatives", hn}};
}

EmbeddingBatchSpec batch_spec_from_json(const nlohmann::json& j) {
  if (j.value("format_version", 0) != 1) throw ConfigError("batch spec needs format_version 1");
  EmbeddingBatchSpec s;
  s.seed = j.at("seed").get<std::uint64_t>();
  s.trivial = j.at("trivial").get<std::vector<std::size_t>>();
  for (const auto& h : j.at("hard_negatives")) {
    s.hard_negatives.push_back({h.at("case").get<std::string>(), h.at("index").get<int>(), h.at("group").get<int>()});
  }
  return s;
}

namespace {

void put_u32(std::ostream& out, std::uint32_t v) {
  const unsigned char b[4] = {static_cast<unsigned char>(v), static_cast<unsigned char>(v >> 8),
                              static_cast<unsigned char>(v >> 16), static_cast<unsigned char>(v >> 24)};
  out.write(reinterpret_cast<const char*>(b), 4);
}

std::uint32_t get_u32(const unsigned char* b) {
  return static_cast<std::uint32_t>(b[0]) | static_cast<std::uint32_t>(b[1]) << 8 |
         static_cast<std::uint32_t>(b[2]) << 16 | static_cast<std::uint32_t>(b[3]) << 24;
}

}  // namespace

void write_matrix(const std::filesystem::path& path, const Matrix& m) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  put_u32(out, static_cast<std::uint32_t>(m.rows()));
  put_u32(out, static_cast<std::uint32_t>(m.cols()));
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) put_u32(out, std::bit_cast<std::uint32_t>(static_cast<float>(m(r, c))));
  }
  if (!out) throw Error("failed writing " + path.string());
}

Matrix read_matrix(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open matrix file " + path.string());
  std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (bytes.size() < 8) throw ValidationError(path.string() + ": truncated matrix header");
  const auto rows = get_u32(bytes.data());
  const auto cols = get_u32(bytes.data() + 4);
  const auto expected = 8 + 4 * static_cast<std::uint64_t>(rows) * cols;
  if (bytes.size() != expected) {
    throw ValidationError(path.string() + ": expected " + std::to_string(expected) + " bytes, found " +
                          std::to_string(bytes.size()));
  }
  Matrix m(rows, cols);
  const unsigned char* p = bytes.data() + 8;
  for (std::uint32_t r = 0; r < rows; ++r) {
    for (std::uint32_t c = 0; c < cols; ++c, p += 4) m(r, c) = std::bit_cast<float>(get_u32(p));
  }
  return m;
}

}  // namespace vlprobe
