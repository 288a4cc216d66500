#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "vlprobe/core/raster.hpp"
#include "vlprobe/semantics/labels.hpp"
#include "vlprobe/synthesis/inpaint_plan.hpp"
#include "vlprobe/synthesis/probe.hpp"

namespace vlprobe {

inline constexpr int kDatasetFormatVersion = 1;

/// One benchmark item: K images and K captions where image i matches text i.
/// Paths are relative to the dataset root.
struct TestCase {
  std::string id;  // "<subset>/<index>"
  SubsetKind subset = SubsetKind::Count;
  std::vector<std::string> images;
  std::vector<std::vector<std::string>> masks;  // [image][placement]
  std::vector<std::string> texts;
  std::vector<std::string> categories;
  std::vector<PixelBox> tile_boxes;
  nlohmann::json provenance;  // probe, seeds and the plan file

  int k() const { return static_cast<int>(images.size()); }
  /// Categories visible in image i (none for the empty Existence candidate).
  std::vector<std::string> categories_in(int image) const;

  friend bool operator==(const TestCase&, const TestCase&) = default;
};

std::string case_id(SubsetKind subset, std::uint64_t index);

/// Label of one image, re-measured from its per-object masks.
/// Throws ValidationError when the measurement is ambiguous.
SubsetLabel measure_masks(SubsetKind subset, const std::vector<BinaryMask>& object_masks, int width, int height);

/// Number of 8-connected components of a mask.
int connected_components(const BinaryMask& mask);

/// Builds the test case record for a synthesized candidate set. Throws
/// ValidationError on a cardinality mismatch or when a caption does not
/// describe the label re-measured from its image.
TestCase assemble_test_case(const AttributeProbe& probe, const CandidateImages& candidates,
                            const std::vector<std::string>& captions);

/// Writes images, masks and the plan file of one case below `root`.
void write_case_files(const std::filesystem::path& root, const TestCase& tc, const CandidateImages& candidates,
                      const nlohmann::json& plan);

struct Dataset {
  std::filesystem::path root;
  std::vector<TestCase> cases;
  std::string manifest_sha256;
};

nlohmann::json test_case_to_json(const TestCase& tc);
TestCase test_case_from_json(const nlohmann::json& j);

/// Hex SHA-256 of a byte buffer.
std::string sha256_hex(std::span<const std::uint8_t> bytes);

/// Writes `<root>/manifest.json` with a checksum for every referenced file.
/// Byte-identical for identical inputs.
void write_manifest(const std::filesystem::path& root, const std::vector<TestCase>& cases);

/// Reads the manifest and verifies every checksum. Throws ValidationError
/// naming the offending file on a missing file or checksum mismatch, and
/// ConfigError when the manifest itself is missing or malformed.
Dataset read_manifest(const std::filesystem::path& root);

struct Violation {
  std::string case_id;
  std::string message;
};

struct DatasetReport {
  std::size_t cases = 0;
  std::map<SubsetKind, std::size_t> subset_counts;
  std::vector<Violation> violations;
  bool ok() const { return violations.empty(); }
};

/// Re-measures every label from the stored masks, checks captions and pairing,
/// and bit-compares shared background tiles. Never throws for data problems;
/// each problem becomes a report entry.
DatasetReport validate_dataset(const std::filesystem::path& root);

nlohmann::json report_to_json(const DatasetReport& r);

}  // namespace vlprobe
