#include "vlprobe/dataset/dataset.hpp"

#include <cstdio>
#include <deque>

#include <openssl/evp.h>

#include "vlprobe/core/error.hpp"
#include "vlprobe/core/png_io.hpp"
#include "vlprobe/core/serialize.hpp"
#include "vlprobe/semantics/captions.hpp"
#include "vlprobe/semantics/classify.hpp"
#include "vlprobe/synthesis/consistency.hpp"

namespace vlprobe {

namespace {

std::string fmt3(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3f", v);
  return buf;
}

NormPoint mask_center(const BinaryMask& m, int width, int height) {
  const auto b = m.bounds();
  if (!b) throw ValidationError("object mask is empty");
  return {0.5 * (b->x0 + b->x1) / width, 0.5 * (b->y0 + b->y1) / height};
}

void need_masks(const std::vector<BinaryMask>& masks, std::size_t n, SubsetKind subset) {
  if (masks.size() != n) {
    throw ValidationError(std::string(to_string(subset)) + " image needs " + std::to_string(n) + " object masks, found " +
                          std::to_string(masks.size()));
  }
}

}  // namespace

std::vector<std::string> TestCase::categories_in(int image) const {
  if (subset == SubsetKind::Existence && label_at(subset, image) == SubsetLabel(ExistenceLabel::None)) return {};
  return categories;
}

std::string case_id(SubsetKind subset, std::uint64_t index) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%06llu", static_cast<unsigned long long>(index));
  return std::string(to_string(subset)) + "/" + buf;
}

int connected_components(const BinaryMask& mask) {
  const int w = mask.width(), h = mask.height();
  std::vector<std::uint8_t> seen(static_cast<std::size_t>(w) * static_cast<std::size_t>(h), 0);
  std::deque<std::pair<int, int>> queue;
  int components = 0;
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      if (!mask.test(x, y) || seen[static_cast<std::size_t>(y) * w + x]) continue;
      ++components;
      seen[static_cast<std::size_t>(y) * w + x] = 1;
      queue.emplace_back(x, y);
      while (!queue.empty()) {
        const auto [cx, cy] = queue.front();
        queue.pop_front();
        for (int dy = -1; dy <= 1; ++dy) {
          for (int dx = -1; dx <= 1; ++dx) {
            const int nx = cx + dx, ny = cy + dy;
            if (nx < 0 || ny < 0 || nx >= w || ny >= h) continue;
            auto& s = seen[static_cast<std::size_t>(ny) * w + nx];
            if (s || !mask.test(nx, ny)) continue;
            s = 1;
            queue.emplace_back(nx, ny);
          }
        }
      }
    }
  }
  return components;
}

SubsetLabel measure_masks(SubsetKind subset, const std::vector<BinaryMask>& masks, int width, int height) {
  for (const auto& m : masks) {
    if (m.width() != width || m.height() != height) throw ValidationError("object mask size differs from the image");
  }
  const double canvas = static_cast<double>(width) * height;
  switch (subset) {
    case SubsetKind::AbsoluteSize: {
      need_masks(masks, 1, subset);
      const double p = static_cast<double>(masks[0].count()) / canvas;
      if (auto level = classify_absolute_size(p)) return *level;
      throw ValidationError("area fraction P=" + fmt3(p) + " is ambiguous");
    }
    case SubsetKind::RelativeSize: {
      need_masks(masks, 2, subset);
      const auto a = static_cast<double>(masks[0].count());
      const auto b = static_cast<double>(masks[1].count());
      if (a <= 0.0 || b <= 0.0) throw ValidationError("object mask is empty");
      if (auto rel = classify_relative_size(a, b)) return *rel;
      throw ValidationError("area ratio R=" + fmt3(a / b) + " is ambiguous");
    }
    case SubsetKind::AbsolutePosition:
      need_masks(masks, 1, subset);
      return classify_absolute_position(mask_center(masks[0], width, height));
    case SubsetKind::RelativePosition: {
      need_masks(masks, 2, subset);
      const auto a = mask_center(masks[0], width, height);
      const auto b = mask_center(masks[1], width, height);
      if (a == b) throw ValidationError("coincident object centers");
      return classify_relative_position(a, b);
    }
    case SubsetKind::Existence:
    case SubsetKind::Count: {
      BinaryMask all(width, height);
      for (const auto& m : masks) all |= m;
      const int n = connected_components(all);
      if (subset == SubsetKind::Existence) return classify_existence(n);
      if (n < CountLabel::kMin || n > CountLabel::kMax) {
        throw ValidationError("found " + std::to_string(n) + " objects, outside [1, 9]");
      }
      return CountLabel(n);
    }
  }
  throw PreconditionError("invalid subset");
}

TestCase assemble_test_case(const AttributeProbe& probe, const CandidateImages& candidates,
                            const std::vector<std::string>& captions) {
  const auto k = static_cast<std::size_t>(subset_cardinality(probe.subset));
  if (candidates.images.size() != k || captions.size() != k || candidates.object_masks.size() != k) {
    throw ValidationError(std::string(to_string(probe.subset)) + " needs " + std::to_string(k) + " images and captions, got " +
                          std::to_string(candidates.images.size()) + " images and " + std::to_string(captions.size()) +
                          " captions");
  }
  TestCase tc;
  tc.id = case_id(probe.subset, probe.case_index);
  tc.subset = probe.subset;
  tc.texts = captions;
  tc.categories = probe.categories;
  tc.tile_boxes = candidates.tile_boxes;
  for (std::size_t i = 0; i < k; ++i) {
    const auto& img = candidates.images[i];
    const auto label = measure_masks(probe.subset, candidates.object_masks[i], img.width(), img.height());
    if (captions[i] != render_caption(probe.subset, label, probe.categories)) {
      throw ValidationError("caption " + std::to_string(i) + " does not describe image " + std::to_string(i) + " (" +
                            to_string(label) + ")");
    }
    tc.images.push_back(tc.id + "/image_" + std::to_string(i) + ".png");
    std::vector<std::string> masks;
    for (std::size_t j = 0; j < candidates.object_masks[i].size(); ++j) {
      masks.push_back(tc.id + "/mask_" + std::to_string(i) + "_" + std::to_string(j) + ".png");
    }
    tc.masks.push_back(std::move(masks));
  }
  tc.provenance = {{"probe", probe_to_json(probe)},
                   {"plan", tc.id + "/plan.json"},
                   {"seeds", {{"tile", probe.seed("tile")}, {"background", probe.seed("background")}}}};
  return tc;
}

void write_case_files(const std::filesystem::path& root, const TestCase& tc, const CandidateImages& candidates,
                      const nlohmann::json& plan) {
  std::filesystem::create_directories(root / tc.id);
  for (std::size_t i = 0; i < tc.images.size(); ++i) {
    write_png(root / tc.images[i], candidates.images.at(i));
    for (std::size_t j = 0; j < tc.masks[i].size(); ++j) write_mask_png(root / tc.masks[i][j], candidates.object_masks.at(i).at(j));
  }
  const auto text = plan.dump(1) + "\n";
  write_file(root / tc.provenance.at("plan").get<std::string>(),
             std::span(reinterpret_cast<const std::uint8_t*>(text.data()), text.size()));
}

nlohmann::json test_case_to_json(const TestCase& tc) {
  return {{"id", tc.id},
          {"subset", to_string(tc.subset)},
          {"images", tc.images},
          {"masks", tc.masks},
          {"texts", tc.texts},
          {"categories", tc.categories},
          {"tile_boxes", tc.tile_boxes},
          {"provenance", tc.provenance}};
}

TestCase test_case_from_json(const nlohmann::json& j) {
  TestCase tc;
  tc.id = j.at("id").get<std::string>();
  const auto subset = parse_subset(j.at("subset").get<std::string>());
  if (!subset) throw ValidationError("case " + tc.id + ": unknown subset");
  tc.subset = *subset;
  tc.images = j.at("images").get<std::vector<std::string>>();
  tc.masks = j.at("masks").get<std::vector<std::vector<std::string>>>();
  tc.texts = j.at("texts").get<std::vector<std::string>>();
  tc.categories = j.at("categories").get<std::vector<std::string>>();
  tc.tile_boxes = j.at("tile_boxes").get<std::vector<PixelBox>>();
  tc.provenance = j.at("provenance");
  return tc;
}

std::string sha256_hex(std::span<const std::uint8_t> bytes) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
    throw Error("SHA-256 computation failed");
  }
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < len; ++i) {
    out.push_back(kHex[digest[i] >> 4]);
    out.push_back(kHex[digest[i] & 15]);
  }
  return out;
}

namespace {

std::vector<std::string> referenced_files(const TestCase& tc) {
  std::vector<std::string> files = tc.images;
  for (const auto& m : tc.masks) files.insert(files.end(), m.begin(), m.end());
  if (tc.provenance.contains("plan")) files.push_back(tc.provenance.at("plan").get<std::string>());
  return files;
}

}  // namespace

void write_manifest(const std::filesystem::path& root, const std::vector<TestCase>& cases) {
  nlohmann::json counts = nlohmann::json::object();
  for (const auto s : kAllSubsets) counts[std::string(to_string(s))] = 0;
  nlohmann::json list = nlohmann::json::array();
  nlohmann::json checksums = nlohmann::json::object();
  for (const auto& tc : cases) {
    counts[std::string(to_string(tc.subset))] = counts[std::string(to_string(tc.subset))].get<int>() + 1;
    list.push_back(test_case_to_json(tc));
    for (const auto& f : referenced_files(tc)) checksums[f] = sha256_hex(read_file(root / f));
  }
  const nlohmann::json manifest = {{"format_version", kDatasetFormatVersion},
                                   {"subset_counts", counts},
                                   {"cases", list},
                                   {"checksums", checksums}};
  std::filesystem::create_directories(root);
  const auto text = manifest.dump(1) + "\n";
  write_file(root / "manifest.json", std::span(reinterpret_cast<const std::uint8_t*>(text.data()), text.size()));
}

Dataset read_manifest(const std::filesystem::path& root) {
  const auto path = root / "manifest.json";
  if (!std::filesystem::exists(path)) throw ConfigError("no manifest at " + path.string());
  const auto bytes = read_file(path);
  nlohmann::json manifest;
  Dataset ds;
  ds.root = root;
  ds.manifest_sha256 = sha256_hex(bytes);
  try {
    manifest = nlohmann::json::parse(bytes.begin(), bytes.end());
    if (manifest.at("format_version").get<int>() != kDatasetFormatVersion) {
      throw ConfigError("unsupported manifest format_version " + manifest.at("format_version").dump());
    }
    for (const auto& j : manifest.at("cases")) ds.cases.push_back(test_case_from_json(j));
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("malformed manifest " + path.string() + ": " + e.what());
  }
  const auto& checksums = manifest.at("checksums");
  for (const auto& tc : ds.cases) {
    for (const auto& f : referenced_files(tc)) {
      if (!checksums.contains(f)) throw ValidationError(f + ": no checksum in manifest");
      if (!std::filesystem::exists(root / f)) throw ValidationError(f + ": file missing");
      if (sha256_hex(read_file(root / f)) != checksums.at(f).get<std::string>()) {
        throw ValidationError(f + ": checksum mismatch");
      }
    }
  }
  return ds;
}

namespace {

void validate_case(const std::filesystem::path& root, const TestCase& tc, std::vector<Violation>& out) {
  const auto report = [&](const std::string& msg) { out.push_back({tc.id, msg}); };
  const auto k = static_cast<std::size_t>(subset_cardinality(tc.subset));
  if (tc.images.size() != k || tc.texts.size() != k || tc.masks.size() != k) {
    report("expected " + std::to_string(k) + " images, texts and mask lists");
    return;
  }
  if (tc.categories.size() != static_cast<std::size_t>(subset_category_count(tc.subset))) {
    report("wrong number of categories");
    return;
  }
  std::vector<RasterImage> images;
  std::vector<std::vector<BinaryMask>> masks;
  try {
    for (std::size_t i = 0; i < k; ++i) {
      images.push_back(read_png(root / tc.images[i]));
      std::vector<BinaryMask> m;
      for (const auto& f : tc.masks[i]) m.push_back(read_mask_png(root / f));
      masks.push_back(std::move(m));
    }
  } catch (const Error& e) {
    report(std::string("unreadable file: ") + e.what());
    return;
  }
  for (std::size_t i = 0; i < k; ++i) {
    const auto tag = "image " + std::to_string(i);
    if (images[i].width() != images[0].width() || images[i].height() != images[0].height()) {
      report(tag + ": size differs from image 0");
      return;
    }
    try {
      const auto label = measure_masks(tc.subset, masks[i], images[i].width(), images[i].height());
      if (label_index(label) != static_cast<int>(i)) report(tag + ": measured " + to_string(label) + ", expected " + to_string(label_at(tc.subset, static_cast<int>(i))));
      if (tc.texts[i] != render_caption(tc.subset, label_at(tc.subset, static_cast<int>(i)), tc.categories)) {
        report("text " + std::to_string(i) + " is not the caption of label " + to_string(label_at(tc.subset, static_cast<int>(i))));
      }
    } catch (const ValidationError& e) {
      report(tag + ": " + e.what());
    } catch (const PreconditionError& e) {
      report(tag + ": " + e.what());
    }
  }
  if (tc.tile_boxes.size() != k) {
    report("expected one tile box per image");
    return;
  }
  for (const auto& b : tc.tile_boxes) {
    if (!images[0].bounds().contains(b) || b.width() != tc.tile_boxes[0].width() || b.height() != tc.tile_boxes[0].height()) {
      report("tile box outside the canvas or of unequal size");
      return;
    }
  }
  for (auto& msg : check_tile_consistency(images, tc.tile_boxes, masks)) report(msg);
}

}  // namespace

DatasetReport validate_dataset(const std::filesystem::path& root) {
  DatasetReport r;
  Dataset ds;
  try {
    ds = read_manifest(root);
  } catch (const Error& e) {
    r.violations.push_back({"", e.what()});
    return r;
  }
  r.cases = ds.cases.size();
  for (const auto& tc : ds.cases) {
    ++r.subset_counts[tc.subset];
    validate_case(root, tc, r.violations);
  }
  return r;
}

nlohmann::json report_to_json(const DatasetReport& r) {
  nlohmann::json counts = nlohmann::json::object();
  for (const auto& [s, n] : r.subset_counts) counts[std::string(to_string(s))] = n;
  nlohmann::json v = nlohmann::json::array();
  for (const auto& x : r.violations) v.push_back({{"case", x.case_id}, {"message", x.message}});
  return {{"format_version", kDatasetFormatVersion}, {"cases", r.cases}, {"subset_counts", counts}, {"violations", v}};
}

}  // namespace vlprobe
