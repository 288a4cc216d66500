#pragma once

#include <unistd.h>

#include <filesystem>
#include <string>
#include <vector>

#include "vlprobe/backends/procedural.hpp"
#include "vlprobe/semantics/vocabulary.hpp"
#include "vlprobe/synthesis/sprites.hpp"

namespace fixtures {

inline vlprobe::ProceduralBackend& backend() {
  static vlprobe::ProceduralBackend b;
  return b;
}

/// Two variants of every category, generated once per test binary.
inline const vlprobe::SpriteLibrary& sprites() {
  static const vlprobe::SpriteLibrary lib = [] {
    const auto& v = vlprobe::coco_categories();
    const std::vector<std::string> cats(v.begin(), v.end());
    return vlprobe::build_sprite_library(backend(), cats, {2, 128, 11});
  }();
  return lib;
}

/// Fresh directory under the system temp dir, removed on destruction.
struct TempDir {
  std::filesystem::path path;
  explicit TempDir(const std::string& name)
      : path(std::filesystem::temp_directory_path() / ("vlprobe_" + name + "_" + std::to_string(::getpid()))) {
    std::filesystem::remove_all(path);
    std::filesystem::create_directories(path);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path, ec);
  }
};

}  // namespace fixtures
