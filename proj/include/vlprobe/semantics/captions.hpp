#pragma once

#include <map>
#include <span>
#include <string>
#include <string_view>
#include <utility>

#include "vlprobe/semantics/labels.hpp"

namespace vlprobe {

/// Caption templates keyed by (subset, label). Placeholders: {a}, {b} for the
/// singular category names and {a_plural} for the plural of {a}.
class CaptionTable {
 public:
  /// Parses the tab-separated resource format. Throws ValidationError on
  /// malformed lines or missing entries.
  static CaptionTable parse(std::string_view text);
  /// The table compiled into the library.
  static const CaptionTable& builtin();

  int format_version() const { return version_; }
  const std::string& templ(SubsetKind subset, const SubsetLabel& label) const;

 private:
  int version_ = 0;
  std::map<std::pair<int, int>, std::string> entries_;
};

/// Deterministic English caption. Needs two categories for the relative
/// subsets and one otherwise.
std::string render_caption(SubsetKind subset, const SubsetLabel& label,
                           std::span<const std::string> categories);
std::string render_caption(const CaptionTable& table, SubsetKind subset, const SubsetLabel& label,
                           std::span<const std::string> categories);

/// Raw text of the builtin resource.
std::string_view builtin_caption_resource();

}  // namespace vlprobe
