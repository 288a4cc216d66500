#include "vlprobe/semantics/captions.hpp"

#include <sstream>
#include <vector>

#include "vlprobe/core/error.hpp"
#include "vlprobe/semantics/vocabulary.hpp"

namespace vlprobe {

namespace {

std::vector<std::string> split_tabs(const std::string& line) {
  std::vector<std::string> parts;
  std::size_t start = 0;
  while (true) {
    const auto tab = line.find('\t', start);
    parts.push_back(line.substr(start, tab - start));
    if (tab == std::string::npos) break;
    start = tab + 1;
  }
  return parts;
}

void replace_all(std::string& s, std::string_view from, std::string_view to) {
  for (auto pos = s.find(from); pos != std::string::npos; pos = s.find(from, pos + to.size())) {
    s.replace(pos, from.size(), to);
  }
}

}  // namespace

CaptionTable CaptionTable::parse(std::string_view text) {
  CaptionTable table;
  std::istringstream in{std::string(text)};
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.front() == '#') continue;
    const auto parts = split_tabs(line);
    const auto where = "caption table line " + std::to_string(lineno);
    if (parts.size() == 2 && parts[0] == "format_version") {
      table.version_ = std::stoi(parts[1]);
      continue;
    }
    if (parts.size() != 3) throw ValidationError(where + ": expected 3 tab-separated fields");
    const auto subset = parse_subset(parts[0]);
    if (!subset) throw ValidationError(where + ": unknown subset '" + parts[0] + "'");
    const auto label = parse_label(*subset, parts[1]);
    if (!label) throw ValidationError(where + ": unknown label '" + parts[1] + "'");
    table.entries_[{static_cast<int>(*subset), label_index(*label)}] = parts[2];
  }
  if (table.version_ <= 0) throw ValidationError("caption table has no format_version");
  for (const auto subset : kAllSubsets) {
    for (int i = 0; i < subset_cardinality(subset); ++i) {
      if (!table.entries_.count({static_cast<int>(subset), i})) {
        throw ValidationError("caption table misses " + std::string(to_string(subset)) + "/" +
                              to_string(label_at(subset, i)));
      }
    }
  }
  return table;
}

const CaptionTable& CaptionTable::builtin() {
  static const CaptionTable table = parse(builtin_caption_resource());
  return table;
}

const std::string& CaptionTable::templ(SubsetKind subset, const SubsetLabel& label) const {
  if (subset_of(label) != subset) throw PreconditionError("label does not belong to subset");
  return entries_.at({static_cast<int>(subset), label_index(label)});
}

std::string render_caption(SubsetKind subset, const SubsetLabel& label, std::span<const std::string> categories) {
  return render_caption(CaptionTable::builtin(), subset, label, categories);
}

std::string render_caption(const CaptionTable& table, SubsetKind subset, const SubsetLabel& label,
                           std::span<const std::string> categories) {
  const auto needed = static_cast<std::size_t>(subset_category_count(subset));
  if (categories.size() < needed) {
    throw PreconditionError(std::string(to_string(subset)) + " captions need " + std::to_string(needed) +
                            " categories");
  }
  for (std::size_t i = 0; i < needed; ++i) {
    if (!is_known_category(categories[i])) throw PreconditionError("unknown category '" + categories[i] + "'");
  }
  std::string out = table.templ(subset, label);
  replace_all(out, "{a_plural}", plural_of(categories[0]));
  replace_all(out, "{a}", categories[0]);
  if (needed == 2) replace_all(out, "{b}", categories[1]);
  return out;
}

}  // namespace vlprobe
