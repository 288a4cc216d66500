#include "vlprobe/semantics/labels.hpp"

#include <charconv>

#include "vlprobe/core/error.hpp"

namespace vlprobe {

CountLabel::CountLabel(int value) : value_(value) {
  if (value < kMin || value > kMax) {
    throw PreconditionError("count label must be in [1, 9], got " + std::to_string(value));
  }
}

int subset_cardinality(SubsetKind subset) {
  switch (subset) {
    case SubsetKind::AbsoluteSize: return 3;
    case SubsetKind::RelativeSize: return 3;
    case SubsetKind::AbsolutePosition: return 9;
    case SubsetKind::RelativePosition: return 4;
    case SubsetKind::Existence: return 2;
    case SubsetKind::Count: return 9;
  }
  throw PreconditionError("invalid subset");
}

int subset_category_count(SubsetKind subset) {
  return subset == SubsetKind::RelativeSize || subset == SubsetKind::RelativePosition ? 2 : 1;
}

SubsetKind subset_of(const SubsetLabel& label) {
  return static_cast<SubsetKind>(label.index());
}

int label_index(const SubsetLabel& label) {
  if (const auto* c = std::get_if<CountLabel>(&label)) return c->value() - 1;
  return std::visit([](auto v) -> int {
    if constexpr (std::is_enum_v<decltype(v)>) {
      return static_cast<int>(v);
    } else {
      return 0;
    }
  }, label);
}

SubsetLabel label_at(SubsetKind subset, int index) {
  if (index < 0 || index >= subset_cardinality(subset)) {
    throw PreconditionError("label index " + std::to_string(index) + " out of range for " +
                            std::string(to_string(subset)));
  }
  switch (subset) {
    case SubsetKind::AbsoluteSize: return static_cast<SizeLevel>(index);
    case SubsetKind::RelativeSize: return static_cast<RelSizeRelation>(index);
    case SubsetKind::AbsolutePosition: return static_cast<GridCell>(index);
    case SubsetKind::RelativePosition: return static_cast<SpatialRelation>(index);
    case SubsetKind::Existence: return static_cast<ExistenceLabel>(index);
    case SubsetKind::Count: return CountLabel(index + 1);
  }
  throw PreconditionError("invalid subset");
}

namespace {

constexpr std::array<std::string_view, 6> kSubsetNames = {
    "absolute_size", "relative_size", "absolute_position", "relative_position", "existence", "count"};

constexpr std::array<std::string_view, 3> kSizeNames = {"small", "medium", "large"};
constexpr std::array<std::string_view, 3> kRelSizeNames = {"smaller_than", "equal_to", "larger_than"};
constexpr std::array<std::string_view, 9> kCellNames = {"top_left",    "top",    "top_right",
                                                         "left",        "center", "right",
                                                         "bottom_left", "bottom", "bottom_right"};
constexpr std::array<std::string_view, 4> kRelationNames = {"left_of", "right_of", "above", "below"};
constexpr std::array<std::string_view, 2> kExistenceNames = {"none", "at_least_one"};

}  // namespace

std::string_view to_string(SubsetKind s) { return kSubsetNames.at(static_cast<std::size_t>(s)); }

std::optional<SubsetKind> parse_subset(std::string_view name) {
  for (std::size_t i = 0; i < kSubsetNames.size(); ++i) {
    if (kSubsetNames[i] == name) return static_cast<SubsetKind>(i);
  }
  return std::nullopt;
}

std::string to_string(const SubsetLabel& label) {
  const auto i = static_cast<std::size_t>(label_index(label));
  switch (subset_of(label)) {
    case SubsetKind::AbsoluteSize: return std::string(kSizeNames[i]);
    case SubsetKind::RelativeSize: return std::string(kRelSizeNames[i]);
    case SubsetKind::AbsolutePosition: return std::string(kCellNames[i]);
    case SubsetKind::RelativePosition: return std::string(kRelationNames[i]);
    case SubsetKind::Existence: return std::string(kExistenceNames[i]);
    case SubsetKind::Count: return std::to_string(i + 1);
  }
  return {};
}

std::optional<SubsetLabel> parse_label(SubsetKind subset, std::string_view token) {
  for (int i = 0; i < subset_cardinality(subset); ++i) {
    const auto label = label_at(subset, i);
    if (to_string(label) == token) return label;
  }
  return std::nullopt;
}

GridCell grid_cell(int row, int col) {
  if (row < 0 || row > 2 || col < 0 || col > 2) throw PreconditionError("grid row/col out of range");
  return static_cast<GridCell>(row * 3 + col);
}

int grid_row(GridCell c) { return static_cast<int>(c) / 3; }
int grid_col(GridCell c) { return static_cast<int>(c) % 3; }

SpatialRelation inverse(SpatialRelation r) {
  switch (r) {
    case SpatialRelation::LeftOf: return SpatialRelation::RightOf;
    case SpatialRelation::RightOf: return SpatialRelation::LeftOf;
    case SpatialRelation::Above: return SpatialRelation::Below;
    case SpatialRelation::Below: return SpatialRelation::Above;
  }
  return r;
}

}  // namespace vlprobe
