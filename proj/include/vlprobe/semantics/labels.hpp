#pragma once

#include <array>
#include <optional>
#include <string>
#include <string_view>
#include <variant>

namespace vlprobe {

enum class SubsetKind { AbsoluteSize, RelativeSize, AbsolutePosition, RelativePosition, Existence, Count };

inline constexpr std::array<SubsetKind, 6> kAllSubsets = {
    SubsetKind::AbsoluteSize,     SubsetKind::RelativeSize, SubsetKind::AbsolutePosition,
    SubsetKind::RelativePosition, SubsetKind::Existence,    SubsetKind::Count};

enum class SizeLevel { Small, Medium, Large };
enum class RelSizeRelation { SmallerThan, EqualTo, LargerThan };
/// Row-major over the 3x3 grid.
enum class GridCell { TopLeft, Top, TopRight, Left, Center, Right, BottomLeft, Bottom, BottomRight };
/// Relation of object A to object B.
enum class SpatialRelation { LeftOf, RightOf, Above, Below };
enum class ExistenceLabel { None, AtLeastOne };

class CountLabel {
 public:
  static constexpr int kMin = 1;
  static constexpr int kMax = 9;
  /// Throws PreconditionError outside [1, 9].
  explicit CountLabel(int value);
  int value() const { return value_; }
  friend bool operator==(const CountLabel&, const CountLabel&) = default;

 private:
  int value_;
};

using SubsetLabel = std::variant<SizeLevel, RelSizeRelation, GridCell, SpatialRelation, ExistenceLabel, CountLabel>;

/// Semantic cardinality K: 3, 3, 9, 4, 2, 9.
int subset_cardinality(SubsetKind subset);
/// Number of distinct object categories a test case of this subset involves.
int subset_category_count(SubsetKind subset);

SubsetKind subset_of(const SubsetLabel& label);
/// Position of `label` in its subset's canonical order.
int label_index(const SubsetLabel& label);
/// Inverse of label_index. Throws PreconditionError for index outside [0, K).
SubsetLabel label_at(SubsetKind subset, int index);

std::string_view to_string(SubsetKind s);
/// Accepts the snake_case names produced by to_string.
std::optional<SubsetKind> parse_subset(std::string_view name);
std::string to_string(const SubsetLabel& label);
/// Parses a label token as produced by to_string for the given subset.
std::optional<SubsetLabel> parse_label(SubsetKind subset, std::string_view token);

GridCell grid_cell(int row, int col);
int grid_row(GridCell c);
int grid_col(GridCell c);

/// Relation that holds with the arguments swapped.
SpatialRelation inverse(SpatialRelation r);

}  // namespace vlprobe
