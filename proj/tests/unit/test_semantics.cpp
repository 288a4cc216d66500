#include <doctest.h>

#include <set>

#include "vlprobe/core/error.hpp"
#include "vlprobe/semantics/captions.hpp"
#include "vlprobe/semantics/classify.hpp"
#include "vlprobe/semantics/labels.hpp"
#include "vlprobe/semantics/vocabulary.hpp"

using namespace vlprobe;

TEST_CASE("subset cardinalities") {
  CHECK(subset_cardinality(SubsetKind::AbsoluteSize) == 3);
  CHECK(subset_cardinality(SubsetKind::RelativeSize) == 3);
  CHECK(subset_cardinality(SubsetKind::AbsolutePosition) == 9);
  CHECK(subset_cardinality(SubsetKind::RelativePosition) == 4);
  CHECK(subset_cardinality(SubsetKind::Existence) == 2);
  CHECK(subset_cardinality(SubsetKind::Count) == 9);
}

TEST_CASE("labels round trip through index and name") {
  for (const auto s : kAllSubsets) {
    CHECK(parse_subset(to_string(s)) == s);
    for (int i = 0; i < subset_cardinality(s); ++i) {
      const auto label = label_at(s, i);
      CHECK(subset_of(label) == s);
      CHECK(label_index(label) == i);
      CHECK(parse_label(s, to_string(label)) == label);
    }
    CHECK_THROWS_AS(label_at(s, subset_cardinality(s)), PreconditionError);
  }
  CHECK_FALSE(parse_subset("colour").has_value());
  CHECK_THROWS_AS(CountLabel(0), PreconditionError);
  CHECK_THROWS_AS(CountLabel(10), PreconditionError);
}

TEST_CASE("absolute size bands") {
  CHECK(classify_absolute_size(0.1) == SizeLevel::Small);
  CHECK(classify_absolute_size(0.2) == SizeLevel::Small);
  CHECK(classify_absolute_size(0.4) == SizeLevel::Medium);
  CHECK(classify_absolute_size(0.5) == SizeLevel::Medium);
  CHECK(classify_absolute_size(0.6) == SizeLevel::Medium);
  CHECK(classify_absolute_size(0.8) == SizeLevel::Large);
  CHECK(classify_absolute_size(0.85) == SizeLevel::Large);
  for (double p = 0.2001; p < 0.4; p += 0.001) CHECK_FALSE(classify_absolute_size(p).has_value());
  for (double p = 0.6001; p < 0.8; p += 0.001) CHECK_FALSE(classify_absolute_size(p).has_value());
  CHECK_THROWS_AS(classify_absolute_size(1.5), PreconditionError);
}

TEST_CASE("relative size bands") {
  CHECK(classify_relative_size(0.4, 1.0) == RelSizeRelation::SmallerThan);
  CHECK(classify_relative_size(5.0, 10.0) == RelSizeRelation::SmallerThan);
  CHECK(classify_relative_size(1.0, 1.0) == RelSizeRelation::EqualTo);
  CHECK(classify_relative_size(2.5, 1.0) == RelSizeRelation::LargerThan);
  CHECK(classify_relative_size(2.0, 1.0) == RelSizeRelation::LargerThan);
  for (double r = 0.5001; r < 0.9; r += 0.001) CHECK_FALSE(classify_relative_size(r, 1.0).has_value());
  for (double r = 1.1001; r < 2.0; r += 0.001) CHECK_FALSE(classify_relative_size(r, 1.0).has_value());
  CHECK_THROWS_AS(classify_relative_size(0.0, 1.0), PreconditionError);
}

TEST_CASE("grid cells") {
  CHECK(classify_absolute_position({0.1, 0.1}) == GridCell::TopLeft);
  CHECK(classify_absolute_position({0.5, 0.1}) == GridCell::Top);
  CHECK(classify_absolute_position({0.5, 0.5}) == GridCell::Center);
  CHECK(classify_absolute_position({0.9, 0.5}) == GridCell::Right);
  CHECK(classify_absolute_position({1.0, 1.0}) == GridCell::BottomRight);
  CHECK(classify_absolute_position({0.0, 0.7}) == GridCell::BottomLeft);
  for (int r = 0; r < 3; ++r) {
    for (int c = 0; c < 3; ++c) {
      CHECK(grid_row(grid_cell(r, c)) == r);
      CHECK(grid_col(grid_cell(r, c)) == c);
    }
  }
}

TEST_CASE("relative position uses the dominant axis") {
  CHECK(classify_relative_position({0.2, 0.5}, {0.8, 0.5}) == SpatialRelation::LeftOf);
  CHECK(classify_relative_position({0.8, 0.5}, {0.2, 0.5}) == SpatialRelation::RightOf);
  CHECK(classify_relative_position({0.5, 0.1}, {0.45, 0.9}) == SpatialRelation::Above);
  CHECK(classify_relative_position({0.5, 0.9}, {0.45, 0.1}) == SpatialRelation::Below);
  CHECK(classify_relative_position({0.2, 0.2}, {0.4, 0.4}) == SpatialRelation::LeftOf);
  for (int i = 0; i < 4; ++i) {
    const auto r = static_cast<SpatialRelation>(i);
    CHECK(inverse(inverse(r)) == r);
  }
  CHECK_THROWS_AS(classify_relative_position({0.3, 0.3}, {0.3, 0.3}), PreconditionError);
}

TEST_CASE("existence") {
  CHECK(classify_existence(0) == ExistenceLabel::None);
  CHECK(classify_existence(3) == ExistenceLabel::AtLeastOne);
}

TEST_CASE("captions") {
  const std::vector<std::string> cup{"cup"};
  const std::vector<std::string> pair{"dog", "cat"};
  CHECK(render_caption(SubsetKind::Count, CountLabel(2), cup) == "there are two cups in the image");
  CHECK(render_caption(SubsetKind::Count, CountLabel(1), cup) == "there is one cup in the image");
  CHECK(render_caption(SubsetKind::Existence, ExistenceLabel::None, cup) == "there is no cup in the image");
  CHECK(render_caption(SubsetKind::RelativePosition, SpatialRelation::LeftOf, pair) == "the dog is to the left of the cat");
  CHECK(render_caption(SubsetKind::Count, CountLabel(3), std::vector<std::string>{"person"}) ==
        "there are three people in the image");
  CHECK_THROWS_AS(render_caption(SubsetKind::RelativeSize, RelSizeRelation::EqualTo, cup), PreconditionError);
  CHECK_THROWS(render_caption(SubsetKind::Count, CountLabel(2), std::vector<std::string>{"unicorn"}));

  for (const auto s : kAllSubsets) {
    std::set<std::string> seen;
    const auto& cats = subset_category_count(s) == 2 ? pair : cup;
    for (int i = 0; i < subset_cardinality(s); ++i) seen.insert(render_caption(s, label_at(s, i), cats));
    CHECK(seen.size() == static_cast<std::size_t>(subset_cardinality(s)));
  }
}

TEST_CASE("caption table parsing") {
  CHECK(CaptionTable::builtin().format_version() == 1);
  CHECK_THROWS(CaptionTable::parse("format_version\t2\n"));
  CHECK_THROWS(CaptionTable::parse("format_version\t1\ncount\t1\tone {a}\n"));  // incomplete table
}

TEST_CASE("vocabulary") {
  CHECK(coco_categories().size() == 80);
  CHECK(category_index("person") == 0);
  CHECK(is_known_category("toothbrush"));
  CHECK_FALSE(is_known_category("unicorn"));
  CHECK(plural_of("sheep") == "sheep");
  CHECK(plural_of("bus") == "buses");
  CHECK(plural_of("knife") == "knives");
  std::set<std::string> unique(coco_categories().begin(), coco_categories().end());
  CHECK(unique.size() == 80);
}
