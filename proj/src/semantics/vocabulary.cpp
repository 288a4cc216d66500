#include "vlprobe/semantics/vocabulary.hpp"

#include <algorithm>
#include <array>
#include <map>

#include "vlprobe/core/error.hpp"

namespace vlprobe {

namespace {

const std::array<std::string, 80> kCategories = {
    "person",        "bicycle",      "car",           "motorcycle",    "airplane",     "bus",
    "train",         "truck",        "boat",          "traffic light", "fire hydrant", "stop sign",
    "parking meter", "bench",        "bird",          "cat",           "dog",          "horse",
    "sheep",         "cow",          "elephant",      "bear",          "zebra",        "giraffe",
    "backpack",      "umbrella",     "handbag",       "tie",           "suitcase",     "frisbee",
    "skis",          "snowboard",    "sports ball",   "kite",          "baseball bat", "baseball glove",
    "skateboard",    "surfboard",    "tennis racket", "bottle",        "wine glass",   "cup",
    "fork",          "knife",        "spoon",         "bowl",          "banana",       "apple",
    "sandwich",      "orange",       "broccoli",      "carrot",        "hot dog",      "pizza",
    "donut",         "cake",         "chair",         "couch",         "potted plant", "bed",
    "dining table",  "toilet",       "tv",            "laptop",        "mouse",        "remote",
    "keyboard",      "cell phone",   "microwave",     "oven",          "toaster",      "sink",
    "refrigerator",  "book",         "clock",         "vase",          "scissors",     "teddy bear",
    "hair drier",    "toothbrush"};

const std::map<std::string, std::string, std::less<>> kIrregularPlurals = {
    {"person", "people"},       {"bus", "buses"},           {"sheep", "sheep"},
    {"bench", "benches"},       {"skis", "pairs of skis"},  {"wine glass", "wine glasses"},
    {"knife", "knives"},        {"sandwich", "sandwiches"}, {"broccoli", "broccoli heads"},
    {"couch", "couches"},       {"mouse", "mice"},          {"scissors", "pairs of scissors"},
    {"toothbrush", "toothbrushes"}, {"tv", "tvs"}};

}  // namespace

std::span<const std::string> coco_categories() { return kCategories; }

bool is_known_category(std::string_view name) {
  return std::find(kCategories.begin(), kCategories.end(), name) != kCategories.end();
}

int category_index(std::string_view name) {
  const auto it = std::find(kCategories.begin(), kCategories.end(), name);
  if (it == kCategories.end()) throw PreconditionError("unknown category '" + std::string(name) + "'");
  return static_cast<int>(it - kCategories.begin());
}

std::string plural_of(std::string_view category) {
  if (const auto it = kIrregularPlurals.find(category); it != kIrregularPlurals.end()) return it->second;
  return std::string(category) + "s";
}

}  // namespace vlprobe
