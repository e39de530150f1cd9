#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>

namespace mmfusion {

/// The four target classes. Integer codes are the canonical (alphabetical)
/// order used for classifier outputs and confusion matrices.
enum class EmotionClass : std::uint8_t { kAngry = 0, kHappy = 1, kNeutral = 2, kSad = 3 };

inline constexpr int kNumClasses = 4;

inline constexpr std::array<EmotionClass, kNumClasses> kAllClasses = {
    EmotionClass::kAngry, EmotionClass::kHappy, EmotionClass::kNeutral, EmotionClass::kSad};

constexpr int class_index(EmotionClass c) { return static_cast<int>(c); }

EmotionClass class_from_index(int index);

/// Canonical word: "Angry", "Happy", "Neutral", "Sad".
std::string_view class_name(EmotionClass c);

/// Parses a canonical class word (case-insensitive).
std::optional<EmotionClass> parse_class_name(std::string_view word);

/// Raw dataset label -> class. Labels are matched as whole words after
/// trimming and lowercasing; anything not in the table is excluded.
class LabelMap {
 public:
  /// anger/angry, happiness/happy/excited, neutral, sadness/sad.
  LabelMap();

  /// Adds or replaces entries. A nullopt target excludes the label.
  LabelMap with_overrides(const std::map<std::string, std::optional<EmotionClass>>& overrides) const;

  std::optional<EmotionClass> map(std::string_view raw_label) const;

 private:
  std::map<std::string, std::optional<EmotionClass>, std::less<>> table_;
};

/// Default-table mapping.
std::optional<EmotionClass> label_map(std::string_view raw_label);

}  // namespace mmfusion
