#include "mmfusion/emotion.hpp"

#include <algorithm>
#include <cctype>

#include "mmfusion/error.hpp"

namespace mmfusion {
namespace {

std::string normalize_label(std::string_view raw) {
  auto is_space = [](unsigned char c) { return std::isspace(c) != 0; };
  while (!raw.empty() && is_space(raw.front())) raw.remove_prefix(1);
  while (!raw.empty() && is_space(raw.back())) raw.remove_suffix(1);
  std::string out(raw);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

}  // namespace

EmotionClass class_from_index(int index) {
  if (index < 0 || index >= kNumClasses) {
    throw Error(ErrorCode::kValidation, "class index out of range: " + std::to_string(index));
  }
  return static_cast<EmotionClass>(index);
}

std::string_view class_name(EmotionClass c) {
  switch (c) {
    case EmotionClass::kAngry: return "Angry";
    case EmotionClass::kHappy: return "Happy";
    case EmotionClass::kNeutral: return "Neutral";
    case EmotionClass::kSad: return "Sad";
  }
  return "?";
}

std::optional<EmotionClass> parse_class_name(std::string_view word) {
  const std::string w = normalize_label(word);
  for (EmotionClass c : kAllClasses) {
    if (normalize_label(class_name(c)) == w) return c;
  }
  return std::nullopt;
}

LabelMap::LabelMap()
    : table_{{"anger", EmotionClass::kAngry},      {"angry", EmotionClass::kAngry},
             {"happiness", EmotionClass::kHappy},  {"happy", EmotionClass::kHappy},
             {"excited", EmotionClass::kHappy},    {"neutral", EmotionClass::kNeutral},
             {"sadness", EmotionClass::kSad},      {"sad", EmotionClass::kSad}} {}

LabelMap LabelMap::with_overrides(
    const std::map<std::string, std::optional<EmotionClass>>& overrides) const {
  LabelMap out = *this;
  for (const auto& [label, target] : overrides) out.table_[normalize_label(label)] = target;
  return out;
}

std::optional<EmotionClass> LabelMap::map(std::string_view raw_label) const {
  auto it = table_.find(normalize_label(raw_label));
  if (it == table_.end()) return std::nullopt;
  return it->second;
}

std::optional<EmotionClass> label_map(std::string_view raw_label) {
  static const LabelMap kDefault;
  return kDefault.map(raw_label);
}

}  // namespace mmfusion
