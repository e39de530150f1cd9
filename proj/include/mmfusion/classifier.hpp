#pragma once

#include <array>
#include <filesystem>
#include <optional>
#include <span>
#include <string_view>
#include <variant>
#include <vector>

#include "mmfusion/gbt.hpp"
#include "mmfusion/mlp.hpp"
#include "mmfusion/svm.hpp"

namespace mmfusion {

enum class ClassifierKind : std::uint8_t { kSvm = 1, kMlp = 2, kGbt = 3 };

inline constexpr std::array<ClassifierKind, 3> kAllClassifiers = {ClassifierKind::kSvm, ClassifierKind::kMlp,
                                                                  ClassifierKind::kGbt};

std::string_view to_string(ClassifierKind kind);
std::optional<ClassifierKind> parse_classifier(std::string_view text);

using ClassifierModel = std::variant<SvmModel, MlpModel, GbtModel>;

ClassifierKind kind_of(const ClassifierModel& model);
std::size_t input_dim(const ClassifierModel& model);

ClassifierModel train(ClassifierKind kind, const Matrix& x, std::span<const EmotionClass> y,
                      const TrainConfig& cfg);

/// n x 4, rows sum to 1.
Matrix predict_proba(const ClassifierModel& model, const Matrix& x);

/// argmax of predict_proba, ties toward the lowest class index.
std::vector<EmotionClass> predict(const ClassifierModel& model, const Matrix& x);

// MDL1 container, little-endian:
//   "MDL1" | u8 version=1 | u8 kind (1 svm, 2 mlp, 3 gbt) | body
// svm: u32 dim | u32 classes=4 | 4 x (dim x f32 weights, f32 bias)
// mlp: u32 dim | u32 hidden | u32 classes=4 | w1 (hidden x dim, row-major) | b1 | w2 (4 x hidden) | b2, all f32
// gbt: u32 dim | u32 rounds | u32 classes=4 | f32 shrinkage | rounds x 4 trees, each
//      u32 node_count | node_count x (i32 feature | f32 threshold | u32 left | u32 right | f32 value)
std::vector<std::uint8_t> encode_model(const ClassifierModel& model);
ClassifierModel decode_model(std::span<const std::uint8_t> bytes);

void save_model(const ClassifierModel& model, const std::filesystem::path& path);
ClassifierModel load_model(const std::filesystem::path& path);

}  // namespace mmfusion
