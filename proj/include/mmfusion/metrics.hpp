#pragma once

#include <array>
#include <cstdint>
#include <span>

#include "mmfusion/emotion.hpp"

namespace mmfusion {

/// counts[true][predicted] in canonical class order.
struct ConfusionMatrix {
  std::array<std::array<std::uint64_t, kNumClasses>, kNumClasses> counts{};

  std::uint64_t total() const;
  std::uint64_t trace() const;
  std::uint64_t row_sum(int true_class) const;
  std::uint64_t col_sum(int predicted_class) const;

  ConfusionMatrix& operator+=(const ConfusionMatrix& other);
  bool operator==(const ConfusionMatrix&) const = default;
};

/// Throws Error(kDimMismatch) when lengths differ.
ConfusionMatrix confusion_matrix(std::span<const EmotionClass> y_true, std::span<const EmotionClass> y_pred);

struct ClassMetrics {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  std::uint64_t support = 0;
};

struct MetricsReport {
  double accuracy = 0.0;
  std::array<ClassMetrics, kNumClasses> per_class{};
  double macro_precision = 0.0;
  double macro_recall = 0.0;
  double macro_f1 = 0.0;
  double weighted_precision = 0.0;
  double weighted_recall = 0.0;
  double weighted_f1 = 0.0;
  std::uint64_t total = 0;
};

/// precision = TP/colsum, recall = TP/rowsum, F1 = 2PR/(P+R); each is 0 when
/// its denominator is 0. Throws Error(kValidation) for an empty matrix.
MetricsReport metrics(const ConfusionMatrix& cm);

}  // namespace mmfusion
