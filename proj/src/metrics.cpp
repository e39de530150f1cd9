#include "mmfusion/metrics.hpp"

#include "mmfusion/error.hpp"

namespace mmfusion {

std::uint64_t ConfusionMatrix::total() const {
  std::uint64_t t = 0;
  for (const auto& row : counts) {
    for (auto v : row) t += v;
  }
  return t;
}

std::uint64_t ConfusionMatrix::trace() const {
  std::uint64_t t = 0;
  for (int c = 0; c < kNumClasses; ++c) t += counts[static_cast<std::size_t>(c)][static_cast<std::size_t>(c)];
  return t;
}

std::uint64_t ConfusionMatrix::row_sum(int true_class) const {
  std::uint64_t t = 0;
  for (auto v : counts[static_cast<std::size_t>(true_class)]) t += v;
  return t;
}

std::uint64_t ConfusionMatrix::col_sum(int predicted_class) const {
  std::uint64_t t = 0;
  for (const auto& row : counts) t += row[static_cast<std::size_t>(predicted_class)];
  return t;
}

ConfusionMatrix& ConfusionMatrix::operator+=(const ConfusionMatrix& other) {
  for (std::size_t r = 0; r < counts.size(); ++r) {
    for (std::size_t c = 0; c < counts[r].size(); ++c) counts[r][c] += other.counts[r][c];
  }
  return *this;
}

ConfusionMatrix confusion_matrix(std::span<const EmotionClass> y_true, std::span<const EmotionClass> y_pred) {
  if (y_true.size() != y_pred.size()) {
    throw Error(ErrorCode::kDimMismatch, "confusion_matrix: y_true has " + std::to_string(y_true.size()) +
                                             " labels, y_pred has " + std::to_string(y_pred.size()));
  }
  ConfusionMatrix cm;
  for (std::size_t i = 0; i < y_true.size(); ++i) {
    ++cm.counts[static_cast<std::size_t>(class_index(y_true[i]))][static_cast<std::size_t>(class_index(y_pred[i]))];
  }
  return cm;
}

MetricsReport metrics(const ConfusionMatrix& cm) {
  const std::uint64_t total = cm.total();
  if (total == 0) throw Error(ErrorCode::kValidation, "metrics of an empty confusion matrix");

  MetricsReport rep;
  rep.total = total;
  const auto n = static_cast<double>(total);
  rep.accuracy = static_cast<double>(cm.trace()) / n;

  for (int c = 0; c < kNumClasses; ++c) {
    const auto k = static_cast<std::size_t>(c);
    auto& m = rep.per_class[k];
    const auto tp = static_cast<double>(cm.counts[k][k]);
    const std::uint64_t predicted = cm.col_sum(c);
    m.support = cm.row_sum(c);
    m.precision = predicted > 0 ? tp / static_cast<double>(predicted) : 0.0;
    m.recall = m.support > 0 ? tp / static_cast<double>(m.support) : 0.0;
    m.f1 = (m.precision + m.recall) > 0 ? 2.0 * m.precision * m.recall / (m.precision + m.recall) : 0.0;

    rep.macro_precision += m.precision;
    rep.macro_recall += m.recall;
    rep.macro_f1 += m.f1;
    const auto w = static_cast<double>(m.support);
    rep.weighted_precision += w * m.precision;
    rep.weighted_f1 += w * m.f1;
  }
  rep.macro_precision /= kNumClasses;
  rep.macro_recall /= kNumClasses;
  rep.macro_f1 /= kNumClasses;
  rep.weighted_precision /= n;
  rep.weighted_f1 /= n;
  // sum_c (support_c / N) * (TP_c / support_c) reduces to trace / N.
  rep.weighted_recall = rep.accuracy;
  return rep;
}

}  // namespace mmfusion
