#pragma once

#include <array>
#include <span>
#include <vector>

#include "mmfusion/emotion.hpp"
#include "mmfusion/linalg.hpp"
#include "mmfusion/train_config.hpp"

namespace mmfusion {

/// One-vs-rest linear SVM: four binary machines, decision value w_c . x + b_c.
struct SvmModel {
  /// Row c holds the weights of the machine for class c.
  Eigen::Matrix<float, kNumClasses, Eigen::Dynamic, Eigen::RowMajor> weights;
  Eigen::Matrix<float, kNumClasses, 1> bias;

  std::size_t dim() const noexcept { return static_cast<std::size_t>(weights.cols()); }

  /// n x 4 raw decision values.
  Matrix decision_function(const Matrix& x) const;
  /// Softmax over the four decision values.
  Matrix predict_proba(const Matrix& x) const;
  std::vector<EmotionClass> predict(const Matrix& x) const;
};

/// Solver state at termination, per binary machine.
struct SvmDiagnostics {
  std::array<std::vector<double>, kNumClasses> alpha;
  std::array<int, kNumClasses> epochs{};
  /// max(0, max projected gradient) - min(0, min projected gradient) over all
  /// dual variables; the solver stops once this drops to the tolerance.
  std::array<double, kNumClasses> kkt_violation{};
  std::array<bool, kNumClasses> converged{};
};

struct SvmFit {
  SvmModel model;
  SvmDiagnostics diagnostics;
};

/// L1-loss soft-margin machines solved by dual coordinate descent with
/// shrinking. The bias is learned as the weight of a constant feature 1.
SvmFit train_svm_detailed(const Matrix& x, std::span<const EmotionClass> y, const TrainConfig& cfg);
SvmModel train_svm(const Matrix& x, std::span<const EmotionClass> y, const TrainConfig& cfg);

}  // namespace mmfusion
