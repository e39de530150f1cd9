#pragma once

#include <span>
#include <vector>

#include "mmfusion/emotion.hpp"
#include "mmfusion/linalg.hpp"
#include "mmfusion/train_config.hpp"

namespace mmfusion {

/// input -> hidden (rectifier) -> 4 (softmax).
struct MlpModel {
  using WeightMatrix = Eigen::Matrix<float, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

  WeightMatrix w1;  // hidden x dim
  Eigen::VectorXf b1;
  WeightMatrix w2;  // 4 x hidden
  Eigen::VectorXf b2;

  std::size_t dim() const noexcept { return static_cast<std::size_t>(w1.cols()); }
  std::size_t hidden_width() const noexcept { return static_cast<std::size_t>(w1.rows()); }

  /// n x 4 pre-softmax scores.
  Matrix logits(const Matrix& x) const;
  Matrix predict_proba(const Matrix& x) const;
  std::vector<EmotionClass> predict(const Matrix& x) const;
};

/// Glorot-uniform draw for every weight and bias, limit sqrt(6 / (fan_in + fan_out)).
MlpModel init_mlp(std::size_t dim, std::size_t hidden_width, std::uint64_t seed);

struct MlpFit {
  MlpModel model;
  /// Mean training cross-entropy after each epoch.
  std::vector<double> epoch_loss;
};

/// Mini-batch Adam (beta1 0.9, beta2 0.999, eps 1e-8) on mean softmax
/// cross-entropy; samples are reshuffled every epoch from the seed.
MlpFit train_mlp_detailed(const Matrix& x, std::span<const EmotionClass> y, const TrainConfig& cfg);
MlpModel train_mlp(const Matrix& x, std::span<const EmotionClass> y, const TrainConfig& cfg);

/// Parameters in 64-bit form, used for training and gradient checking.
struct MlpParams {
  Matrix w1;
  Vector b1;
  Matrix w2;
  Vector b2;

  static MlpParams from_model(const MlpModel& model);
  MlpModel to_model() const;
};

/// Mean cross-entropy over the batch.
double mlp_loss(const MlpParams& params, const Matrix& x, std::span<const EmotionClass> y);

/// Analytic gradient of mlp_loss by backpropagation.
MlpParams mlp_gradient(const MlpParams& params, const Matrix& x, std::span<const EmotionClass> y);

/// Max over every parameter of |analytic - numeric| / max(|analytic|, |numeric|, 1e-6),
/// numeric being the central difference with step 1e-5. Batch <= 8, dim <= 16.
double mlp_grad_check(const MlpModel& model, const Matrix& x, std::span<const EmotionClass> y);

}  // namespace mmfusion
