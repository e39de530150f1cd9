#pragma once

#include <cstdint>
#include <span>

#include "mmfusion/emotion.hpp"
#include "mmfusion/linalg.hpp"

namespace mmfusion {

struct SvmConfig {
  double c_penalty = 1.0;
  double tolerance = 1e-4;
  /// Upper bound on passes over the dual variables.
  int max_iterations = 10'000;
};

struct MlpConfig {
  int hidden_width = 256;
  double learning_rate = 1e-3;
  int epochs = 50;  // 0 leaves the seeded initialization untouched
  int batch_size = 32;
};

struct GbtConfig {
  int rounds = 100;  // 0 gives the empty ensemble
  int max_depth = 4;
  double shrinkage = 0.1;
};

struct TrainConfig {
  std::uint64_t seed = 0;
  SvmConfig svm;
  MlpConfig mlp;
  GbtConfig gbt;

  /// Throws Error(kValidation) for any non-positive rate/size/penalty.
  void validate() const;
};

/// Shared training preconditions: rows == labels, n >= 2, at least two
/// distinct classes, all values finite.
void check_training_data(const Matrix& x, std::span<const EmotionClass> y);

/// Row-wise numerically stable softmax.
Matrix softmax_rows(const Matrix& scores);

/// Argmax with ties resolved toward the lowest class index.
EmotionClass argmax_class(const Eigen::Ref<const Eigen::RowVectorXd>& row);

/// Per-feature z-scoring. Features with zero variance keep scale 1.
class Standardizer {
 public:
  static Standardizer fit(const Matrix& x);
  Matrix apply(const Matrix& x) const;

  const Vector& mean() const noexcept { return mean_; }
  const Vector& scale() const noexcept { return scale_; }

 private:
  Vector mean_;
  Vector scale_;
};

}  // namespace mmfusion
