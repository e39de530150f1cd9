#include "mmfusion/train_config.hpp"

#include <array>
#include <cmath>

#include "mmfusion/error.hpp"

namespace mmfusion {
namespace {

void require(bool ok, const char* what) {
  if (!ok) throw Error(ErrorCode::kValidation, what);
}

}  // namespace

void TrainConfig::validate() const {
  require(svm.c_penalty > 0 && std::isfinite(svm.c_penalty), "svm.c_penalty must be positive");
  require(svm.tolerance > 0 && std::isfinite(svm.tolerance), "svm.tolerance must be positive");
  require(svm.max_iterations > 0, "svm.max_iterations must be positive");
  require(mlp.hidden_width > 0, "mlp.hidden_width must be positive");
  require(mlp.learning_rate > 0 && std::isfinite(mlp.learning_rate), "mlp.learning_rate must be positive");
  require(mlp.epochs >= 0, "mlp.epochs must be non-negative");
  require(mlp.batch_size > 0, "mlp.batch_size must be positive");
  require(gbt.rounds >= 0, "gbt.rounds must be non-negative");
  require(gbt.max_depth > 0, "gbt.max_depth must be positive");
  require(gbt.shrinkage > 0 && std::isfinite(gbt.shrinkage), "gbt.shrinkage must be positive");
}

void check_training_data(const Matrix& x, std::span<const EmotionClass> y) {
  if (static_cast<std::size_t>(x.rows()) != y.size()) {
    throw Error(ErrorCode::kDimMismatch, "feature rows (" + std::to_string(x.rows()) +
                                             ") and labels (" + std::to_string(y.size()) + ") differ");
  }
  if (x.rows() < 2) throw Error(ErrorCode::kValidation, "training needs at least 2 samples");
  if (x.cols() < 1) throw Error(ErrorCode::kValidation, "training needs at least 1 feature");
  if (!x.allFinite()) throw Error(ErrorCode::kNonFinite, "training data contains non-finite values");
  std::array<bool, kNumClasses> present{};
  for (auto c : y) present[static_cast<std::size_t>(class_index(c))] = true;
  int distinct = 0;
  for (bool p : present) distinct += p ? 1 : 0;
  if (distinct < 2) throw Error(ErrorCode::kSingleClass, "training data contains a single class");
}

Matrix softmax_rows(const Matrix& scores) {
  Matrix out(scores.rows(), scores.cols());
  for (Eigen::Index r = 0; r < scores.rows(); ++r) {
    const double peak = scores.row(r).maxCoeff();
    out.row(r) = (scores.row(r).array() - peak).exp();
    out.row(r) /= out.row(r).sum();
  }
  return out;
}

EmotionClass argmax_class(const Eigen::Ref<const Eigen::RowVectorXd>& row) {
  Eigen::Index best = 0;
  for (Eigen::Index c = 1; c < row.size(); ++c) {
    if (row[c] > row[best]) best = c;
  }
  return class_from_index(static_cast<int>(best));
}

Standardizer Standardizer::fit(const Matrix& x) {
  Standardizer s;
  const auto n = static_cast<double>(x.rows());
  s.mean_ = x.colwise().mean().transpose();
  s.scale_ = Vector::Ones(x.cols());
  if (x.rows() < 2) return s;
  for (Eigen::Index j = 0; j < x.cols(); ++j) {
    const double var = (x.col(j).array() - s.mean_[j]).square().sum() / n;
    if (var > 0) s.scale_[j] = std::sqrt(var);
  }
  return s;
}

Matrix Standardizer::apply(const Matrix& x) const {
  if (x.cols() != mean_.size()) throw Error(ErrorCode::kDimMismatch, "standardizer dim mismatch");
  Matrix out = x;
  out.rowwise() -= mean_.transpose();
  out.array().rowwise() /= scale_.transpose().array();
  return out;
}

}  // namespace mmfusion
