#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "mmfusion/emotion.hpp"
#include "mmfusion/linalg.hpp"
#include "mmfusion/train_config.hpp"

namespace mmfusion {

/// Binary regression tree. Internal nodes route x[feature] <= threshold left.
struct RegressionTree {
  struct Node {
    std::int32_t feature = -1;  // -1 marks a leaf
    float threshold = 0.0f;
    std::uint32_t left = 0;
    std::uint32_t right = 0;
    float value = 0.0f;  // leaf output

    bool is_leaf() const noexcept { return feature < 0; }
  };

  std::vector<Node> nodes;  // nodes[0] is the root

  double evaluate(const Eigen::Ref<const Eigen::RowVectorXd>& x) const;
  int depth() const;
};

/// Softmax gradient boosting: score_c(x) = shrinkage * sum_r tree[r][c](x).
struct GbtModel {
  std::size_t dim = 0;
  int rounds = 0;
  float shrinkage = 0.1f;
  /// trees[r * 4 + c] is round r's tree for class c.
  std::vector<RegressionTree> trees;

  const RegressionTree& tree(int round, int cls) const {
    return trees[static_cast<std::size_t>(round * kNumClasses + cls)];
  }

  /// n x 4 ensemble scores.
  Matrix scores(const Matrix& x) const;
  Matrix predict_proba(const Matrix& x) const;
  std::vector<EmotionClass> predict(const Matrix& x) const;
};

struct GbtFit {
  GbtModel model;
  /// Mean training cross-entropy before round 1 and after every round.
  std::vector<double> round_loss;
};

/// Each round fits one least-squares tree per class to the residual
/// y_c - p_c using exact greedy splits, then sets every leaf to the Newton
/// step sum(residual) / sum(p_c (1 - p_c)).
GbtFit train_gbt_detailed(const Matrix& x, std::span<const EmotionClass> y, const TrainConfig& cfg);
GbtModel train_gbt(const Matrix& x, std::span<const EmotionClass> y, const TrainConfig& cfg);

}  // namespace mmfusion
