#include "mmfusion/gbt.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <optional>

#include "mmfusion/error.hpp"

namespace mmfusion {
namespace {

using ColMatrix = Eigen::MatrixXd;

struct NodeStats {
  double sum = 0.0;
  std::size_t count = 0;
};

struct BestSplit {
  double gain = 0.0;
  int feature = -1;
  float threshold = 0.0f;
};

// Smallest float t with lo <= t < hi, preferring the midpoint; nullopt when
// no float separates the two values.
std::optional<float> split_threshold(double lo, double hi) {
  float t = static_cast<float>(0.5 * (lo + hi));
  if (static_cast<double>(t) < lo) t = std::nextafter(t, std::numeric_limits<float>::infinity());
  if (static_cast<double>(t) >= lo && static_cast<double>(t) < hi) return t;
  return std::nullopt;
}

struct TreeBuild {
  RegressionTree tree;
  std::vector<std::uint32_t> leaf_of;  // sample -> leaf node index
};

class TreeBuilder {
 public:
  TreeBuilder(const ColMatrix& x, const std::vector<std::vector<std::uint32_t>>& order)
      : x_(x), order_(order) {}

  TreeBuild build(const Vector& residual, const Vector& hessian, int max_depth) const {
    const auto n = static_cast<std::size_t>(x_.rows());
    const auto d = static_cast<std::size_t>(x_.cols());
    TreeBuild out;
    auto& nodes = out.tree.nodes;
    out.leaf_of.assign(n, 0);

    nodes.emplace_back();
    std::vector<std::uint32_t> frontier = {0};  // node indices at the current depth
    std::vector<NodeStats> stats(1);
    stats[0].sum = residual.sum();
    stats[0].count = n;
    std::vector<std::int32_t> slot(n, 0);  // sample -> frontier position, -1 once in a final leaf

    std::vector<double> left_sum;
    std::vector<std::size_t> left_count;
    std::vector<double> last;

    for (int depth = 0; depth < max_depth && !frontier.empty(); ++depth) {
      const std::size_t k = frontier.size();
      std::vector<BestSplit> best(k);
      std::vector<double> parent(k);
      for (std::size_t q = 0; q < k; ++q) parent[q] = stats[q].sum * stats[q].sum / static_cast<double>(stats[q].count);

      for (std::size_t j = 0; j < d; ++j) {
        left_sum.assign(k, 0.0);
        left_count.assign(k, 0);
        last.assign(k, 0.0);
        const auto col = x_.col(static_cast<Eigen::Index>(j));
        for (std::uint32_t i : order_[j]) {
          const std::int32_t q = slot[i];
          if (q < 0) continue;
          const auto qi = static_cast<std::size_t>(q);
          const double v = col[i];
          if (left_count[qi] > 0 && v > last[qi]) {
            const double rs = stats[qi].sum - left_sum[qi];
            const auto rn = stats[qi].count - left_count[qi];
            const double gain = left_sum[qi] * left_sum[qi] / static_cast<double>(left_count[qi]) +
                                rs * rs / static_cast<double>(rn) - parent[qi];
            if (gain > best[qi].gain) {
              if (auto t = split_threshold(last[qi], v)) best[qi] = {gain, static_cast<int>(j), *t};
            }
          }
          left_sum[qi] += residual[i];
          ++left_count[qi];
          last[qi] = v;
        }
      }

      std::vector<std::uint32_t> next_frontier;
      std::vector<NodeStats> next_stats;
      std::vector<std::int32_t> left_slot(k, -1);
      for (std::size_t q = 0; q < k; ++q) {
        const double min_gain = 1e-10 * std::max(1.0, parent[q]);
        if (best[q].feature < 0 || best[q].gain <= min_gain) continue;
        const std::uint32_t id = frontier[q];
        const auto left = static_cast<std::uint32_t>(nodes.size());
        nodes.emplace_back();
        nodes.emplace_back();
        auto& node = nodes[id];
        node.feature = best[q].feature;
        node.threshold = best[q].threshold;
        node.left = left;
        node.right = left + 1;
        left_slot[q] = static_cast<std::int32_t>(next_frontier.size());
        next_frontier.push_back(left);
        next_frontier.push_back(left + 1);
        next_stats.resize(next_frontier.size());
      }
      for (std::size_t i = 0; i < n; ++i) {
        const std::int32_t q = slot[i];
        if (q < 0) continue;
        const auto qi = static_cast<std::size_t>(q);
        if (left_slot[qi] < 0) {
          out.leaf_of[i] = frontier[qi];
          slot[i] = -1;
          continue;
        }
        const auto& node = nodes[frontier[qi]];
        const bool go_left = x_(static_cast<Eigen::Index>(i), node.feature) <= static_cast<double>(node.threshold);
        const std::int32_t s = left_slot[qi] + (go_left ? 0 : 1);
        slot[i] = s;
        next_stats[static_cast<std::size_t>(s)].sum += residual[static_cast<Eigen::Index>(i)];
        ++next_stats[static_cast<std::size_t>(s)].count;
      }
      frontier = std::move(next_frontier);
      stats = std::move(next_stats);
    }
    for (std::size_t i = 0; i < n; ++i) {
      if (slot[i] >= 0) out.leaf_of[i] = frontier[static_cast<std::size_t>(slot[i])];
    }

    std::vector<double> leaf_r(nodes.size(), 0.0);
    std::vector<double> leaf_h(nodes.size(), 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      leaf_r[out.leaf_of[i]] += residual[static_cast<Eigen::Index>(i)];
      leaf_h[out.leaf_of[i]] += hessian[static_cast<Eigen::Index>(i)];
    }
    for (std::size_t id = 0; id < nodes.size(); ++id) {
      if (!nodes[id].is_leaf()) continue;
      const double value = leaf_h[id] > 1e-300 ? leaf_r[id] / leaf_h[id] : 0.0;
      nodes[id].value = static_cast<float>(value);
      if (!std::isfinite(nodes[id].value)) {
        throw Error(ErrorCode::kComputation, "non-finite leaf value in gradient boosting");
      }
    }
    return out;
  }

 private:
  const ColMatrix& x_;
  const std::vector<std::vector<std::uint32_t>>& order_;
};

double mean_cross_entropy(const Matrix& scores, std::span<const EmotionClass> y) {
  double total = 0.0;
  for (Eigen::Index r = 0; r < scores.rows(); ++r) {
    const double peak = scores.row(r).maxCoeff();
    const double lse = peak + std::log((scores.row(r).array() - peak).exp().sum());
    total += lse - scores(r, class_index(y[static_cast<std::size_t>(r)]));
  }
  return total / static_cast<double>(scores.rows());
}

}  // namespace

double RegressionTree::evaluate(const Eigen::Ref<const Eigen::RowVectorXd>& x) const {
  std::uint32_t id = 0;
  while (!nodes[id].is_leaf()) {
    const auto& node = nodes[id];
    id = x[node.feature] <= static_cast<double>(node.threshold) ? node.left : node.right;
  }
  return nodes[id].value;
}

int RegressionTree::depth() const {
  std::vector<int> level(nodes.size(), 0);
  int deepest = 0;
  for (std::size_t id = 0; id < nodes.size(); ++id) {
    deepest = std::max(deepest, level[id]);
    if (!nodes[id].is_leaf()) {
      level[nodes[id].left] = level[id] + 1;
      level[nodes[id].right] = level[id] + 1;
    }
  }
  return deepest;
}

Matrix GbtModel::scores(const Matrix& x) const {
  if (x.rows() == 0) return Matrix(0, kNumClasses);
  if (static_cast<std::size_t>(x.cols()) != dim) {
    throw Error(ErrorCode::kDimMismatch,
                "GBT expects dim " + std::to_string(dim) + ", got " + std::to_string(x.cols()));
  }
  Matrix out = Matrix::Zero(x.rows(), kNumClasses);
  const auto shrink = static_cast<double>(shrinkage);
  for (Eigen::Index r = 0; r < x.rows(); ++r) {
    for (int round = 0; round < rounds; ++round) {
      for (int c = 0; c < kNumClasses; ++c) out(r, c) += shrink * tree(round, c).evaluate(x.row(r));
    }
  }
  return out;
}

Matrix GbtModel::predict_proba(const Matrix& x) const { return softmax_rows(scores(x)); }

std::vector<EmotionClass> GbtModel::predict(const Matrix& x) const {
  const Matrix p = predict_proba(x);
  std::vector<EmotionClass> out;
  out.reserve(static_cast<std::size_t>(p.rows()));
  for (Eigen::Index r = 0; r < p.rows(); ++r) out.push_back(argmax_class(p.row(r)));
  return out;
}

GbtFit train_gbt_detailed(const Matrix& x, std::span<const EmotionClass> y, const TrainConfig& cfg) {
  cfg.validate();
  check_training_data(x, y);
  const auto n = static_cast<std::size_t>(x.rows());
  const auto d = static_cast<std::size_t>(x.cols());

  GbtFit fit;
  fit.model.dim = d;
  fit.model.rounds = cfg.gbt.rounds;
  fit.model.shrinkage = static_cast<float>(cfg.gbt.shrinkage);
  fit.model.trees.reserve(static_cast<std::size_t>(cfg.gbt.rounds) * kNumClasses);

  const ColMatrix xc = x;
  std::vector<std::vector<std::uint32_t>> order(d, std::vector<std::uint32_t>(n));
  for (std::size_t j = 0; j < d; ++j) {
    auto& o = order[j];
    std::iota(o.begin(), o.end(), 0u);
    const auto col = xc.col(static_cast<Eigen::Index>(j));
    std::stable_sort(o.begin(), o.end(), [&col](std::uint32_t a, std::uint32_t b) { return col[a] < col[b]; });
  }
  const TreeBuilder builder(xc, order);

  Matrix scores = Matrix::Zero(x.rows(), kNumClasses);
  fit.round_loss.push_back(mean_cross_entropy(scores, y));
  const auto shrink = static_cast<double>(fit.model.shrinkage);

  for (int round = 0; round < cfg.gbt.rounds; ++round) {
    const Matrix p = softmax_rows(scores);
    std::array<TreeBuild, kNumClasses> built;
    for (int c = 0; c < kNumClasses; ++c) {
      Vector residual(x.rows());
      Vector hessian(x.rows());
      for (std::size_t i = 0; i < n; ++i) {
        const auto r = static_cast<Eigen::Index>(i);
        const double target = class_index(y[i]) == c ? 1.0 : 0.0;
        residual[r] = target - p(r, c);
        hessian[r] = p(r, c) * (1.0 - p(r, c));
      }
      built[static_cast<std::size_t>(c)] = builder.build(residual, hessian, cfg.gbt.max_depth);
    }
    for (int c = 0; c < kNumClasses; ++c) {
      const auto& b = built[static_cast<std::size_t>(c)];
      for (std::size_t i = 0; i < n; ++i) {
        scores(static_cast<Eigen::Index>(i), c) += shrink * static_cast<double>(b.tree.nodes[b.leaf_of[i]].value);
      }
      fit.model.trees.push_back(std::move(built[static_cast<std::size_t>(c)].tree));
    }
    fit.round_loss.push_back(mean_cross_entropy(scores, y));
  }
  return fit;
}

GbtModel train_gbt(const Matrix& x, std::span<const EmotionClass> y, const TrainConfig& cfg) {
  return train_gbt_detailed(x, y, cfg).model;
}

}  // namespace mmfusion
