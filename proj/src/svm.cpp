#include "mmfusion/svm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "mmfusion/error.hpp"
#include "mmfusion/random.hpp"

namespace mmfusion {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct BinaryResult {
  Vector w;  // last entry is the bias
  std::vector<double> alpha;
  int epochs = 0;
  double kkt_violation = 0.0;
  bool converged = false;
};

double projected_gradient(double g, double alpha, double upper) {
  if (alpha <= 0.0) return std::min(g, 0.0);
  if (alpha >= upper) return std::max(g, 0.0);
  return g;
}

// Solves  min_a 0.5 a'Qa - e'a,  0 <= a_i <= C,  Q_ij = y_i y_j [x_i,1].[x_j,1]
// one coordinate at a time, maintaining w = sum_i a_i y_i [x_i,1].
BinaryResult solve_binary(const Matrix& x, const std::vector<double>& y, const SvmConfig& cfg, Rng& rng) {
  const auto n = static_cast<std::size_t>(x.rows());
  const Eigen::Index d = x.cols();
  const double upper = cfg.c_penalty;

  BinaryResult res;
  res.w = Vector::Zero(d + 1);
  res.alpha.assign(n, 0.0);

  std::vector<double> qd(n);
  for (std::size_t i = 0; i < n; ++i) qd[i] = x.row(static_cast<Eigen::Index>(i)).squaredNorm() + 1.0;

  auto gradient = [&](std::size_t i) {
    const auto r = static_cast<Eigen::Index>(i);
    return y[i] * (x.row(r).dot(res.w.head(d)) + res.w[d]) - 1.0;
  };

  auto kkt_violation = [&] {
    double lo = 0.0;
    double hi = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double pg = projected_gradient(gradient(i), res.alpha[i], upper);
      lo = std::min(lo, pg);
      hi = std::max(hi, pg);
    }
    return hi - lo;
  };

  std::vector<std::size_t> index(n);
  std::iota(index.begin(), index.end(), std::size_t{0});
  std::size_t active = n;
  double pg_max_old = kInf;
  double pg_min_old = -kInf;

  int epoch = 0;
  while (epoch < cfg.max_iterations) {
    ++epoch;
    rng.shuffle(std::span<std::size_t>(index.data(), active));
    double pg_max = -kInf;
    double pg_min = kInf;

    for (std::size_t s = 0; s < active; ++s) {
      const std::size_t i = index[s];
      const double g = gradient(i);
      double& a = res.alpha[i];

      double pg = 0.0;
      if (a <= 0.0) {
        if (g > pg_max_old) {
          std::swap(index[s], index[--active]);
          --s;
          continue;
        }
        if (g < 0.0) pg = g;
      } else if (a >= upper) {
        if (g < pg_min_old) {
          std::swap(index[s], index[--active]);
          --s;
          continue;
        }
        if (g > 0.0) pg = g;
      } else {
        pg = g;
      }
      pg_max = std::max(pg_max, pg);
      pg_min = std::min(pg_min, pg);

      if (std::abs(pg) > 1e-12) {
        const double old = a;
        a = std::clamp(a - g / qd[i], 0.0, upper);
        const double step = (a - old) * y[i];
        const auto r = static_cast<Eigen::Index>(i);
        res.w.head(d) += step * x.row(r).transpose();
        res.w[d] += step;
      }
    }

    if (pg_max - pg_min <= cfg.tolerance) {
      // The sweep saw gradients before its own updates; confirm on the final state.
      if (active == n && kkt_violation() <= cfg.tolerance) {
        res.converged = true;
        break;
      }
      // Shrunk variables may have drifted; re-examine everything.
      active = n;
      pg_max_old = kInf;
      pg_min_old = -kInf;
      continue;
    }
    pg_max_old = pg_max <= 0.0 ? kInf : pg_max;
    pg_min_old = pg_min >= 0.0 ? -kInf : pg_min;
  }
  res.epochs = epoch;
  res.kkt_violation = kkt_violation();
  return res;
}

}  // namespace

Matrix SvmModel::decision_function(const Matrix& x) const {
  if (x.rows() == 0) return Matrix(0, kNumClasses);
  if (static_cast<std::size_t>(x.cols()) != dim()) {
    throw Error(ErrorCode::kDimMismatch, "SVM expects dim " + std::to_string(dim()) + ", got " +
                                             std::to_string(x.cols()));
  }
  Matrix scores = x * weights.cast<double>().transpose();
  scores.rowwise() += bias.cast<double>().transpose();
  return scores;
}

Matrix SvmModel::predict_proba(const Matrix& x) const { return softmax_rows(decision_function(x)); }

std::vector<EmotionClass> SvmModel::predict(const Matrix& x) const {
  const Matrix p = predict_proba(x);
  std::vector<EmotionClass> out;
  out.reserve(static_cast<std::size_t>(p.rows()));
  for (Eigen::Index r = 0; r < p.rows(); ++r) out.push_back(argmax_class(p.row(r)));
  return out;
}

SvmFit train_svm_detailed(const Matrix& x, std::span<const EmotionClass> y, const TrainConfig& cfg) {
  cfg.validate();
  check_training_data(x, y);

  SvmFit fit;
  fit.model.weights.resize(kNumClasses, x.cols());
  for (int c = 0; c < kNumClasses; ++c) {
    std::vector<double> sign(y.size());
    for (std::size_t i = 0; i < y.size(); ++i) sign[i] = class_index(y[i]) == c ? 1.0 : -1.0;
    Rng rng(derive_seed(cfg.seed, static_cast<std::uint64_t>(c) + 1));
    BinaryResult r = solve_binary(x, sign, cfg.svm, rng);

    fit.model.weights.row(c) = r.w.head(x.cols()).cast<float>().transpose();
    fit.model.bias[c] = static_cast<float>(r.w[x.cols()]);
    const auto k = static_cast<std::size_t>(c);
    fit.diagnostics.alpha[k] = std::move(r.alpha);
    fit.diagnostics.epochs[k] = r.epochs;
    fit.diagnostics.kkt_violation[k] = r.kkt_violation;
    fit.diagnostics.converged[k] = r.converged;
  }
  return fit;
}

SvmModel train_svm(const Matrix& x, std::span<const EmotionClass> y, const TrainConfig& cfg) {
  return train_svm_detailed(x, y, cfg).model;
}

}  // namespace mmfusion
