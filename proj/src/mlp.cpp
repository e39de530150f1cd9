#include "mmfusion/mlp.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "mmfusion/error.hpp"
#include "mmfusion/random.hpp"

namespace mmfusion {
namespace {

Matrix one_hot(std::span<const EmotionClass> y) {
  Matrix t = Matrix::Zero(static_cast<Eigen::Index>(y.size()), kNumClasses);
  for (std::size_t i = 0; i < y.size(); ++i) t(static_cast<Eigen::Index>(i), class_index(y[i])) = 1.0;
  return t;
}

struct Forward {
  Matrix pre;     // x W1' + b1
  Matrix hidden;  // relu(pre)
  Matrix logits;
};

Forward forward(const MlpParams& p, const Matrix& x) {
  Forward f;
  f.pre = x * p.w1.transpose();
  f.pre.rowwise() += p.b1.transpose();
  f.hidden = f.pre.cwiseMax(0.0);
  f.logits = f.hidden * p.w2.transpose();
  f.logits.rowwise() += p.b2.transpose();
  return f;
}

double cross_entropy(const Matrix& logits, std::span<const EmotionClass> y) {
  double total = 0.0;
  for (Eigen::Index r = 0; r < logits.rows(); ++r) {
    const double peak = logits.row(r).maxCoeff();
    const double lse = peak + std::log((logits.row(r).array() - peak).exp().sum());
    total += lse - logits(r, class_index(y[static_cast<std::size_t>(r)]));
  }
  return logits.rows() > 0 ? total / static_cast<double>(logits.rows()) : 0.0;
}

void check_dim(const MlpModel& m, const Matrix& x) {
  if (static_cast<std::size_t>(x.cols()) != m.dim()) {
    throw Error(ErrorCode::kDimMismatch,
                "MLP expects dim " + std::to_string(m.dim()) + ", got " + std::to_string(x.cols()));
  }
}

template <typename Param>
void adam_step(Param& param, const Param& grad, Param& m, Param& v, double lr, double bc1, double bc2) {
  constexpr double kBeta1 = 0.9;
  constexpr double kBeta2 = 0.999;
  constexpr double kEps = 1e-8;
  m = kBeta1 * m + (1.0 - kBeta1) * grad;
  v = kBeta2 * v + (1.0 - kBeta2) * grad.cwiseProduct(grad);
  param.array() -= lr * (m.array() / bc1) / ((v.array() / bc2).sqrt() + kEps);
}

}  // namespace

MlpParams MlpParams::from_model(const MlpModel& model) {
  return {model.w1.cast<double>(), model.b1.cast<double>(), model.w2.cast<double>(), model.b2.cast<double>()};
}

MlpModel MlpParams::to_model() const {
  return {w1.cast<float>(), b1.cast<float>(), w2.cast<float>(), b2.cast<float>()};
}

Matrix MlpModel::logits(const Matrix& x) const {
  if (x.rows() == 0) return Matrix(0, kNumClasses);
  check_dim(*this, x);
  return forward(MlpParams::from_model(*this), x).logits;
}

Matrix MlpModel::predict_proba(const Matrix& x) const { return softmax_rows(logits(x)); }

std::vector<EmotionClass> MlpModel::predict(const Matrix& x) const {
  const Matrix p = predict_proba(x);
  std::vector<EmotionClass> out;
  out.reserve(static_cast<std::size_t>(p.rows()));
  for (Eigen::Index r = 0; r < p.rows(); ++r) out.push_back(argmax_class(p.row(r)));
  return out;
}

MlpModel init_mlp(std::size_t dim, std::size_t hidden_width, std::uint64_t seed) {
  if (dim == 0 || hidden_width == 0) throw Error(ErrorCode::kValidation, "MLP dims must be positive");
  Rng rng(derive_seed(seed, 0x4D4C50));
  const auto d = static_cast<Eigen::Index>(dim);
  const auto h = static_cast<Eigen::Index>(hidden_width);
  auto fill = [&rng](auto& m, double limit) {
    for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = static_cast<float>(rng.uniform(-limit, limit));
  };
  MlpModel model{MlpModel::WeightMatrix(h, d), Eigen::VectorXf(h), MlpModel::WeightMatrix(kNumClasses, h),
                 Eigen::VectorXf(kNumClasses)};
  const double limit1 = std::sqrt(6.0 / static_cast<double>(dim + hidden_width));
  const double limit2 = std::sqrt(6.0 / static_cast<double>(hidden_width + kNumClasses));
  fill(model.w1, limit1);
  fill(model.b1, limit1);
  fill(model.w2, limit2);
  fill(model.b2, limit2);
  return model;
}

double mlp_loss(const MlpParams& params, const Matrix& x, std::span<const EmotionClass> y) {
  return cross_entropy(forward(params, x).logits, y);
}

MlpParams mlp_gradient(const MlpParams& params, const Matrix& x, std::span<const EmotionClass> y) {
  const Forward f = forward(params, x);
  const double inv_n = 1.0 / static_cast<double>(x.rows());
  const Matrix d_logits = (softmax_rows(f.logits) - one_hot(y)) * inv_n;
  Matrix d_hidden = d_logits * params.w2;
  d_hidden.array() *= (f.pre.array() > 0.0).cast<double>();

  MlpParams g;
  g.w2 = d_logits.transpose() * f.hidden;
  g.b2 = d_logits.colwise().sum().transpose();
  g.w1 = d_hidden.transpose() * x;
  g.b1 = d_hidden.colwise().sum().transpose();
  return g;
}

MlpFit train_mlp_detailed(const Matrix& x, std::span<const EmotionClass> y, const TrainConfig& cfg) {
  cfg.validate();
  check_training_data(x, y);
  const auto n = static_cast<std::size_t>(x.rows());

  MlpFit fit;
  MlpParams p = MlpParams::from_model(
      init_mlp(static_cast<std::size_t>(x.cols()), static_cast<std::size_t>(cfg.mlp.hidden_width), cfg.seed));

  MlpParams m{Matrix::Zero(p.w1.rows(), p.w1.cols()), Vector::Zero(p.b1.size()),
              Matrix::Zero(p.w2.rows(), p.w2.cols()), Vector::Zero(p.b2.size())};
  MlpParams v = m;

  Rng rng(derive_seed(cfg.seed, 0x5348554646));
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  const auto batch = static_cast<std::size_t>(cfg.mlp.batch_size);
  std::int64_t step = 0;

  for (int epoch = 0; epoch < cfg.mlp.epochs; ++epoch) {
    rng.shuffle(std::span<std::size_t>(order));
    for (std::size_t start = 0; start < n; start += batch) {
      const std::size_t len = std::min(batch, n - start);
      Matrix xb(static_cast<Eigen::Index>(len), x.cols());
      std::vector<EmotionClass> yb(len);
      for (std::size_t k = 0; k < len; ++k) {
        xb.row(static_cast<Eigen::Index>(k)) = x.row(static_cast<Eigen::Index>(order[start + k]));
        yb[k] = y[order[start + k]];
      }
      const MlpParams g = mlp_gradient(p, xb, yb);
      ++step;
      const double bc1 = 1.0 - std::pow(0.9, static_cast<double>(step));
      const double bc2 = 1.0 - std::pow(0.999, static_cast<double>(step));
      const double lr = cfg.mlp.learning_rate;
      adam_step(p.w1, g.w1, m.w1, v.w1, lr, bc1, bc2);
      adam_step(p.b1, g.b1, m.b1, v.b1, lr, bc1, bc2);
      adam_step(p.w2, g.w2, m.w2, v.w2, lr, bc1, bc2);
      adam_step(p.b2, g.b2, m.b2, v.b2, lr, bc1, bc2);
    }
    fit.epoch_loss.push_back(mlp_loss(p, x, y));
  }
  fit.model = p.to_model();
  return fit;
}

MlpModel train_mlp(const Matrix& x, std::span<const EmotionClass> y, const TrainConfig& cfg) {
  return train_mlp_detailed(x, y, cfg).model;
}

double mlp_grad_check(const MlpModel& model, const Matrix& x, std::span<const EmotionClass> y) {
  if (x.rows() < 1 || x.rows() > 8) throw Error(ErrorCode::kValidation, "grad check batch must hold 1..8 rows");
  if (x.cols() > 16) throw Error(ErrorCode::kValidation, "grad check dim must be <= 16");
  if (static_cast<std::size_t>(x.rows()) != y.size()) throw Error(ErrorCode::kDimMismatch, "rows != labels");
  check_dim(model, x);

  constexpr double kStep = 1e-5;
  constexpr double kFloor = 1e-6;
  MlpParams p = MlpParams::from_model(model);
  const MlpParams analytic = mlp_gradient(p, x, y);

  double worst = 0.0;
  auto probe = [&](double& slot, double exact) {
    const double saved = slot;
    slot = saved + kStep;
    const double up = mlp_loss(p, x, y);
    slot = saved - kStep;
    const double down = mlp_loss(p, x, y);
    slot = saved;
    const double numeric = (up - down) / (2.0 * kStep);
    const double denom = std::max({std::abs(exact), std::abs(numeric), kFloor});
    worst = std::max(worst, std::abs(exact - numeric) / denom);
  };
  for (Eigen::Index i = 0; i < p.w1.size(); ++i) probe(p.w1.data()[i], analytic.w1.data()[i]);
  for (Eigen::Index i = 0; i < p.b1.size(); ++i) probe(p.b1.data()[i], analytic.b1.data()[i]);
  for (Eigen::Index i = 0; i < p.w2.size(); ++i) probe(p.w2.data()[i], analytic.w2.data()[i]);
  for (Eigen::Index i = 0; i < p.b2.size(); ++i) probe(p.b2.data()[i], analytic.b2.data()[i]);
  return worst;
}

}  // namespace mmfusion
