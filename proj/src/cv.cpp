#include "mmfusion/cv.hpp"

#include <future>

#include "mmfusion/error.hpp"
#include "mmfusion/random.hpp"

namespace mmfusion {
namespace {

template <typename Source>
Matrix take_rows(const Source& m, const std::vector<std::size_t>& rows) {
  Matrix out(static_cast<Eigen::Index>(rows.size()), m.cols());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    out.row(static_cast<Eigen::Index>(i)) = m.row(static_cast<Eigen::Index>(rows[i])).template cast<double>();
  }
  return out;
}

std::vector<EmotionClass> take_labels(const std::vector<EmotionClass>& y, const std::vector<std::size_t>& rows) {
  std::vector<EmotionClass> out;
  out.reserve(rows.size());
  for (auto r : rows) out.push_back(y[r]);
  return out;
}

struct FoldOutput {
  std::vector<ConfusionMatrix> classifiers;
  std::vector<ConfusionMatrix> probes;  // empty when no probes ran
};

struct FoldPlan {
  const AlignedDataset& data;
  FusionStrategy strategy;
  const TrainConfig& cfg;
  const CvOptions& options;
  const FeatureMatrix* early_fused;  // set for early fusion
  bool train_probes;
  bool late_from_files;
};

void standardize_pair(Matrix& train, Matrix& test) {
  const auto s = Standardizer::fit(train);
  train = s.apply(train);
  if (test.rows() > 0) test = s.apply(test);
}

FoldOutput run_fold(const FoldPlan& plan, const FoldSpec& fold) {
  const auto labels = plan.data.labels();
  const auto y_train = take_labels(labels, fold.train_rows);
  const auto y_test = take_labels(labels, fold.test_rows);

  FoldOutput out;
  std::array<FeatureMatrix, kNumModalities> train_prob;
  std::array<FeatureMatrix, kNumModalities> test_prob;

  if (plan.train_probes) {
    for (std::size_t m = 0; m < kNumModalities; ++m) {
      Matrix x_train = take_rows(plan.data.features[m], fold.train_rows);
      Matrix x_test = take_rows(plan.data.features[m], fold.test_rows);
      if (plan.options.standardize) standardize_pair(x_train, x_test);
      TrainConfig probe_cfg = plan.cfg;
      probe_cfg.seed = probe_seed(plan.cfg.seed, m);
      const MlpModel probe = train_mlp(x_train, y_train, probe_cfg);
      const Matrix p_test = probe.predict_proba(x_test);
      out.probes.push_back(confusion_matrix(y_test, probe.predict(x_test)));
      train_prob[m] = probe.predict_proba(x_train).cast<float>();
      test_prob[m] = p_test.cast<float>();
    }
  }

  Matrix x_train;
  Matrix x_test;
  if (plan.strategy.level == FusionLevel::kEarly) {
    x_train = take_rows(*plan.early_fused, fold.train_rows);
    x_test = take_rows(*plan.early_fused, fold.test_rows);
  } else {
    if (plan.late_from_files) {
      const auto& probs = *plan.data.probabilities;
      for (std::size_t m = 0; m < kNumModalities; ++m) {
        train_prob[m] = take_rows(probs[m], fold.train_rows).cast<float>();
        test_prob[m] = take_rows(probs[m], fold.test_rows).cast<float>();
      }
    }
    x_train = fuse_rows(plan.strategy, train_prob[0], train_prob[1], train_prob[2]).cast<double>();
    x_test = fuse_rows(plan.strategy, test_prob[0], test_prob[1], test_prob[2]).cast<double>();
  }
  if (plan.options.standardize) standardize_pair(x_train, x_test);

  for (ClassifierKind kind : plan.options.classifiers) {
    const ClassifierModel model = train(kind, x_train, y_train, plan.cfg);
    out.classifiers.push_back(confusion_matrix(y_test, predict(model, x_test)));
  }
  return out;
}

EvaluationResult collect(const std::array<FoldSpec, kNumSessions>& folds, const std::vector<FoldOutput>& outputs,
                         std::size_t slot, bool probes) {
  EvaluationResult res;
  for (std::size_t f = 0; f < folds.size(); ++f) {
    const auto& cm = probes ? outputs[f].probes[slot] : outputs[f].classifiers[slot];
    res.folds.push_back({folds[f].fold_index, folds[f].test_session, cm, metrics(cm)});
    res.pooled += cm;
  }
  res.aggregate = metrics(res.pooled);
  return res;
}

}  // namespace

const ClassifierResult* CvReport::find(ClassifierKind kind) const {
  for (const auto& c : classifiers) {
    if (c.kind == kind) return &c;
  }
  return nullptr;
}

std::uint64_t probe_seed(std::uint64_t seed, std::size_t modality) {
  return derive_seed(seed, 0x50524F4245ull + modality);
}

CvReport run_cv(const AlignedDataset& dataset, FusionStrategy strategy, const TrainConfig& cfg,
                const CvOptions& options) {
  cfg.validate();
  if (options.classifiers.empty()) throw Error(ErrorCode::kValidation, "no classifiers selected");
  const auto folds = session_folds(dataset.manifest);

  CvReport report;
  report.strategy = strategy;
  report.config = cfg;
  report.options = options;
  report.utterances = dataset.size();
  report.probabilities_from_files = strategy.level == FusionLevel::kLate && dataset.probabilities.has_value();

  FeatureMatrix early;
  if (strategy.level == FusionLevel::kEarly) {
    early = fuse_rows(strategy, dataset.features[0], dataset.features[1], dataset.features[2]);
  }
  const bool train_probes = (strategy.level == FusionLevel::kLate && !report.probabilities_from_files) ||
                            options.unimodal_probes;
  const FoldPlan plan{dataset, strategy, cfg, options,
                      strategy.level == FusionLevel::kEarly ? &early : nullptr, train_probes,
                      report.probabilities_from_files};

  std::vector<FoldOutput> outputs(folds.size());
  if (options.parallel_folds) {
    std::vector<std::future<FoldOutput>> pending;
    for (const auto& fold : folds) {
      pending.push_back(std::async(std::launch::async, [&plan, &fold] { return run_fold(plan, fold); }));
    }
    for (std::size_t f = 0; f < pending.size(); ++f) outputs[f] = pending[f].get();
  } else {
    for (std::size_t f = 0; f < folds.size(); ++f) outputs[f] = run_fold(plan, folds[f]);
  }

  double accuracy_sum = 0.0;
  for (std::size_t c = 0; c < options.classifiers.size(); ++c) {
    report.classifiers.push_back({options.classifiers[c], collect(folds, outputs, c, false)});
    accuracy_sum += report.classifiers.back().result.aggregate.accuracy;
  }
  report.classifier_average_accuracy = accuracy_sum / static_cast<double>(options.classifiers.size());
  if (train_probes) {
    for (std::size_t m = 0; m < kNumModalities; ++m) {
      report.probes.push_back({kFusionOrder[m], collect(folds, outputs, m, true)});
    }
  }
  return report;
}

std::vector<CvReport> run_grid(const AlignedDataset& dataset, const TrainConfig& cfg, const CvOptions& options) {
  std::vector<CvReport> out;
  for (const auto& strategy : all_strategies()) out.push_back(run_cv(dataset, strategy, cfg, options));
  return out;
}

}  // namespace mmfusion
