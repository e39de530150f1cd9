#pragma once

#include <optional>
#include <string>
#include <vector>

#include "mmfusion/classifier.hpp"
#include "mmfusion/dataset.hpp"
#include "mmfusion/folds.hpp"
#include "mmfusion/fusion.hpp"
#include "mmfusion/metrics.hpp"
#include "mmfusion/train_config.hpp"

namespace mmfusion {

struct CvOptions {
  std::vector<ClassifierKind> classifiers = {kAllClassifiers.begin(), kAllClassifiers.end()};
  /// Per-feature z-scoring fit on each training fold.
  bool standardize = false;
  /// Train per-modality probes in early mode too (late mode always has them,
  /// unless probability files are attached).
  bool unimodal_probes = false;
  /// Run the five folds on separate threads. Results are identical either way.
  bool parallel_folds = false;
};

struct FoldResult {
  int fold_index = 0;
  int test_session = 0;
  ConfusionMatrix confusion;
  MetricsReport metrics;
};

/// Per-fold results plus the metrics of the pooled (summed) confusion matrix.
struct EvaluationResult {
  std::vector<FoldResult> folds;
  ConfusionMatrix pooled;
  MetricsReport aggregate;
};

struct ClassifierResult {
  ClassifierKind kind = ClassifierKind::kSvm;
  EvaluationResult result;
};

/// Unimodal MLP probe trained on one modality's features.
struct ProbeResult {
  Modality modality = Modality::kText;
  EvaluationResult result;
};

struct CvReport {
  FusionStrategy strategy;
  TrainConfig config;
  CvOptions options;
  std::vector<ClassifierResult> classifiers;
  /// Mean of the classifiers' aggregate accuracies.
  double classifier_average_accuracy = 0.0;
  std::vector<ProbeResult> probes;
  /// Late fusion consumed attached probability sets instead of probes.
  bool probabilities_from_files = false;
  std::size_t utterances = 0;
  /// Free-form echo of the invocation that produced the report.
  std::string run_config;

  const ClassifierResult* find(ClassifierKind kind) const;
};

CvReport run_cv(const AlignedDataset& dataset, FusionStrategy strategy, const TrainConfig& cfg,
                const CvOptions& options = {});

/// All six strategies in all_strategies() order.
std::vector<CvReport> run_grid(const AlignedDataset& dataset, const TrainConfig& cfg, const CvOptions& options = {});

/// Seed used for the probe of modality m (text 0, speech 1, video 2).
std::uint64_t probe_seed(std::uint64_t seed, std::size_t modality);

}  // namespace mmfusion
