#include <gtest/gtest.h>

#include <fstream>
#include <set>

#include "helpers.hpp"
#include "mmfusion/cv.hpp"
#include "mmfusion/error.hpp"
#include "mmfusion/folds.hpp"
#include "mmfusion/metrics.hpp"
#include "mmfusion/pca.hpp"
#include "mmfusion/report.hpp"
#include "oracles.hpp"

using namespace mmfusion;

namespace {

ConfusionMatrix from_rows(const std::array<std::array<std::uint64_t, 4>, 4>& rows) {
  ConfusionMatrix cm;
  cm.counts = rows;
  return cm;
}

SyntheticConfig small_synthetic(std::uint64_t seed = 1) {
  SyntheticConfig cfg;
  cfg.seed = seed;
  cfg.n_per_class_per_session = 5;
  cfg.dim = 8;
  cfg.class_separation = 6.0;
  cfg.modality_informative_fraction = {0.5, 0.5, 0.5};
  return cfg;
}

TrainConfig fast_train(std::uint64_t seed = 1) {
  TrainConfig t;
  t.seed = seed;
  t.mlp.hidden_width = 16;
  t.mlp.epochs = 10;
  t.gbt.rounds = 5;
  t.gbt.max_depth = 2;
  return t;
}

}  // namespace

// ---------------------------------------------------------------- folds

TEST(Folds, PartitionBySession) {
  const auto ds = testutil::synthetic_dataset(small_synthetic());
  const auto folds = session_folds(ds.manifest);
  std::set<std::size_t> seen;
  for (int f = 0; f < kNumSessions; ++f) {
    const auto& fold = folds[static_cast<std::size_t>(f)];
    EXPECT_EQ(fold.fold_index, f + 1);
    EXPECT_EQ(fold.test_session, f + 1);
    EXPECT_EQ(fold.test_rows.size(), 20u);
    EXPECT_EQ(fold.train_rows.size(), 80u);
    for (auto r : fold.test_rows) {
      EXPECT_EQ(ds.manifest[r].session, f + 1);
      EXPECT_TRUE(seen.insert(r).second) << "row in two test sets";
    }
    for (auto r : fold.train_rows) EXPECT_NE(ds.manifest[r].session, f + 1);
    for (int s : fold.train_sessions) EXPECT_NE(s, f + 1);
  }
  EXPECT_EQ(seen.size(), ds.size());
}

TEST(Folds, MissingSessionIsEmptyFold) {
  std::vector<UtteranceMeta> rows;
  for (int s : {1, 2, 4, 5}) rows.push_back({"u" + std::to_string(s), s, "sad", EmotionClass::kSad});
  try {
    session_folds(Manifest(rows));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kEmptyFold);
    EXPECT_NE(std::string(e.what()).find("session 3"), std::string::npos);
  }
}

// ---------------------------------------------------------------- metrics

TEST(Confusion, HandEnumeration) {
  using E = EmotionClass;
  const std::vector<E> t = {E::kAngry, E::kAngry, E::kHappy, E::kNeutral};
  const std::vector<E> p = {E::kAngry, E::kHappy, E::kHappy, E::kSad};
  const auto cm = confusion_matrix(t, p);
  EXPECT_EQ(cm, from_rows({{{1, 1, 0, 0}, {0, 1, 0, 0}, {0, 0, 0, 1}, {0, 0, 0, 0}}}));
  EXPECT_EQ(confusion_matrix(std::vector<E>{}, std::vector<E>{}).total(), 0u);
  EXPECT_THROW(confusion_matrix(t, std::vector<E>{E::kAngry}), Error);
}

TEST(Confusion, PerfectTwoClass) {
  std::vector<EmotionClass> y(50, EmotionClass::kAngry);
  y.insert(y.end(), 50, EmotionClass::kSad);
  const auto cm = confusion_matrix(y, y);
  EXPECT_EQ(cm.counts[0][0], 50u);
  EXPECT_EQ(cm.counts[3][3], 50u);
  EXPECT_EQ(cm.trace(), cm.total());
}

TEST(Metrics, WorkedExample) {
  const auto m = metrics(from_rows({{{8, 1, 1, 0}, {0, 9, 1, 0}, {2, 0, 7, 1}, {0, 1, 1, 8}}}));
  EXPECT_NEAR(m.accuracy, 0.80, 1e-15);
  EXPECT_NEAR(m.per_class[0].precision, 0.8, 1e-15);
  EXPECT_NEAR(m.per_class[0].recall, 0.8, 1e-15);
  EXPECT_NEAR(m.per_class[0].f1, 0.8, 1e-15);
  EXPECT_EQ(m.weighted_recall, m.accuracy);
}

TEST(Metrics, DiagonalIsPerfect) {
  const auto m = metrics(from_rows({{{3, 0, 0, 0}, {0, 3, 0, 0}, {0, 0, 3, 0}, {0, 0, 0, 3}}}));
  EXPECT_EQ(m.accuracy, 1.0);
  for (const auto& c : m.per_class) {
    EXPECT_EQ(c.precision, 1.0);
    EXPECT_EQ(c.recall, 1.0);
    EXPECT_EQ(c.f1, 1.0);
  }
  EXPECT_THROW(metrics(ConfusionMatrix{}), Error);
}

TEST(Metrics, MatchesBruteForceOracle) {
  Rng rng(77);
  for (int trial = 0; trial < 1000; ++trial) {
    const auto n = 1 + rng.index(200);
    std::vector<int> t(n), p(n);
    for (std::size_t i = 0; i < n; ++i) {
      t[i] = static_cast<int>(rng.index(4));
      p[i] = rng.uniform() < 0.5 ? t[i] : static_cast<int>(rng.index(4));
    }
    const auto cm = confusion_matrix(testutil::to_classes(t), testutil::to_classes(p));
    ASSERT_EQ(cm.counts, oracle::confusion(t, p));
    const auto m = metrics(cm);
    const auto o = oracle::scores(t, p);
    ASSERT_EQ(m.accuracy, o.accuracy);
    for (int c = 0; c < 4; ++c) {
      ASSERT_EQ(m.per_class[c].precision, o.precision[c]);
      ASSERT_EQ(m.per_class[c].recall, o.recall[c]);
      ASSERT_EQ(m.per_class[c].f1, o.f1[c]);
      ASSERT_EQ(m.per_class[c].support, o.support[c]);
      const auto& pc = m.per_class[c];
      ASSERT_GE(pc.f1, std::min(pc.precision, pc.recall) - 1e-15);
      ASSERT_LE(pc.f1, std::max(pc.precision, pc.recall) + 1e-15);
    }
    ASSERT_GE(m.macro_f1, 0.0);
    ASSERT_LE(m.macro_f1, 1.0);
    ASSERT_NEAR(m.macro_f1, o.macro_f1, 1e-15);
    ASSERT_NEAR(m.weighted_precision, o.weighted_p, 1e-15);
    ASSERT_NEAR(m.weighted_f1, o.weighted_f1, 1e-15);
    ASSERT_NEAR(m.weighted_recall, o.weighted_r, 1e-15);
    ASSERT_EQ(m.weighted_recall, m.accuracy);
  }
}

// ---------------------------------------------------------------- PCA

TEST(Pca, CollinearPoints) {
  Matrix x(5, 2);
  for (int i = 0; i < 5; ++i) x.row(i) << i - 2.0, 2.0 * (i - 2.0);
  const auto p = pca_project(x, 2);
  EXPECT_NEAR(p.components(0, 0), 1.0 / std::sqrt(5.0), 1e-8);
  EXPECT_NEAR(p.components(0, 1), 2.0 / std::sqrt(5.0), 1e-8);
  EXPECT_NEAR(p.eigenvalues[1], 0.0, 1e-8);
  EXPECT_NEAR(p.eigenvalues[0], 12.5, 1e-8);  // var(x) + var(y) = 2.5 + 10
}

TEST(Pca, IsotropicGaussianEigenvalues) {
  Rng rng(10);
  const Matrix x = testutil::random_matrix(rng, 10000, 3);
  const auto p = pca_project(x, 3);
  for (int i = 0; i < 3; ++i) EXPECT_NEAR(p.eigenvalues[i], 1.0, 0.05);
  const auto ref = oracle::covariance_eigenvalues(x, 3);
  for (int i = 0; i < 3; ++i) EXPECT_NEAR(p.eigenvalues[i], ref[static_cast<std::size_t>(i)], 1e-6);
}

TEST(Pca, StructuralProperties) {
  Rng rng(3);
  Matrix x = testutil::random_matrix(rng, 60, 6);
  x.col(1) *= 4.0;
  x.col(3) += 0.5 * x.col(1);
  const auto p = pca_project(x, 4);
  const Matrix gram = p.components * p.components.transpose();
  EXPECT_LT((gram - Matrix::Identity(4, 4)).cwiseAbs().maxCoeff(), 1e-8);
  for (int k = 0; k < 4; ++k) {
    const auto col = p.projected.col(k);
    EXPECT_NEAR(col.mean(), 0.0, 1e-8);
    const double var = (col.array() - col.mean()).square().sum() / 59.0;
    EXPECT_NEAR(var, p.eigenvalues[k], 1e-6 * p.eigenvalues[k]);
    if (k > 0) EXPECT_GE(p.eigenvalues[k - 1], p.eigenvalues[k]);
    Eigen::Index peak;
    p.components.row(k).cwiseAbs().maxCoeff(&peak);
    EXPECT_GT(p.components(k, peak), 0.0);
  }
  EXPECT_LT((p.transform(x) - p.projected).cwiseAbs().maxCoeff(), 1e-10);
}

TEST(Pca, DegenerateAndInvalid) {
  const Matrix same = Matrix::Constant(4, 3, 2.0);
  const auto p = pca_project(same, 2);
  EXPECT_EQ(p.eigenvalues[0], 0.0);
  EXPECT_LT((p.components * p.components.transpose() - Matrix::Identity(2, 2)).cwiseAbs().maxCoeff(), 1e-8);
  EXPECT_THROW(pca_project(same, 0), Error);
  EXPECT_THROW(pca_project(same, 4), Error);
  EXPECT_THROW(pca_project(Matrix::Zero(1, 3), 1), Error);
}

// ---------------------------------------------------------------- run_cv

TEST(Cv, PooledCountEqualsManifest) {
  const auto ds = testutil::synthetic_dataset(small_synthetic());
  for (const auto& s : all_strategies()) {
    const CvReport r = run_cv(ds, s, fast_train());
    ASSERT_EQ(r.classifiers.size(), 3u);
    double sum = 0;
    for (const auto& c : r.classifiers) {
      EXPECT_EQ(c.result.pooled.total(), ds.size());
      EXPECT_EQ(c.result.folds.size(), 5u);
      ConfusionMatrix acc;
      for (const auto& f : c.result.folds) {
        EXPECT_EQ(f.confusion.total(), 20u);
        acc += f.confusion;
      }
      EXPECT_EQ(acc, c.result.pooled);
      sum += c.result.aggregate.accuracy;
    }
    EXPECT_DOUBLE_EQ(r.classifier_average_accuracy, sum / 3.0);
    EXPECT_EQ(r.probes.size(), s.level == FusionLevel::kLate ? 3u : 0u);
  }
}

TEST(Cv, ReproducibleAndParallelIdentical) {
  const auto ds = testutil::synthetic_dataset(small_synthetic(4));
  const FusionStrategy s{FusionLevel::kLate, FusionOperator::kSum};
  CvOptions opts;
  const auto a = format_report(run_cv(ds, s, fast_train(4), opts));
  const auto b = format_report(run_cv(ds, s, fast_train(4), opts));
  opts.parallel_folds = true;
  const auto c = format_report(run_cv(ds, s, fast_train(4), opts));
  EXPECT_EQ(a, b);
  EXPECT_EQ(a, c);
}

TEST(Cv, ProbabilityFilesReplaceProbes) {
  auto ds = testutil::synthetic_dataset(small_synthetic(2));
  std::array<FeatureMatrix, 3> probs;
  for (std::size_t m = 0; m < 3; ++m) {
    probs[m] = FeatureMatrix::Constant(static_cast<Eigen::Index>(ds.size()), 4, 0.1f);
    const auto y = ds.labels();
    for (std::size_t i = 0; i < y.size(); ++i) probs[m](static_cast<Eigen::Index>(i), class_index(y[i])) = 0.7f;
  }
  ds.probabilities = probs;
  CvOptions opts;
  opts.classifiers = {ClassifierKind::kSvm};
  const auto r = run_cv(ds, {FusionLevel::kLate, FusionOperator::kConcat}, fast_train(), opts);
  EXPECT_TRUE(r.probabilities_from_files);
  EXPECT_TRUE(r.probes.empty());
  EXPECT_EQ(r.classifiers[0].result.aggregate.accuracy, 1.0);
}

// One modality replaced by noise: its probe collapses toward chance while the
// fused model stays above the best single modality.
TEST(Cv, NoiseModalityDoesNotSinkFusion) {
  SyntheticConfig cfg;
  cfg.seed = 21;
  cfg.n_per_class_per_session = 10;
  cfg.dim = 16;
  cfg.class_separation = 2.0;
  cfg.modality_informative_fraction = {0.5, 0.5, 0.0};
  const auto ds = testutil::synthetic_dataset(cfg);
  TrainConfig t = fast_train(21);
  t.mlp.epochs = 30;
  t.mlp.hidden_width = 32;
  CvOptions opts;
  opts.classifiers = {ClassifierKind::kSvm};
  opts.unimodal_probes = true;
  const auto r = run_cv(ds, {FusionLevel::kEarly, FusionOperator::kConcat}, t, opts);
  ASSERT_EQ(r.probes.size(), 3u);
  EXPECT_LT(r.probes[2].result.aggregate.accuracy, 0.40);
  double best = 0;
  for (const auto& p : r.probes) best = std::max(best, p.result.aggregate.accuracy);
  EXPECT_GT(r.classifiers[0].result.aggregate.accuracy, best);
}

TEST(Cv, InvalidConfigRejected) {
  const auto ds = testutil::synthetic_dataset(small_synthetic());
  TrainConfig t;
  t.svm.c_penalty = -1;
  EXPECT_THROW(run_cv(ds, {}, t), Error);
  CvOptions none;
  none.classifiers.clear();
  EXPECT_THROW(run_cv(ds, {}, TrainConfig{}, none), Error);
}

// ---------------------------------------------------------------- report files

TEST(Report, GridCsvShapeAndRoundTrip) {
  const auto ds = testutil::synthetic_dataset(small_synthetic());
  const auto reports = run_grid(ds, fast_train());
  ASSERT_EQ(reports.size(), 6u);
  const auto rows = grid_rows(reports);
  testutil::TempDir dir;
  write_grid_csv(dir / "grid.csv", rows);
  const auto back = read_grid_csv(dir / "grid.csv");
  ASSERT_EQ(back.size(), 6u);
  int cells = 0;
  for (std::size_t i = 0; i < 6; ++i) {
    EXPECT_EQ(back[i].strategy, all_strategies()[i]);
    for (std::size_t k = 0; k < 3; ++k) {
      ASSERT_TRUE(back[i].accuracy[k].has_value());
      EXPECT_EQ(*back[i].accuracy[k], *rows[i].accuracy[k]);
      ++cells;
    }
    EXPECT_EQ(back[i].average, rows[i].average);
  }
  EXPECT_EQ(cells, 18);
  const std::string text = format_grid(back);
  EXPECT_NE(text.find("early fusion"), std::string::npos);
  EXPECT_NE(text.find("late fusion"), std::string::npos);
}

TEST(Report, ConfusionCsvRoundTrip) {
  const auto cm = from_rows({{{8, 1, 1, 0}, {0, 9, 1, 0}, {2, 0, 7, 1}, {0, 1, 1, 8}}});
  testutil::TempDir dir;
  write_confusion_csv(dir / "cm.csv", cm);
  EXPECT_EQ(read_confusion_csv(dir / "cm.csv"), cm);
  const std::string table = format_metrics_table(metrics(cm));
  EXPECT_NE(table.find("accuracy = 80.00"), std::string::npos);
}

TEST(Report, PcaCsvColumns) {
  Rng rng(1);
  const Matrix x = testutil::random_matrix(rng, 4, 3);
  const auto p = pca_project(x, 2);
  testutil::TempDir dir;
  write_pca_coordinates_csv(dir / "p.csv", {"a", "b", "c", "d"},
                            {EmotionClass::kAngry, EmotionClass::kHappy, EmotionClass::kSad, EmotionClass::kSad}, p);
  std::ifstream in(dir / "p.csv");
  std::string header, row;
  std::getline(in, header);
  std::getline(in, row);
  EXPECT_EQ(header, "id,class,pc1,pc2");
  EXPECT_EQ(row.substr(0, 8), "a,Angry,");
  write_pca_components_csv(dir / "c.csv", p);
  std::ifstream cin(dir / "c.csv");
  std::getline(cin, header);
  EXPECT_EQ(header, "component,eigenvalue,x1,x2,x3");
}

TEST(Report, FormatDoubleRoundTrips) {
  for (double v : {0.1, 1.0 / 3.0, 0.75451, 1e-300}) EXPECT_EQ(std::stod(format_double(v)), v);
}
