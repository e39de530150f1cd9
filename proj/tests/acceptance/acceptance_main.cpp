// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any FAIL.

#include <sys/wait.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "helpers.hpp"
#include "mmfusion/classifier.hpp"
#include "mmfusion/cv.hpp"
#include "mmfusion/embeddings.hpp"
#include "mmfusion/error.hpp"
#include "mmfusion/folds.hpp"
#include "mmfusion/fusion.hpp"
#include "mmfusion/metrics.hpp"
#include "mmfusion/pca.hpp"
#include "mmfusion/report.hpp"
#include "oracles.hpp"

using namespace mmfusion;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
};

class Check {
 public:
  void expect(bool ok, const std::string& what) {
    if (!ok && out_.pass) {
      out_.pass = false;
      out_.detail = what;
    }
  }
  void note(const std::string& s) {
    if (out_.pass) out_.detail = s;
  }
  Outcome result() const { return out_; }

 private:
  Outcome out_;
};

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

int failures = 0;

void run(const std::string& name, double time_limit_s, const std::function<Outcome()>& body) {
  const auto t0 = std::chrono::steady_clock::now();
  Outcome o;
  try {
    o = body();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (time_limit_s > 0 && secs >= time_limit_s && o.pass) {
    o = {false, "took " + fmt("%.2f", secs) + " s, limit " + fmt("%.0f", time_limit_s) + " s"};
  }
  if (!o.pass) ++failures;
  std::printf("%s %s (%.2f s): %s\n", o.pass ? "PASS" : "FAIL", name.c_str(), secs, o.detail.c_str());
  std::fflush(stdout);
}

std::vector<float> random_vec(Rng& rng, std::size_t n) {
  std::vector<float> v(n);
  for (auto& x : v) x = static_cast<float>(rng.normal());
  return v;
}

std::vector<float> random_prob(Rng& rng) {
  std::vector<float> v(4);
  double s = 0;
  for (auto& x : v) s += (x = static_cast<float>(rng.uniform() + 1e-3));
  for (auto& x : v) x = static_cast<float>(x / s);
  return v;
}

// ---------------------------------------------------------------- criteria

Outcome fusion_dimensions() {
  Check c;
  Rng rng(1);
  const auto a = random_vec(rng, 768), b = random_vec(rng, 768), v = random_vec(rng, 768);
  c.expect(early_fuse(a, b, v, FusionOperator::kConcat).values.size() == 2304, "concat != 2304");
  c.expect(early_fuse(a, b, v, FusionOperator::kSum).values.size() == 768, "sum != 768");
  c.expect(early_fuse(a, b, v, FusionOperator::kProduct).values.size() == 768, "product != 768");
  const auto p = random_prob(rng), q = random_prob(rng), r = random_prob(rng);
  c.expect(late_fuse(p, q, r, FusionOperator::kConcat).values.size() == 12, "late concat != 12");
  c.expect(late_fuse(p, q, r, FusionOperator::kSum).values.size() == 4, "late sum != 4");
  c.expect(late_fuse(p, q, r, FusionOperator::kProduct).values.size() == 4, "late product != 4");
  c.note("2304 / 768 / 768 and 12 / 4 / 4");
  return c.result();
}

Outcome fusion_algebra() {
  Check c;
  Rng rng(2);
  const int trials = 1000;
  for (int t = 0; t < trials; ++t) {
    const bool late = t % 2 == 1;
    const std::size_t n = late ? 4 : 1 + rng.index(32);
    std::array<std::vector<float>, 3> v;
    for (auto& x : v) x = late ? random_prob(rng) : random_vec(rng, n);
    auto fuse = [&](int i, int j, int k, FusionOperator op) {
      return late ? late_fuse(v[i], v[j], v[k], op).values : early_fuse(v[i], v[j], v[k], op).values;
    };
    for (auto op : {FusionOperator::kSum, FusionOperator::kProduct}) {
      const auto ref = fuse(0, 1, 2, op);
      std::array<int, 3> idx = {0, 1, 2};
      while (std::next_permutation(idx.begin(), idx.end())) {
        c.expect(fuse(idx[0], idx[1], idx[2], op) == ref, "sum/product not permutation invariant");
      }
    }
    std::vector<float> cat = v[0];
    cat.insert(cat.end(), v[1].begin(), v[1].end());
    cat.insert(cat.end(), v[2].begin(), v[2].end());
    c.expect(fuse(0, 1, 2, FusionOperator::kConcat) == cat, "concat is not text|speech|video");
    if (!(v[0] == v[1])) {
      c.expect(fuse(1, 0, 2, FusionOperator::kConcat) != cat, "concat ignores order");
    }
    const std::vector<float> z(n, 0.0f);
    if (!late) {
      c.expect(early_fuse(z, z, z, FusionOperator::kSum).values == z, "zero sum");
      c.expect(early_fuse(z, z, z, FusionOperator::kProduct).values == z, "zero product");
      c.expect(early_fuse(z, z, z, FusionOperator::kConcat).values == std::vector<float>(3 * n, 0.0f),
               "zero concat");
    }
  }
  c.note(std::to_string(trials) + " seeded triples, exact equality");
  return c.result();
}

Outcome metrics_oracle() {
  Check c;
  Rng rng(3);
  double worst_identity = 0;
  for (int t = 0; t < 1000; ++t) {
    const auto n = 1 + rng.index(200);
    std::vector<int> yt(n), yp(n);
    for (std::size_t i = 0; i < n; ++i) {
      yt[i] = static_cast<int>(rng.index(4));
      yp[i] = static_cast<int>(rng.index(4));
    }
    const auto cm = confusion_matrix(testutil::to_classes(yt), testutil::to_classes(yp));
    c.expect(cm.counts == oracle::confusion(yt, yp), "confusion counts differ");
    const auto m = metrics(cm);
    const auto o = oracle::scores(yt, yp);
    c.expect(m.accuracy == o.accuracy, "accuracy differs");
    for (std::size_t k = 0; k < 4; ++k) {
      c.expect(m.per_class[k].precision == o.precision[k], "precision differs");
      c.expect(m.per_class[k].recall == o.recall[k], "recall differs");
      c.expect(m.per_class[k].f1 == o.f1[k], "f1 differs");
      c.expect(m.per_class[k].support == o.support[k], "support differs");
    }
    // Averages are sums of four terms; allow one ulp-scale reassociation.
    c.expect(std::abs(m.macro_precision - o.macro_p) <= 1e-15, "macro precision differs");
    c.expect(std::abs(m.macro_recall - o.macro_r) <= 1e-15, "macro recall differs");
    c.expect(std::abs(m.macro_f1 - o.macro_f1) <= 1e-15, "macro f1 differs");
    c.expect(std::abs(m.weighted_precision - o.weighted_p) <= 1e-15, "weighted precision differs");
    c.expect(std::abs(m.weighted_f1 - o.weighted_f1) <= 1e-15, "weighted f1 differs");
    worst_identity = std::max(worst_identity, std::abs(o.weighted_r - m.accuracy));
    c.expect(m.weighted_recall == m.accuracy, "weighted recall != accuracy");
  }
  c.expect(worst_identity <= 1e-15, "oracle weighted recall drifts from accuracy");
  c.note("1000 pairs exact; |oracle weighted recall - accuracy| <= " + fmt("%.1e", worst_identity));
  return c.result();
}

Outcome mlp_gradient_check() {
  Check c;
  Rng rng(4);
  double worst = 0;
  for (int t = 0; t < 20; ++t) {
    const auto n = static_cast<Eigen::Index>(1 + rng.index(8));
    const auto d = static_cast<Eigen::Index>(1 + rng.index(16));
    const Matrix x = testutil::random_matrix(rng, n, d);
    std::vector<EmotionClass> y;
    for (Eigen::Index i = 0; i < n; ++i) y.push_back(class_from_index(static_cast<int>(rng.index(4))));
    const MlpModel m = init_mlp(static_cast<std::size_t>(d), 8, rng.next_u64());
    worst = std::max(worst, mlp_grad_check(m, x, y));
  }
  const Matrix zeros = Matrix::Zero(4, 6);
  worst = std::max(worst, mlp_grad_check(init_mlp(6, 8, 5), zeros, std::vector<EmotionClass>(4, EmotionClass::kAngry)));
  c.expect(worst < 1e-4, "max relative error " + fmt("%.3e", worst));
  c.note("max relative error " + fmt("%.3e", worst) + " < 1e-4 over 21 batches");
  return c.result();
}

Outcome svm_correctness() {
  Check c;
  Matrix pair(2, 1);
  pair << -1.0, 1.0;
  const std::vector<EmotionClass> py = {EmotionClass::kAngry, EmotionClass::kHappy};
  TrainConfig hard;
  hard.svm.c_penalty = 1e6;
  hard.svm.tolerance = 1e-8;
  const SvmFit hp = train_svm_detailed(pair, py, hard);
  const double dw = std::abs(hp.model.weights(1, 0) - 1.0);
  const double db = std::abs(hp.model.bias(1));
  c.expect(dw <= 1e-3 && db <= 1e-3, "hard margin w=" + fmt("%.6f", hp.model.weights(1, 0)) +
                                         " b=" + fmt("%.6f", hp.model.bias(1)));
  c.expect(hp.model.predict(pair) == py, "pair misclassified");

  SyntheticConfig sc;
  sc.seed = 5;
  sc.dim = 16;
  sc.n_per_class_per_session = 10;
  sc.class_separation = 10.0;
  const auto ds = testutil::synthetic_dataset(sc);
  const Matrix x = ds.features[0].cast<double>();
  const auto y = ds.labels();
  c.expect(oracle::perceptron_separates(x, testutil::to_ints(y)), "perceptron oracle: data not separable");
  TrainConfig cfg;
  cfg.seed = 5;
  const SvmFit fit = train_svm_detailed(x, y, cfg);
  const double acc = testutil::accuracy(fit.model.predict(x), y);
  c.expect(acc == 1.0, "training accuracy " + fmt("%.4f", acc));
  for (const auto& alphas : fit.diagnostics.alpha) {
    for (double a : alphas) c.expect(a >= 0.0 && a <= cfg.svm.c_penalty, "alpha outside [0, C]");
  }
  c.note("|w-1|=" + fmt("%.1e", dw) + " |b|=" + fmt("%.1e", db) + ", alphas in [0, C], 4-cluster accuracy 1.0");
  return c.result();
}

Outcome gbt_correctness() {
  Check c;
  Rng rng(6);
  Matrix x(100, 3);
  std::vector<EmotionClass> y;
  for (int i = 0; i < 100; ++i) {
    x(i, 0) = rng.uniform(-1, 1);
    x(i, 1) = rng.normal();
    x(i, 2) = rng.normal();
    y.push_back(x(i, 0) <= -0.2 ? EmotionClass::kHappy : EmotionClass::kSad);
  }
  c.expect(oracle::best_stump_accuracy(x, testutil::to_ints(y), 0) == 1.0, "stump oracle: not stump-separable");
  TrainConfig cfg;
  cfg.gbt.max_depth = 1;
  cfg.gbt.rounds = 10;
  const GbtFit fit = train_gbt_detailed(x, y, cfg);
  int first_perfect = -1;
  for (int r = 1; r <= 10 && first_perfect < 0; ++r) {
    GbtModel partial = fit.model;
    partial.rounds = r;
    partial.trees.resize(static_cast<std::size_t>(r) * kNumClasses);
    if (testutil::accuracy(partial.predict(x), y) == 1.0) first_perfect = r;
  }
  c.expect(first_perfect > 0, "accuracy 1.0 not reached within 10 rounds");
  for (std::size_t r = 1; r < fit.round_loss.size(); ++r) {
    c.expect(fit.round_loss[r] <= fit.round_loss[r - 1], "loss increased at round " + std::to_string(r));
  }
  // Non-increasing loss on a harder, multi-class problem too.
  SyntheticConfig sc;
  sc.seed = 6;
  sc.dim = 8;
  sc.n_per_class_per_session = 6;
  sc.class_separation = 2.0;
  const auto ds = testutil::synthetic_dataset(sc);
  TrainConfig deep;
  deep.gbt.rounds = 40;
  const GbtFit hard = train_gbt_detailed(ds.features[1].cast<double>(), ds.labels(), deep);
  for (std::size_t r = 1; r < hard.round_loss.size(); ++r) {
    c.expect(hard.round_loss[r] <= hard.round_loss[r - 1], "multi-class loss increased at round " + std::to_string(r));
  }
  c.note("accuracy 1.0 after " + std::to_string(first_perfect) + " round(s); loss non-increasing (" +
         fmt("%.4f", fit.round_loss.front()) + " -> " + fmt("%.4f", fit.round_loss.back()) + ")");
  return c.result();
}

Outcome cv_partition() {
  Check c;
  SyntheticConfig sc;
  sc.seed = 7;
  sc.dim = 8;
  sc.n_per_class_per_session = 4;
  const auto ds = testutil::synthetic_dataset(sc);
  const auto folds = session_folds(ds.manifest);
  std::vector<int> hits(ds.size(), 0);
  for (const auto& f : folds) {
    for (auto r : f.test_rows) {
      ++hits[r];
      c.expect(ds.manifest[r].session == f.test_session, "test row from another session");
    }
    for (auto r : f.train_rows) c.expect(ds.manifest[r].session != f.test_session, "test session in train rows");
    c.expect(f.train_rows.size() + f.test_rows.size() == ds.size(), "fold does not cover manifest");
  }
  c.expect(std::all_of(hits.begin(), hits.end(), [](int h) { return h == 1; }), "test sets not a partition");
  TrainConfig t;
  t.mlp.hidden_width = 16;
  t.mlp.epochs = 5;
  t.gbt.rounds = 5;
  for (const auto& s : {FusionStrategy{FusionLevel::kEarly, FusionOperator::kConcat},
                        FusionStrategy{FusionLevel::kLate, FusionOperator::kProduct}}) {
    const auto r = run_cv(ds, s, t);
    for (const auto& cl : r.classifiers) {
      c.expect(cl.result.pooled.total() == ds.size(), "pooled count != |manifest|");
    }
  }
  c.note("5 disjoint single-session test sets covering " + std::to_string(ds.size()) +
         " rows; pooled count = |manifest|");
  return c.result();
}

// Documented config: seed 42, 20 utterances per class per session, dim 32,
// separation 4, half the dims informative, noise std 1.25 / 1.5 / 1.75,
// default TrainConfig with seed 42.
Outcome end_to_end() {
  Check c;
  SyntheticConfig sc;
  sc.seed = 42;
  sc.n_per_class_per_session = 20;
  sc.dim = 32;
  sc.class_separation = 4.0;
  sc.modality_noise = {1.25, 1.5, 1.75};
  sc.modality_informative_fraction = {0.5, 0.5, 0.5};
  const auto ds = testutil::synthetic_dataset(sc);
  TrainConfig t;
  t.seed = 42;
  CvOptions opts;
  opts.classifiers = {ClassifierKind::kSvm};
  opts.unimodal_probes = true;
  const auto r = run_cv(ds, {FusionLevel::kEarly, FusionOperator::kConcat}, t, opts);
  const double fused = r.classifiers.at(0).result.aggregate.accuracy;
  c.expect(fused >= 0.95, "early-concat SVM accuracy " + fmt("%.4f", fused) + " < 0.95");
  std::string probes;
  for (const auto& p : r.probes) {
    const double a = p.result.aggregate.accuracy;
    c.expect(fused > a, "fused " + fmt("%.4f", fused) + " does not beat " + std::string(modality_name(p.modality)) +
                            " probe " + fmt("%.4f", a));
    probes += " " + std::string(modality_name(p.modality)) + "=" + fmt("%.4f", a);
  }
  c.expect(r.probes.size() == 3, "missing probes");
  c.note("early-concat SVM " + fmt("%.4f", fused) + " > probes" + probes);
  return c.result();
}

int run_cli(const std::string& args) {
  const std::string cmd = std::string(MMFUSION_CLI_PATH) + " " + args + " >/dev/null 2>&1";
  const int st = std::system(cmd.c_str());
  return WIFEXITED(st) ? WEXITSTATUS(st) : -1;
}

Outcome grid_shape() {
  Check c;
  testutil::TempDir dir;
  const std::string d = dir.path().string();
  c.expect(run_cli("gen --seed 3 --n 3 --dim 8 --out-dir " + d) == 0, "gen failed");
  const std::string in = " --manifest " + d + "/manifest.csv --text " + d + "/text.emb --speech " + d +
                         "/speech.emb --video " + d + "/video.emb";
  c.expect(run_cli("cv --grid" + in + " --mlp-hidden 32 --mlp-epochs 10 --gbt-rounds 10 --out-dir " + d + "/out") == 0,
           "cv --grid failed");
  const auto rows = read_grid_csv(dir / "out" / "grid.csv");
  int cells = 0;
  int averages = 0;
  for (const auto& r : rows) {
    for (const auto& a : r.accuracy) cells += a.has_value();
    averages += std::isfinite(r.average);
  }
  c.expect(rows.size() == 6, "grid rows " + std::to_string(rows.size()));
  c.expect(cells == 18, "accuracy cells " + std::to_string(cells));
  c.expect(averages == 6, "average cells " + std::to_string(averages));
  const auto all = all_strategies();
  for (std::size_t i = 0; i < rows.size() && i < all.size(); ++i) {
    c.expect(rows[i].strategy == all[i], "row order differs from early/late x concat/sum/product");
  }
  c.note(std::to_string(cells) + " accuracy cells + " + std::to_string(averages) + " averages in 2x3 layout");
  return c.result();
}

Outcome pca_criteria() {
  Check c;
  Rng rng(8);
  Matrix x = testutil::random_matrix(rng, 200, 10);
  for (Eigen::Index j = 0; j < 10; ++j) x.col(j) *= 1.0 + j;
  const auto p = pca_project(x, 6);
  const double ortho = (p.components * p.components.transpose() - Matrix::Identity(6, 6)).cwiseAbs().maxCoeff();
  c.expect(ortho <= 1e-8, "orthonormality error " + fmt("%.2e", ortho));
  double worst = 0;
  for (int k = 0; k < 6; ++k) {
    const auto col = p.projected.col(k);
    const double var = (col.array() - col.mean()).square().sum() / double(x.rows() - 1);
    worst = std::max(worst, std::abs(var - p.eigenvalues[k]) / p.eigenvalues[k]);
    if (k > 0) c.expect(p.eigenvalues[k - 1] >= p.eigenvalues[k], "eigenvalues not descending");
  }
  c.expect(worst <= 1e-6, "projected variance relative error " + fmt("%.2e", worst));

  Matrix line(7, 2);
  for (int i = 0; i < 7; ++i) line.row(i) << i * 0.5 - 1.0, 2.0 * (i * 0.5 - 1.0);
  const auto l = pca_project(line, 2);
  const double e0 = std::max(std::abs(l.components(0, 0) - 1.0 / std::sqrt(5.0)),
                             std::abs(l.components(0, 1) - 2.0 / std::sqrt(5.0)));
  c.expect(e0 <= 1e-8, "collinear component error " + fmt("%.2e", e0));
  c.expect(std::abs(l.eigenvalues[1]) <= 1e-8, "collinear second eigenvalue " + fmt("%.2e", l.eigenvalues[1]));

  const auto iso = pca_project(testutil::random_matrix(rng, 10000, 3), 3);
  for (int k = 0; k < 3; ++k) {
    c.expect(std::abs(iso.eigenvalues[k] - 1.0) <= 0.05, "isotropic eigenvalue " + fmt("%.4f", iso.eigenvalues[k]));
  }
  c.note("orthonormality " + fmt("%.1e", ortho) + ", variance rel err " + fmt("%.1e", worst) + ", collinear err " +
         fmt("%.1e", e0));
  return c.result();
}

Outcome emb1_round_trip() {
  Check c;
  Rng rng(9);
  int sets = 0;
  testutil::TempDir dir;
  for (int t = 0; t < 300; ++t) {
    const bool probs = t % 3 == 0;
    const std::uint32_t dim = probs ? 4 : static_cast<std::uint32_t>(1 + rng.index(64));
    const std::size_t count = t % 10 == 0 ? 0 : rng.index(40);
    std::vector<EmbeddingRecord> recs;
    for (std::size_t i = 0; i < count; ++i) {
      EmbeddingRecord r{"u" + std::to_string(t) + "_" + std::to_string(i), probs ? random_prob(rng) : random_vec(rng, dim)};
      if (!probs && i == 0) r.vector[0] = -0.0f;
      recs.push_back(std::move(r));
    }
    const SetKind kind = probs ? SetKind::kProbabilities : SetKind::kFeatures;
    const EmbeddingSet set(Modality::kText, dim, recs, kind);
    const auto path = dir / ("s" + std::to_string(t) + ".emb");
    write_embeddings(set, path);
    const auto back = read_embeddings(path, Modality::kText, kind);
    c.expect(bitwise_equal(set, back), "set " + std::to_string(t) + " differs after round trip");
    c.expect(encode_embeddings(back) == encode_embeddings(set), "re-encoding differs");
    if (count == 0) c.expect(std::filesystem::file_size(path) == kEmbHeaderBytes, "empty set is not 13 bytes");
    ++sets;
  }
  c.note(std::to_string(sets) + " randomized sets (incl. empty and dim-4 probability sets) bit-exact");
  return c.result();
}

}  // namespace

int main() {
  run("fusion-dimensions", 0, fusion_dimensions);
  run("fusion-algebra", 0, fusion_algebra);
  run("metrics-oracle", 10, metrics_oracle);
  run("mlp-gradient-check", 5, mlp_gradient_check);
  run("svm-correctness", 30, svm_correctness);
  run("gbt-correctness", 0, gbt_correctness);
  run("cv-partition", 0, cv_partition);
  run("end-to-end-synthetic", 120, end_to_end);
  run("grid-shape", 0, grid_shape);
  run("pca", 0, pca_criteria);
  run("emb1-round-trip", 0, emb1_round_trip);
  std::printf("%d criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
