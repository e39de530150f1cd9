// mmfusion command-line front end: gen, stats, fuse, cv, pca, report.

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "mmfusion/classifier.hpp"
#include "mmfusion/cv.hpp"
#include "mmfusion/dataset.hpp"
#include "mmfusion/error.hpp"
#include "mmfusion/fusion.hpp"
#include "mmfusion/manifest.hpp"
#include "mmfusion/pca.hpp"
#include "mmfusion/report.hpp"
#include "mmfusion/synthetic.hpp"

namespace fs = std::filesystem;
using namespace mmfusion;

namespace {

enum ExitCode : int {
  kExitOk = 0,
  kExitValidation = 2,
  kExitIo = 3,
  kExitComputation = 4,
  kExitMissingModality = 5,
};

int exit_code_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::kIo:
    case ErrorCode::kBadMagic:
    case ErrorCode::kUnsupportedVersion:
    case ErrorCode::kTruncated:
      return kExitIo;
    case ErrorCode::kComputation:
      return kExitComputation;
    case ErrorCode::kMissingModality:
      return kExitMissingModality;
    default:
      return kExitValidation;
  }
}

struct Inputs {
  std::string manifest;
  std::string text;
  std::string speech;
  std::string video;
  std::string text_probs;
  std::string speech_probs;
  std::string video_probs;
  bool zero_fill = false;
};

struct StrategyArgs {
  std::string level = "early";
  std::string op = "concat";
};

FusionStrategy parse_strategy(const StrategyArgs& a) {
  const auto level = parse_fusion_level(a.level);
  const auto op = parse_fusion_operator(a.op);
  if (!level) throw Error(ErrorCode::kValidation, "unknown fusion level '" + a.level + "' (early|late)");
  if (!op) throw Error(ErrorCode::kValidation, "unknown fusion operator '" + a.op + "' (concat|sum|product)");
  return {*level, *op};
}

void add_inputs(CLI::App* sub, Inputs& in, bool probability_files) {
  sub->add_option("--manifest", in.manifest, "Manifest CSV")->required();
  sub->add_option("--text", in.text, "Text EMB1 file")->required();
  sub->add_option("--speech", in.speech, "Speech EMB1 file")->required();
  sub->add_option("--video", in.video, "Video EMB1 file")->required();
  if (probability_files) {
    sub->add_option("--text-probs", in.text_probs, "Text class-probability EMB1 file (late fusion)");
    sub->add_option("--speech-probs", in.speech_probs, "Speech class-probability EMB1 file (late fusion)");
    sub->add_option("--video-probs", in.video_probs, "Video class-probability EMB1 file (late fusion)");
  }
  sub->add_flag("--zero-fill", in.zero_fill, "Zero-fill missing modality records instead of failing");
}

// A modality file that does not exist is reported as a missing modality.
EmbeddingSet load_modality(const std::string& path, Modality m, SetKind kind) {
  if (!fs::exists(path)) {
    throw Error(ErrorCode::kMissingModality,
                "MissingModality(" + std::string(modality_name(m)) + ", no such file: " + path + ")");
  }
  return read_embeddings(path, m, kind);
}

AlignedDataset load_dataset(const Inputs& in) {
  const Manifest manifest = read_manifest(in.manifest);
  AlignOptions opts;
  opts.zero_fill = in.zero_fill;
  AlignedDataset ds = align(manifest, load_modality(in.text, Modality::kText, SetKind::kFeatures),
                            load_modality(in.speech, Modality::kSpeech, SetKind::kFeatures),
                            load_modality(in.video, Modality::kVideo, SetKind::kFeatures), opts);
  const int given = !in.text_probs.empty() + !in.speech_probs.empty() + !in.video_probs.empty();
  if (given != 0 && given != 3) {
    throw Error(ErrorCode::kValidation, "--text-probs, --speech-probs and --video-probs go together");
  }
  if (given == 3) {
    AlignOptions strict;
    ds = attach_probabilities(std::move(ds), load_modality(in.text_probs, Modality::kText, SetKind::kProbabilities),
                              load_modality(in.speech_probs, Modality::kSpeech, SetKind::kProbabilities),
                              load_modality(in.video_probs, Modality::kVideo, SetKind::kProbabilities), strict);
  }
  for (const auto& w : ds.warnings) std::cerr << "warning: " << w << "\n";
  return ds;
}

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::kIo, "cannot open for writing: " + path.string());
  out << text;
  if (!out) throw Error(ErrorCode::kIo, "write failed: " + path.string());
}

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error(ErrorCode::kIo, "cannot create directory " + dir.string() + ": " + ec.message());
}

// TOML echo of every option of the subcommand; `mmfusion --config FILE <subcommand>` replays it.
std::string echo_config(const CLI::App* sub) {
  return "# mmfusion " + sub->get_name() + "\n[" + sub->get_name() + "]\n" + sub->config_to_str(true, false);
}

// ---------------------------------------------------------------- gen

struct GenArgs {
  SyntheticConfig cfg;
  std::string out_dir = ".";
};

void run_gen(const GenArgs& a, const CLI::App* sub) {
  const SyntheticData data = gen_synthetic(a.cfg);
  const fs::path dir = a.out_dir;
  ensure_dir(dir);
  write_manifest(data.manifest, dir / "manifest.csv");
  write_embeddings(data.text, dir / "text.emb");
  write_embeddings(data.speech, dir / "speech.emb");
  write_embeddings(data.video, dir / "video.emb");
  write_file(dir / "gen_config.toml", echo_config(sub));
  std::cout << "wrote " << data.manifest.size() << " utterances (dim " << a.cfg.dim << ") to " << dir.string()
            << "\n";
}

// ---------------------------------------------------------------- stats

void run_stats(const std::string& manifest_path) {
  const Manifest m = read_manifest(manifest_path);
  const ManifestStats s = manifest_stats(m);
  std::printf("%-9s", "session");
  for (auto c : kAllClasses) std::printf("%9s", std::string(class_name(c)).c_str());
  std::printf("%9s\n", "total");
  for (int i = 0; i < kNumSessions; ++i) {
    std::printf("%-9d", i + 1);
    for (auto v : s.counts[static_cast<std::size_t>(i)]) std::printf("%9zu", v);
    std::printf("%9zu\n", s.session_totals[static_cast<std::size_t>(i)]);
  }
  std::printf("%-9s", "total");
  for (auto v : s.class_totals) std::printf("%9zu", v);
  std::printf("%9zu\n", s.total);
}

// ---------------------------------------------------------------- fuse

struct FuseArgs {
  Inputs in;
  StrategyArgs strategy;
  std::string out;
};

void run_fuse(const FuseArgs& a) {
  const FusionStrategy strategy = parse_strategy(a.strategy);
  const AlignedDataset ds = load_dataset(a.in);
  const std::array<FeatureMatrix, kNumModalities>* src = &ds.features;
  if (strategy.level == FusionLevel::kLate) {
    if (!ds.probabilities) {
      throw Error(ErrorCode::kValidation, "late fusion needs --text-probs/--speech-probs/--video-probs");
    }
    src = &*ds.probabilities;
  }
  const FeatureMatrix fused = fuse_rows(strategy, (*src)[0], (*src)[1], (*src)[2]);
  std::vector<EmbeddingRecord> records;
  records.reserve(ds.size());
  for (std::size_t i = 0; i < ds.size(); ++i) {
    const auto row = fused.row(static_cast<Eigen::Index>(i));
    records.push_back({ds.manifest[i].utterance_id, std::vector<float>(row.data(), row.data() + row.size())});
  }
  const EmbeddingSet out(Modality::kFused, static_cast<std::uint32_t>(fused.cols()), std::move(records));
  write_embeddings(out, a.out);
  std::cout << "wrote " << out.size() << " " << to_string(strategy) << " vectors of dim " << out.dim() << " to "
            << a.out << "\n";
}

// ---------------------------------------------------------------- cv

struct CvArgs {
  Inputs in;
  StrategyArgs strategy;
  bool grid = false;
  std::vector<std::string> classifiers = {"svm", "mlp", "gbt"};
  TrainConfig train;
  bool standardize = false;
  bool probes = false;
  bool parallel = false;
  bool save_models = false;
  std::string out_dir = ".";
};

std::vector<ClassifierKind> parse_classifiers(const std::vector<std::string>& names) {
  std::vector<ClassifierKind> out;
  for (const auto& n : names) {
    const auto k = parse_classifier(n);
    if (!k) throw Error(ErrorCode::kValidation, "unknown classifier '" + n + "' (svm|mlp|gbt)");
    out.push_back(*k);
  }
  return out;
}

Matrix to_double(const FeatureMatrix& m) { return m.cast<double>(); }

// Fits the strategy's classifiers on every row and stores them as MDL1 files.
void save_full_models(const AlignedDataset& ds, FusionStrategy strategy, const CvArgs& a,
                      const std::vector<ClassifierKind>& kinds, const fs::path& dir) {
  const auto y = ds.labels();
  const std::string tag = to_string(strategy);
  FeatureMatrix fused;
  if (strategy.level == FusionLevel::kEarly) {
    fused = fuse_rows(strategy, ds.features[0], ds.features[1], ds.features[2]);
  } else if (ds.probabilities) {
    fused = fuse_rows(strategy, (*ds.probabilities)[0], (*ds.probabilities)[1], (*ds.probabilities)[2]);
  } else {
    std::array<FeatureMatrix, kNumModalities> probs;
    for (std::size_t m = 0; m < kNumModalities; ++m) {
      TrainConfig probe_cfg = a.train;
      probe_cfg.seed = probe_seed(a.train.seed, m);
      const ClassifierModel probe = train(ClassifierKind::kMlp, to_double(ds.features[m]), y, probe_cfg);
      save_model(probe, dir / (tag + "_probe_" + std::string(modality_name(kFusionOrder[m])) + ".mdl"));
      probs[m] = predict_proba(probe, to_double(ds.features[m])).cast<float>();
    }
    fused = fuse_rows(strategy, probs[0], probs[1], probs[2]);
  }
  for (ClassifierKind k : kinds) {
    const ClassifierModel model = train(k, to_double(fused), y, a.train);
    save_model(model, dir / (tag + "_" + std::string(to_string(k)) + ".mdl"));
  }
}

void run_cv_cmd(const CvArgs& a, const CLI::App* sub) {
  a.train.validate();
  const auto kinds = parse_classifiers(a.classifiers);
  if (kinds.empty()) throw Error(ErrorCode::kValidation, "--clf needs at least one classifier");
  std::vector<FusionStrategy> strategies;
  if (a.grid) {
    const auto all = all_strategies();
    strategies.assign(all.begin(), all.end());
  } else {
    strategies.push_back(parse_strategy(a.strategy));
  }
  if (a.standardize && a.save_models) {
    throw Error(ErrorCode::kValidation, "--save-models does not store the standardizer; drop --standardize");
  }

  const AlignedDataset ds = load_dataset(a.in);
  CvOptions opts;
  opts.classifiers = kinds;
  opts.standardize = a.standardize;
  opts.unimodal_probes = a.probes;
  opts.parallel_folds = a.parallel;

  const fs::path dir = a.out_dir;
  ensure_dir(dir);
  const std::string config = echo_config(sub);
  write_file(dir / "run_config.toml", config);

  std::vector<CvReport> reports;
  for (const auto& strategy : strategies) {
    CvReport r = run_cv(ds, strategy, a.train, opts);
    r.run_config = config;
    const std::string tag = to_string(strategy);
    write_report(dir / ("report_" + tag + ".txt"), r);
    for (const auto& c : r.classifiers) {
      write_confusion_csv(dir / ("confusion_" + tag + "_" + std::string(to_string(c.kind)) + ".csv"),
                          c.result.pooled);
    }
    for (const auto& p : r.probes) {
      write_confusion_csv(dir / ("confusion_" + tag + "_probe_" + std::string(modality_name(p.modality)) + ".csv"),
                          p.result.pooled);
    }
    if (a.save_models) save_full_models(ds, strategy, a, kinds, dir);
    reports.push_back(std::move(r));
  }
  const auto rows = grid_rows(reports);
  write_grid_csv(dir / "grid.csv", rows);
  std::cout << format_grid(rows);
  for (const auto& r : reports) {
    for (const auto& p : r.probes) {
      std::printf("%s probe %-6s %.2f\n", to_string(r.strategy).c_str(),
                  std::string(modality_name(p.modality)).c_str(), 100.0 * p.result.aggregate.accuracy);
    }
  }
  std::cout << "reports written to " << dir.string() << "\n";
}

// ---------------------------------------------------------------- pca

struct PcaArgs {
  std::string manifest;
  std::string input;
  int k = 2;
  std::string out;
  std::string components;
};

void run_pca(const PcaArgs& a) {
  if (a.k < 1) throw Error(ErrorCode::kValidation, "--k must be at least 1, got " + std::to_string(a.k));
  const Manifest manifest = read_manifest(a.manifest);
  const EmbeddingSet set = read_embeddings(a.input, Modality::kFused);
  std::vector<std::string> warnings;
  const FeatureMatrix x = gather(manifest, set, AlignOptions{}, warnings);
  std::vector<std::string> ids;
  for (const auto& row : manifest.rows()) ids.push_back(row.utterance_id);
  const PcaProjection pca = pca_project(x.cast<double>(), a.k);
  write_pca_coordinates_csv(a.out, ids, manifest.labels(), pca);
  fs::path comp = a.components;
  if (comp.empty()) {
    comp = fs::path(a.out);
    comp.replace_filename(comp.stem().string() + "_components.csv");
  }
  write_pca_components_csv(comp, pca);
  std::cout << "wrote " << ids.size() << " x " << a.k << " coordinates to " << a.out << " and components to "
            << comp.string() << "\n";
}

// ---------------------------------------------------------------- report

void run_report(const std::string& grid, const std::string& confusion) {
  if (grid.empty() && confusion.empty()) throw Error(ErrorCode::kValidation, "report needs --grid or --confusion");
  if (!grid.empty()) std::cout << format_grid(read_grid_csv(grid));
  if (!confusion.empty()) {
    const ConfusionMatrix cm = read_confusion_csv(confusion);
    std::cout << format_confusion(cm) << "\n" << format_metrics_table(metrics(cm));
  }
}

void add_train_options(CLI::App* sub, TrainConfig& t) {
  sub->add_option("--seed", t.seed, "Master seed");
  sub->add_option("--svm-c", t.svm.c_penalty, "SVM penalty C");
  sub->add_option("--svm-tolerance", t.svm.tolerance, "SVM KKT tolerance");
  sub->add_option("--svm-max-iterations", t.svm.max_iterations, "SVM pass limit");
  sub->add_option("--mlp-hidden", t.mlp.hidden_width, "MLP hidden width");
  sub->add_option("--mlp-learning-rate", t.mlp.learning_rate, "MLP Adam step size");
  sub->add_option("--mlp-epochs", t.mlp.epochs, "MLP epochs");
  sub->add_option("--mlp-batch-size", t.mlp.batch_size, "MLP mini-batch size");
  sub->add_option("--gbt-rounds", t.gbt.rounds, "Boosting rounds");
  sub->add_option("--gbt-max-depth", t.gbt.max_depth, "Tree depth");
  sub->add_option("--gbt-shrinkage", t.gbt.shrinkage, "Shrinkage per round");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multimodal fusion and classification engine"};
  app.require_subcommand(1);
  app.set_config("--config", "", "Read subcommand options from a TOML file such as a saved run_config.toml");

  GenArgs gen;
  auto* gen_cmd = app.add_subcommand("gen", "Generate a seeded synthetic dataset");
  gen_cmd->option_defaults()->always_capture_default();
  gen_cmd->add_option("--seed", gen.cfg.seed, "Seed");
  gen_cmd->add_option("--n", gen.cfg.n_per_class_per_session, "Utterances per class per session");
  gen_cmd->add_option("--dim", gen.cfg.dim, "Vector dimension");
  gen_cmd->add_option("--separation", gen.cfg.class_separation, "Distance of class means from the origin");
  gen_cmd->add_option("--noise-text", gen.cfg.modality_noise[0], "Text noise std");
  gen_cmd->add_option("--noise-speech", gen.cfg.modality_noise[1], "Speech noise std");
  gen_cmd->add_option("--noise-video", gen.cfg.modality_noise[2], "Video noise std");
  gen_cmd->add_option("--informative-text", gen.cfg.modality_informative_fraction[0], "Text signal fraction");
  gen_cmd->add_option("--informative-speech", gen.cfg.modality_informative_fraction[1], "Speech signal fraction");
  gen_cmd->add_option("--informative-video", gen.cfg.modality_informative_fraction[2], "Video signal fraction");
  gen_cmd->add_option("--out-dir", gen.out_dir, "Output directory")->envname("MMFUSION_OUT_DIR");

  std::string stats_manifest;
  auto* stats_cmd = app.add_subcommand("stats", "Session x class counts of a manifest");
  stats_cmd->option_defaults()->always_capture_default();
  stats_cmd->add_option("--manifest", stats_manifest, "Manifest CSV")->required();

  FuseArgs fuse;
  auto* fuse_cmd = app.add_subcommand("fuse", "Fuse aligned modality vectors into one EMB1 file");
  fuse_cmd->option_defaults()->always_capture_default();
  add_inputs(fuse_cmd, fuse.in, true);
  fuse_cmd->add_option("--level", fuse.strategy.level, "early|late");
  fuse_cmd->add_option("--op", fuse.strategy.op, "concat|sum|product");
  fuse_cmd->add_option("--out", fuse.out, "Output EMB1 file")->required();

  CvArgs cv;
  auto* cv_cmd = app.add_subcommand("cv", "Session-holdout cross-validation");
  cv_cmd->option_defaults()->always_capture_default();
  add_inputs(cv_cmd, cv.in, true);
  cv_cmd->add_option("--level", cv.strategy.level, "early|late");
  cv_cmd->add_option("--op", cv.strategy.op, "concat|sum|product");
  cv_cmd->add_flag("--grid", cv.grid, "Run all six fusion strategies");
  cv_cmd->add_option("--clf", cv.classifiers, "Classifiers (svm, mlp, gbt)")->delimiter(',');
  add_train_options(cv_cmd, cv.train);
  cv_cmd->add_flag("--standardize", cv.standardize, "Z-score features using training-fold statistics");
  cv_cmd->add_flag("--probes", cv.probes, "Also evaluate unimodal MLP probes in early mode");
  cv_cmd->add_flag("--parallel", cv.parallel, "Run folds on separate threads");
  cv_cmd->add_flag("--save-models", cv.save_models, "Also fit on all rows and save MDL1 models");
  cv_cmd->add_option("--out-dir", cv.out_dir, "Output directory")->envname("MMFUSION_OUT_DIR");

  PcaArgs pca;
  auto* pca_cmd = app.add_subcommand("pca", "Project an EMB1 file onto its top principal components");
  pca_cmd->option_defaults()->always_capture_default();
  pca_cmd->add_option("--manifest", pca.manifest, "Manifest CSV (ids and classes)")->required();
  pca_cmd->add_option("--input", pca.input, "EMB1 file (unimodal or fused)")->required();
  pca_cmd->add_option("--k", pca.k, "Number of components");
  pca_cmd->add_option("--out", pca.out, "Coordinates CSV")->required();
  pca_cmd->add_option("--components", pca.components, "Components CSV (default <out>_components.csv)");

  std::string report_grid;
  std::string report_confusion;
  auto* report_cmd = app.add_subcommand("report", "Pretty-print a grid or confusion CSV");
  report_cmd->option_defaults()->always_capture_default();
  report_cmd->add_option("--grid", report_grid, "grid.csv from cv");
  report_cmd->add_option("--confusion", report_confusion, "Confusion CSV from cv");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitValidation;
  }

  try {
    if (*gen_cmd) run_gen(gen, gen_cmd);
    if (*stats_cmd) run_stats(stats_manifest);
    if (*fuse_cmd) run_fuse(fuse);
    if (*cv_cmd) run_cv_cmd(cv, cv_cmd);
    if (*pca_cmd) run_pca(pca);
    if (*report_cmd) run_report(report_grid, report_confusion);
  } catch (const Error& e) {
    std::cerr << "error [" << to_string(e.code()) << "]: " << e.what() << "\n";
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitComputation;
  }
  return kExitOk;
}
