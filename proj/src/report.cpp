#include "mmfusion/report.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "mmfusion/csv.hpp"
#include "mmfusion/error.hpp"

namespace mmfusion {
namespace {

constexpr const char* kGridHeader = "level,operator,svm,mlp,gbt,average";

std::string percent(double fraction) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", 100.0 * fraction);
  return buf;
}

std::string pad(std::string s, std::size_t width) {
  if (s.size() < width) s.insert(0, width - s.size(), ' ');
  return s;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::kIo, "cannot open for writing: " + path.string());
  out << text;
  if (!out) throw Error(ErrorCode::kIo, "write failed: " + path.string());
}

std::ifstream open_in(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot open: " + path.string());
  return in;
}

double parse_double(const std::string& field, const std::filesystem::path& path) {
  double v = 0.0;
  const auto* end = field.data() + field.size();
  auto [ptr, ec] = std::from_chars(field.data(), end, v);
  if (ec != std::errc() || ptr != end) {
    throw Error(ErrorCode::kValidation, path.string() + ": not a number: '" + field + "'");
  }
  return v;
}

std::uint64_t parse_count(const std::string& field, const std::filesystem::path& path) {
  std::uint64_t v = 0;
  const auto* end = field.data() + field.size();
  auto [ptr, ec] = std::from_chars(field.data(), end, v);
  if (ec != std::errc() || ptr != end) {
    throw Error(ErrorCode::kValidation, path.string() + ": not a count: '" + field + "'");
  }
  return v;
}

void append_evaluation(std::ostringstream& os, const EvaluationResult& r) {
  os << "aggregate_accuracy = " << format_double(r.aggregate.accuracy) << "\n";
  os << "pooled_total = " << r.pooled.total() << "\n\n";
  os << "fold  test_session      n  accuracy\n";
  for (const auto& f : r.folds) {
    os << pad(std::to_string(f.fold_index), 4) << pad(std::to_string(f.test_session), 14)
       << pad(std::to_string(f.metrics.total), 7) << pad(percent(f.metrics.accuracy), 10) << "\n";
  }
  os << "\n" << format_metrics_table(r.aggregate) << "\n" << format_confusion(r.pooled);
}

}  // namespace

std::string format_double(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return {buf, ptr};
}

std::string format_metrics_table(const MetricsReport& m) {
  std::ostringstream os;
  os << "class      precision  recall      f1  support\n";
  auto line = [&](const std::string& name, double p, double r, double f, std::uint64_t support) {
    std::string label = name;
    label.resize(9, ' ');
    os << label << pad(percent(p), 11) << pad(percent(r), 8) << pad(percent(f), 8)
       << pad(std::to_string(support), 9) << "\n";
  };
  for (int c = 0; c < kNumClasses; ++c) {
    const auto& pc = m.per_class[static_cast<std::size_t>(c)];
    line(std::string(class_name(class_from_index(c))), pc.precision, pc.recall, pc.f1, pc.support);
  }
  line("weighted", m.weighted_precision, m.weighted_recall, m.weighted_f1, m.total);
  line("macro", m.macro_precision, m.macro_recall, m.macro_f1, m.total);
  os << "accuracy = " << percent(m.accuracy) << "\n";
  return os.str();
}

std::string format_confusion(const ConfusionMatrix& cm) {
  std::ostringstream os;
  os << "true\\pred";
  for (auto c : kAllClasses) os << pad(std::string(class_name(c)), 9);
  os << "\n";
  for (int r = 0; r < kNumClasses; ++r) {
    std::string label(class_name(class_from_index(r)));
    label.resize(9, ' ');
    os << label;
    for (auto v : cm.counts[static_cast<std::size_t>(r)]) os << pad(std::to_string(v), 9);
    os << "\n";
  }
  return os.str();
}

std::string format_report(const CvReport& report) {
  std::ostringstream os;
  os << "# mmfusion cross-validation report\n";
  os << "strategy = " << to_string(report.strategy) << "\n";
  os << "level = " << to_string(report.strategy.level) << "\n";
  os << "operator = " << to_string(report.strategy.op) << "\n";
  os << "utterances = " << report.utterances << "\n";
  os << "seed = " << report.config.seed << "\n";
  os << "svm_c = " << format_double(report.config.svm.c_penalty) << "\n";
  os << "svm_tolerance = " << format_double(report.config.svm.tolerance) << "\n";
  os << "svm_max_iterations = " << report.config.svm.max_iterations << "\n";
  os << "mlp_hidden = " << report.config.mlp.hidden_width << "\n";
  os << "mlp_learning_rate = " << format_double(report.config.mlp.learning_rate) << "\n";
  os << "mlp_epochs = " << report.config.mlp.epochs << "\n";
  os << "mlp_batch_size = " << report.config.mlp.batch_size << "\n";
  os << "gbt_rounds = " << report.config.gbt.rounds << "\n";
  os << "gbt_max_depth = " << report.config.gbt.max_depth << "\n";
  os << "gbt_shrinkage = " << format_double(report.config.gbt.shrinkage) << "\n";
  os << "standardize = " << (report.options.standardize ? "true" : "false") << "\n";
  os << "probabilities_from_files = " << (report.probabilities_from_files ? "true" : "false") << "\n";
  os << "classifier_average_accuracy = " << format_double(report.classifier_average_accuracy) << "\n";

  os << "\n[run_config]\n" << report.run_config;
  if (!report.run_config.empty() && report.run_config.back() != '\n') os << "\n";

  for (const auto& c : report.classifiers) {
    os << "\n[classifier " << to_string(c.kind) << "]\n";
    append_evaluation(os, c.result);
  }
  for (const auto& p : report.probes) {
    os << "\n[probe " << modality_name(p.modality) << "]\n";
    append_evaluation(os, p.result);
  }
  return os.str();
}

void write_report(const std::filesystem::path& path, const CvReport& report) {
  write_text(path, format_report(report));
}

std::vector<GridRow> grid_rows(const std::vector<CvReport>& reports) {
  std::vector<GridRow> rows;
  for (const auto& r : reports) {
    GridRow row;
    row.strategy = r.strategy;
    for (std::size_t k = 0; k < kAllClassifiers.size(); ++k) {
      if (const auto* c = r.find(kAllClassifiers[k])) row.accuracy[k] = c->result.aggregate.accuracy;
    }
    row.average = r.classifier_average_accuracy;
    rows.push_back(row);
  }
  return rows;
}

void write_grid_csv(const std::filesystem::path& path, const std::vector<GridRow>& rows) {
  std::ostringstream os;
  os << kGridHeader << "\n";
  for (const auto& row : rows) {
    os << to_string(row.strategy.level) << "," << to_string(row.strategy.op);
    for (const auto& a : row.accuracy) os << "," << (a ? format_double(*a) : "");
    os << "," << format_double(row.average) << "\n";
  }
  write_text(path, os.str());
}

std::vector<GridRow> read_grid_csv(const std::filesystem::path& path) {
  auto in = open_in(path);
  std::string line;
  if (!std::getline(in, line) || csv::join(csv::split_line(line)) != kGridHeader) {
    throw Error(ErrorCode::kValidation, path.string() + ": expected header " + kGridHeader);
  }
  std::vector<GridRow> rows;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto f = csv::split_line(line);
    if (f.size() != 6) {
      throw Error(ErrorCode::kValidation, path.string() + ":" + std::to_string(line_no) + ": expected 6 fields");
    }
    const auto level = parse_fusion_level(f[0]);
    const auto op = parse_fusion_operator(f[1]);
    if (!level || !op) {
      throw Error(ErrorCode::kValidation, path.string() + ":" + std::to_string(line_no) + ": bad strategy");
    }
    GridRow row;
    row.strategy = {*level, *op};
    for (std::size_t k = 0; k < 3; ++k) {
      if (!f[2 + k].empty()) row.accuracy[k] = parse_double(f[2 + k], path);
    }
    row.average = parse_double(f[5], path);
    rows.push_back(row);
  }
  return rows;
}

std::string format_grid(const std::vector<GridRow>& rows) {
  std::ostringstream os;
  for (FusionLevel level : {FusionLevel::kEarly, FusionLevel::kLate}) {
    bool header = false;
    for (const auto& row : rows) {
      if (row.strategy.level != level) continue;
      if (!header) {
        header = true;
        os << to_string(level) << " fusion\n";
        os << "operator       svm      mlp      gbt  average\n";
      }
      std::string name(to_string(row.strategy.op));
      name.resize(9, ' ');
      os << name;
      for (const auto& a : row.accuracy) os << pad(a ? percent(*a) : "-", 9);
      os << pad(percent(row.average), 9) << "\n";
    }
    if (header) os << "\n";
  }
  return os.str();
}

void write_confusion_csv(const std::filesystem::path& path, const ConfusionMatrix& cm) {
  std::ostringstream os;
  os << "true\\predicted";
  for (auto c : kAllClasses) os << "," << class_name(c);
  os << "\n";
  for (int r = 0; r < kNumClasses; ++r) {
    os << class_name(class_from_index(r));
    for (auto v : cm.counts[static_cast<std::size_t>(r)]) os << "," << v;
    os << "\n";
  }
  write_text(path, os.str());
}

ConfusionMatrix read_confusion_csv(const std::filesystem::path& path) {
  auto in = open_in(path);
  std::string line;
  std::getline(in, line);
  const auto header = csv::split_line(line);
  if (header.size() != kNumClasses + 1) {
    throw Error(ErrorCode::kValidation, path.string() + ": confusion header needs 5 columns");
  }
  for (int c = 0; c < kNumClasses; ++c) {
    if (parse_class_name(header[static_cast<std::size_t>(c) + 1]) != class_from_index(c)) {
      throw Error(ErrorCode::kValidation, path.string() + ": columns must be in canonical class order");
    }
  }
  ConfusionMatrix cm;
  for (int r = 0; r < kNumClasses; ++r) {
    if (!std::getline(in, line)) throw Error(ErrorCode::kValidation, path.string() + ": missing confusion rows");
    const auto f = csv::split_line(line);
    if (f.size() != kNumClasses + 1 || parse_class_name(f[0]) != class_from_index(r)) {
      throw Error(ErrorCode::kValidation, path.string() + ": malformed confusion row " + std::to_string(r + 2));
    }
    for (std::size_t c = 0; c < kNumClasses; ++c) {
      cm.counts[static_cast<std::size_t>(r)][c] = parse_count(f[c + 1], path);
    }
  }
  return cm;
}

void write_pca_coordinates_csv(const std::filesystem::path& path, const std::vector<std::string>& ids,
                               const std::vector<EmotionClass>& labels, const PcaProjection& pca) {
  const auto n = static_cast<std::size_t>(pca.projected.rows());
  if (ids.size() != n || labels.size() != n) {
    throw Error(ErrorCode::kDimMismatch, "PCA export: ids/labels do not match projected rows");
  }
  std::ostringstream os;
  os << "id,class";
  for (Eigen::Index k = 0; k < pca.projected.cols(); ++k) os << ",pc" << (k + 1);
  os << "\n";
  for (std::size_t i = 0; i < n; ++i) {
    os << csv::escape(ids[i]) << "," << class_name(labels[i]);
    for (Eigen::Index k = 0; k < pca.projected.cols(); ++k) {
      os << "," << format_double(pca.projected(static_cast<Eigen::Index>(i), k));
    }
    os << "\n";
  }
  write_text(path, os.str());
}

void write_pca_components_csv(const std::filesystem::path& path, const PcaProjection& pca) {
  std::ostringstream os;
  os << "component,eigenvalue";
  for (Eigen::Index j = 0; j < pca.components.cols(); ++j) os << ",x" << (j + 1);
  os << "\n";
  for (Eigen::Index k = 0; k < pca.components.rows(); ++k) {
    os << "pc" << (k + 1) << "," << format_double(pca.eigenvalues[k]);
    for (Eigen::Index j = 0; j < pca.components.cols(); ++j) os << "," << format_double(pca.components(k, j));
    os << "\n";
  }
  write_text(path, os.str());
}

}  // namespace mmfusion
