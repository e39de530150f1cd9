#pragma once

#include <array>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "mmfusion/cv.hpp"
#include "mmfusion/pca.hpp"

namespace mmfusion {

/// Human-readable CvReport: key = value header, embedded run config, then one
/// section per classifier/probe with fold table, metrics table and pooled confusion.
std::string format_report(const CvReport& report);
void write_report(const std::filesystem::path& path, const CvReport& report);

/// Per-class P/R/F1 with support-weighted and macro rows, values in percent.
std::string format_metrics_table(const MetricsReport& m);
std::string format_confusion(const ConfusionMatrix& cm);

/// One row of the level x operator grid. Missing classifiers stay empty.
struct GridRow {
  FusionStrategy strategy;
  std::array<std::optional<double>, 3> accuracy;  // svm, mlp, gbt
  double average = 0.0;
};

std::vector<GridRow> grid_rows(const std::vector<CvReport>& reports);
/// Header `level,operator,svm,mlp,gbt,average`; fractions at full precision.
void write_grid_csv(const std::filesystem::path& path, const std::vector<GridRow>& rows);
std::vector<GridRow> read_grid_csv(const std::filesystem::path& path);
/// Early and late blocks, classifiers as columns, percent with 2 decimals.
std::string format_grid(const std::vector<GridRow>& rows);

/// Header `true\predicted,Angry,Happy,Neutral,Sad`, one row per true class.
void write_confusion_csv(const std::filesystem::path& path, const ConfusionMatrix& cm);
ConfusionMatrix read_confusion_csv(const std::filesystem::path& path);

/// `id,class,pc1..pck`, one row per input row.
void write_pca_coordinates_csv(const std::filesystem::path& path, const std::vector<std::string>& ids,
                               const std::vector<EmotionClass>& labels, const PcaProjection& pca);
/// `component,eigenvalue,x1..xd`.
void write_pca_components_csv(const std::filesystem::path& path, const PcaProjection& pca);

/// Shortest round-trippable decimal form.
std::string format_double(double v);

}  // namespace mmfusion
