#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "mmfusion/embeddings.hpp"
#include "mmfusion/linalg.hpp"
#include "mmfusion/manifest.hpp"

namespace mmfusion {

struct AlignOptions {
  /// Substitute a zero vector (and record a warning) for a missing record
  /// instead of failing.
  bool zero_fill = false;
  /// Fail when a set holds ids that the manifest does not list.
  bool reject_extra = true;
};

/// Manifest rows joined with their per-modality vectors. Row i of every
/// matrix belongs to manifest row i. Modalities are indexed text, speech, video.
struct AlignedDataset {
  Manifest manifest;
  std::array<FeatureMatrix, kNumModalities> features;
  /// Externally supplied per-modality class probabilities (late fusion inputs).
  std::optional<std::array<FeatureMatrix, kNumModalities>> probabilities;
  std::vector<std::string> warnings;

  std::size_t size() const noexcept { return manifest.size(); }
  std::vector<EmotionClass> labels() const { return manifest.labels(); }
};

AlignedDataset align(const Manifest& manifest, const EmbeddingSet& text, const EmbeddingSet& speech,
                     const EmbeddingSet& video, const AlignOptions& options = {});

/// Returns a copy of `dataset` with probability sets attached (all dim 4).
AlignedDataset attach_probabilities(AlignedDataset dataset, const EmbeddingSet& text,
                                    const EmbeddingSet& speech, const EmbeddingSet& video,
                                    const AlignOptions& options = {});

/// Gathers one modality's vectors in manifest order.
FeatureMatrix gather(const Manifest& manifest, const EmbeddingSet& set, const AlignOptions& options,
                     std::vector<std::string>& warnings);

}  // namespace mmfusion
