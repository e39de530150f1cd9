#pragma once

#include <array>
#include <cstdint>

#include "mmfusion/embeddings.hpp"
#include "mmfusion/manifest.hpp"

namespace mmfusion {

/// Desk-scale stand-in for fine-tuned per-modality representations.
///
/// For modality m the first round(informative_fraction[m] * dim) dimensions
/// carry class signal: each class has a mean at distance `class_separation`
/// from the origin along a seeded random unit direction. Every dimension gets
/// N(0, modality_noise[m]^2) noise. Means and noise for each modality come from
/// their own derived streams, so changing one modality leaves the others
/// bit-identical.
struct SyntheticConfig {
  std::uint64_t seed = 0;
  int n_per_class_per_session = 10;
  int dim = 768;
  double class_separation = 5.0;
  std::array<double, kNumModalities> modality_noise = {1.0, 1.0, 1.0};
  std::array<double, kNumModalities> modality_informative_fraction = {0.25, 0.25, 0.25};

  /// Throws Error(kValidation) on a non-positive count/dim/scale or a fraction outside [0, 1].
  void validate() const;
};

struct SyntheticData {
  Manifest manifest;
  EmbeddingSet text;
  EmbeddingSet speech;
  EmbeddingSet video;
};

/// Rows are ordered by session, then class, then index within the cell.
SyntheticData gen_synthetic(const SyntheticConfig& config);

}  // namespace mmfusion
