#include "mmfusion/dataset.hpp"

#include <unordered_set>

#include "mmfusion/error.hpp"

namespace mmfusion {

FeatureMatrix gather(const Manifest& manifest, const EmbeddingSet& set, const AlignOptions& options,
                     std::vector<std::string>& warnings) {
  const std::string modality(modality_name(set.modality()));
  if (options.reject_extra) {
    std::unordered_set<std::string_view> wanted;
    wanted.reserve(manifest.size());
    for (const auto& row : manifest.rows()) wanted.insert(row.utterance_id);
    for (const auto& r : set.records()) {
      if (!wanted.contains(r.utterance_id)) {
        throw Error(ErrorCode::kValidation,
                    modality + " set has record '" + r.utterance_id + "' not in the manifest");
      }
    }
  }

  FeatureMatrix out = FeatureMatrix::Zero(static_cast<Eigen::Index>(manifest.size()), set.dim());
  for (std::size_t i = 0; i < manifest.size(); ++i) {
    const auto& id = manifest[i].utterance_id;
    const EmbeddingRecord* rec = set.find(id);
    if (rec == nullptr) {
      if (!options.zero_fill) throw MissingModalityError(modality, id);
      warnings.push_back("zero-filled missing " + modality + " vector for " + id);
      continue;
    }
    out.row(static_cast<Eigen::Index>(i)) =
        Eigen::Map<const Eigen::RowVectorXf>(rec->vector.data(), set.dim());
  }
  return out;
}

AlignedDataset align(const Manifest& manifest, const EmbeddingSet& text, const EmbeddingSet& speech,
                     const EmbeddingSet& video, const AlignOptions& options) {
  AlignedDataset out;
  out.manifest = manifest;
  const std::array<const EmbeddingSet*, kNumModalities> sets = {&text, &speech, &video};
  for (std::size_t m = 0; m < kNumModalities; ++m) {
    out.features[m] = gather(manifest, *sets[m], options, out.warnings);
  }
  return out;
}

AlignedDataset attach_probabilities(AlignedDataset dataset, const EmbeddingSet& text,
                                    const EmbeddingSet& speech, const EmbeddingSet& video,
                                    const AlignOptions& options) {
  std::array<FeatureMatrix, kNumModalities> probs;
  const std::array<const EmbeddingSet*, kNumModalities> sets = {&text, &speech, &video};
  for (std::size_t m = 0; m < kNumModalities; ++m) {
    if (sets[m]->kind() != SetKind::kProbabilities) {
      throw Error(ErrorCode::kValidation, std::string(modality_name(sets[m]->modality())) +
                                              " set was not loaded in probability mode");
    }
    if (options.zero_fill) {
      // A zero vector is not a distribution; late fusion would reject it anyway.
      throw Error(ErrorCode::kValidation, "zero-fill is not allowed for probability sets");
    }
    probs[m] = gather(dataset.manifest, *sets[m], options, dataset.warnings);
  }
  dataset.probabilities = std::move(probs);
  return dataset;
}

}  // namespace mmfusion
