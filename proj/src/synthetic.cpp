#include "mmfusion/synthetic.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

#include "mmfusion/error.hpp"
#include "mmfusion/random.hpp"

namespace mmfusion {
namespace {

// Raw label words written to synthetic manifests, in class order.
constexpr std::array<const char*, kNumClasses> kRawLabels = {"anger", "happiness", "neutral", "sadness"};

constexpr std::uint64_t kMeanSalt = 0x100;
constexpr std::uint64_t kNoiseSalt = 0x200;

std::string describe(const SyntheticConfig& c) {
  std::ostringstream os;
  os.precision(17);
  os << "synthetic rng=" << Rng::kAlgorithm << " seed=" << c.seed
     << " n_per_class_per_session=" << c.n_per_class_per_session << " dim=" << c.dim
     << " class_separation=" << c.class_separation << " modality_noise=" << c.modality_noise[0]
     << ';' << c.modality_noise[1] << ';' << c.modality_noise[2]
     << " informative_fraction=" << c.modality_informative_fraction[0] << ';'
     << c.modality_informative_fraction[1] << ';' << c.modality_informative_fraction[2];
  return os.str();
}

}  // namespace

void SyntheticConfig::validate() const {
  if (n_per_class_per_session <= 0) {
    throw Error(ErrorCode::kValidation, "n_per_class_per_session must be positive");
  }
  if (dim <= 0) throw Error(ErrorCode::kValidation, "dim must be positive");
  if (!(class_separation > 0) || !std::isfinite(class_separation)) {
    throw Error(ErrorCode::kValidation, "class_separation must be positive");
  }
  for (std::size_t m = 0; m < kNumModalities; ++m) {
    if (!(modality_noise[m] > 0) || !std::isfinite(modality_noise[m])) {
      throw Error(ErrorCode::kValidation, "modality_noise must be positive");
    }
    const double f = modality_informative_fraction[m];
    if (!(f >= 0.0 && f <= 1.0)) {
      throw Error(ErrorCode::kValidation, "modality_informative_fraction must lie in [0, 1]");
    }
  }
}

SyntheticData gen_synthetic(const SyntheticConfig& config) {
  config.validate();
  const auto dim = static_cast<std::size_t>(config.dim);

  std::vector<UtteranceMeta> rows;
  const auto n_total = static_cast<std::size_t>(kNumSessions) * kNumClasses *
                       static_cast<std::size_t>(config.n_per_class_per_session);
  rows.reserve(n_total);
  for (int session = 1; session <= kNumSessions; ++session) {
    for (EmotionClass c : kAllClasses) {
      for (int j = 0; j < config.n_per_class_per_session; ++j) {
        char id[64];
        std::snprintf(id, sizeof id, "syn_s%d_%s_%04d", session, kRawLabels[class_index(c)], j);
        rows.push_back({id, session, kRawLabels[class_index(c)], c});
      }
    }
  }

  std::array<std::vector<EmbeddingRecord>, kNumModalities> records;
  for (std::size_t m = 0; m < kNumModalities; ++m) {
    const auto informative = static_cast<std::size_t>(
        std::lround(config.modality_informative_fraction[m] * static_cast<double>(dim)));

    Rng mean_rng(derive_seed(config.seed, kMeanSalt + m));
    std::array<std::vector<double>, kNumClasses> means;
    for (auto& mean : means) {
      mean.assign(informative, 0.0);
      double norm = 0.0;
      for (auto& v : mean) {
        v = mean_rng.normal();
        norm += v * v;
      }
      norm = std::sqrt(norm);
      if (norm > 0) {
        for (auto& v : mean) v *= config.class_separation / norm;
      }
    }

    Rng noise_rng(derive_seed(config.seed, kNoiseSalt + m));
    const double sigma = config.modality_noise[m];
    records[m].reserve(rows.size());
    for (const auto& row : rows) {
      EmbeddingRecord rec{row.utterance_id, std::vector<float>(dim)};
      const auto& mean = means[static_cast<std::size_t>(class_index(row.emotion))];
      for (std::size_t d = 0; d < dim; ++d) {
        const double centre = d < informative ? mean[d] : 0.0;
        rec.vector[d] = static_cast<float>(centre + sigma * noise_rng.normal());
      }
      records[m].push_back(std::move(rec));
    }
  }

  const auto udim = static_cast<std::uint32_t>(dim);
  return SyntheticData{
      Manifest(std::move(rows), describe(config)),
      EmbeddingSet(Modality::kText, udim, std::move(records[0])),
      EmbeddingSet(Modality::kSpeech, udim, std::move(records[1])),
      EmbeddingSet(Modality::kVideo, udim, std::move(records[2])),
  };
}

}  // namespace mmfusion
