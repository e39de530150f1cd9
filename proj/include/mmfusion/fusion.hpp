#pragma once

#include <array>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "mmfusion/embeddings.hpp"
#include "mmfusion/linalg.hpp"

namespace mmfusion {

enum class FusionLevel { kEarly, kLate };
enum class FusionOperator { kConcat, kSum, kProduct };

struct FusionStrategy {
  FusionLevel level = FusionLevel::kEarly;
  FusionOperator op = FusionOperator::kConcat;

  bool operator==(const FusionStrategy&) const = default;
};

std::string_view to_string(FusionLevel level);
std::string_view to_string(FusionOperator op);
/// "early-concat", "late-sum", ...
std::string to_string(FusionStrategy strategy);

std::optional<FusionLevel> parse_fusion_level(std::string_view text);
std::optional<FusionOperator> parse_fusion_operator(std::string_view text);

/// Early concat/sum/product, then late concat/sum/product.
std::array<FusionStrategy, 6> all_strategies();

/// Concatenation order for every fused vector.
inline constexpr std::array<Modality, kNumModalities> kFusionOrder = {Modality::kText, Modality::kSpeech,
                                                                      Modality::kVideo};

struct FusedVector {
  std::vector<float> values;
  FusionStrategy provenance;
  std::array<Modality, kNumModalities> modality_order = kFusionOrder;
};

/// Feature-level fusion. Concat -> [text | speech | video]; Sum and Product are
/// elementwise and need equal dims. Throws kDimMismatch or kNonFinite.
FusedVector early_fuse(std::span<const float> text, std::span<const float> speech,
                       std::span<const float> video, FusionOperator op);

/// Decision-level fusion of three 4-dim probability vectors. The result is not
/// renormalized. Throws kInvalidProbability.
FusedVector late_fuse(std::span<const float> text, std::span<const float> speech,
                      std::span<const float> video, FusionOperator op);

/// Applies early_fuse or late_fuse to every row.
FeatureMatrix fuse_rows(FusionStrategy strategy, const FeatureMatrix& text, const FeatureMatrix& speech,
                        const FeatureMatrix& video);

/// Output dimension for the given input dims (throws kDimMismatch for Sum/Product on unequal dims).
std::size_t fused_dim(FusionOperator op, std::size_t text_dim, std::size_t speech_dim, std::size_t video_dim);

}  // namespace mmfusion
