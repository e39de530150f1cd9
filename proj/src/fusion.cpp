#include "mmfusion/fusion.hpp"

#include <algorithm>
#include <cmath>

#include "mmfusion/error.hpp"

namespace mmfusion {
namespace {

void check_finite(std::span<const float> v, Modality m) {
  for (float x : v) {
    if (!std::isfinite(x)) {
      throw Error(ErrorCode::kNonFinite,
                  "non-finite value in " + std::string(modality_name(m)) + " input to fusion");
    }
  }
}

// The three operands are sorted before combining so the result is bitwise
// independent of modality order.
float combine(float a, float b, float c, FusionOperator op) {
  std::array<float, 3> v = {a, b, c};
  std::sort(v.begin(), v.end());
  if (op == FusionOperator::kSum) {
    return static_cast<float>((static_cast<double>(v[0]) + v[1]) + v[2]);
  }
  return static_cast<float>((static_cast<double>(v[0]) * v[1]) * v[2]);
}

void fuse_into(std::span<const float> t, std::span<const float> s, std::span<const float> v,
               FusionOperator op, std::span<float> out) {
  if (op == FusionOperator::kConcat) {
    auto it = std::copy(t.begin(), t.end(), out.begin());
    it = std::copy(s.begin(), s.end(), it);
    std::copy(v.begin(), v.end(), it);
    return;
  }
  for (std::size_t i = 0; i < t.size(); ++i) out[i] = combine(t[i], s[i], v[i], op);
}

}  // namespace

std::string_view to_string(FusionLevel level) { return level == FusionLevel::kEarly ? "early" : "late"; }

std::string_view to_string(FusionOperator op) {
  switch (op) {
    case FusionOperator::kConcat: return "concat";
    case FusionOperator::kSum: return "sum";
    case FusionOperator::kProduct: return "product";
  }
  return "?";
}

std::string to_string(FusionStrategy strategy) {
  return std::string(to_string(strategy.level)) + "-" + std::string(to_string(strategy.op));
}

std::optional<FusionLevel> parse_fusion_level(std::string_view text) {
  if (text == "early") return FusionLevel::kEarly;
  if (text == "late") return FusionLevel::kLate;
  return std::nullopt;
}

std::optional<FusionOperator> parse_fusion_operator(std::string_view text) {
  for (auto op : {FusionOperator::kConcat, FusionOperator::kSum, FusionOperator::kProduct}) {
    if (to_string(op) == text) return op;
  }
  return std::nullopt;
}

std::array<FusionStrategy, 6> all_strategies() {
  std::array<FusionStrategy, 6> out;
  std::size_t i = 0;
  for (auto level : {FusionLevel::kEarly, FusionLevel::kLate}) {
    for (auto op : {FusionOperator::kConcat, FusionOperator::kSum, FusionOperator::kProduct}) {
      out[i++] = {level, op};
    }
  }
  return out;
}

std::size_t fused_dim(FusionOperator op, std::size_t text_dim, std::size_t speech_dim,
                      std::size_t video_dim) {
  if (op == FusionOperator::kConcat) return text_dim + speech_dim + video_dim;
  if (text_dim != speech_dim || text_dim != video_dim) {
    throw Error(ErrorCode::kDimMismatch, std::string(to_string(op)) + " fusion needs equal dims, got " +
                                             std::to_string(text_dim) + "/" + std::to_string(speech_dim) +
                                             "/" + std::to_string(video_dim));
  }
  return text_dim;
}

FusedVector early_fuse(std::span<const float> text, std::span<const float> speech,
                       std::span<const float> video, FusionOperator op) {
  check_finite(text, Modality::kText);
  check_finite(speech, Modality::kSpeech);
  check_finite(video, Modality::kVideo);
  FusedVector out;
  out.provenance = {FusionLevel::kEarly, op};
  out.values.resize(fused_dim(op, text.size(), speech.size(), video.size()));
  fuse_into(text, speech, video, op, out.values);
  return out;
}

FusedVector late_fuse(std::span<const float> text, std::span<const float> speech,
                      std::span<const float> video, FusionOperator op) {
  const std::array<std::span<const float>, kNumModalities> inputs = {text, speech, video};
  for (std::size_t m = 0; m < kNumModalities; ++m) {
    try {
      validate_probability_vector(inputs[m]);
    } catch (const Error& e) {
      throw Error(ErrorCode::kInvalidProbability,
                  std::string(modality_name(kFusionOrder[m])) + " input to late fusion: " + e.what());
    }
  }
  FusedVector out;
  out.provenance = {FusionLevel::kLate, op};
  out.values.resize(fused_dim(op, text.size(), speech.size(), video.size()));
  fuse_into(text, speech, video, op, out.values);
  return out;
}

FeatureMatrix fuse_rows(FusionStrategy strategy, const FeatureMatrix& text, const FeatureMatrix& speech,
                        const FeatureMatrix& video) {
  if (text.rows() != speech.rows() || text.rows() != video.rows()) {
    throw Error(ErrorCode::kDimMismatch, "fusion inputs have different row counts");
  }
  const auto dim = fused_dim(strategy.op, static_cast<std::size_t>(text.cols()),
                             static_cast<std::size_t>(speech.cols()), static_cast<std::size_t>(video.cols()));
  FeatureMatrix out(text.rows(), static_cast<Eigen::Index>(dim));
  auto row_span = [](const FeatureMatrix& m, Eigen::Index r) {
    return std::span<const float>(m.row(r).data(), static_cast<std::size_t>(m.cols()));
  };
  for (Eigen::Index r = 0; r < text.rows(); ++r) {
    const auto fused = strategy.level == FusionLevel::kEarly
                           ? early_fuse(row_span(text, r), row_span(speech, r), row_span(video, r), strategy.op)
                           : late_fuse(row_span(text, r), row_span(speech, r), row_span(video, r), strategy.op);
    std::copy(fused.values.begin(), fused.values.end(), out.row(r).data());
  }
  return out;
}

}  // namespace mmfusion
