#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace mmfusion {

enum class Modality : std::uint8_t { kText = 0, kSpeech = 1, kVideo = 2, kFused = 3 };

inline constexpr std::size_t kNumModalities = 3;

std::string_view modality_name(Modality m);
std::optional<Modality> parse_modality(std::string_view name);

/// Feature sets carry representation vectors; probability sets carry 4-dim
/// class distributions and get the extra nonnegative / sums-to-one check.
enum class SetKind { kFeatures, kProbabilities };

inline constexpr double kProbabilitySumTolerance = 1e-5;

struct EmbeddingRecord {
  std::string utterance_id;
  std::vector<float> vector;
};

/// Immutable collection of same-dimension vectors keyed by utterance id.
class EmbeddingSet {
 public:
  EmbeddingSet() = default;

  /// Throws Error on dim mismatch, duplicate/empty id, non-finite value, or
  /// (for kProbabilities) an invalid distribution.
  EmbeddingSet(Modality modality, std::uint32_t dim, std::vector<EmbeddingRecord> records,
               SetKind kind = SetKind::kFeatures);

  Modality modality() const noexcept { return modality_; }
  std::uint32_t dim() const noexcept { return dim_; }
  SetKind kind() const noexcept { return kind_; }
  const std::vector<EmbeddingRecord>& records() const noexcept { return records_; }
  std::size_t size() const noexcept { return records_.size(); }

  /// nullptr when the id is absent.
  const EmbeddingRecord* find(std::string_view utterance_id) const;

 private:
  Modality modality_ = Modality::kText;
  std::uint32_t dim_ = 0;
  SetKind kind_ = SetKind::kFeatures;
  std::vector<EmbeddingRecord> records_;
  std::unordered_map<std::string, std::size_t> index_;
};

/// Compares modality-independent content bit for bit (ids, dim, raw float bits).
bool bitwise_equal(const EmbeddingSet& a, const EmbeddingSet& b);

/// Throws Error(kInvalidProbability) unless `v` has 4 nonnegative finite
/// entries summing to 1 within kProbabilitySumTolerance.
void validate_probability_vector(std::span<const float> v);
void validate_probability_vector(std::span<const double> v);

// EMB1 layout, all little-endian:
//   "EMB1" | u8 version=1 | u32 count | u32 dim | count x (u16 id_len | id bytes | dim x f32)
inline constexpr std::uint8_t kEmbFormatVersion = 1;
inline constexpr std::size_t kEmbHeaderBytes = 13;

std::vector<std::uint8_t> encode_embeddings(const EmbeddingSet& set);
EmbeddingSet decode_embeddings(std::span<const std::uint8_t> bytes, Modality modality,
                               SetKind kind = SetKind::kFeatures);

void write_embeddings(const EmbeddingSet& set, const std::filesystem::path& path);
EmbeddingSet read_embeddings(const std::filesystem::path& path, Modality modality,
                             SetKind kind = SetKind::kFeatures);

}  // namespace mmfusion
