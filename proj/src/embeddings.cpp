#include "mmfusion/embeddings.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>
#include <limits>

#include "mmfusion/emotion.hpp"
#include "mmfusion/error.hpp"
#include "byte_io.hpp"

namespace mmfusion {
namespace {

using detail::ByteReader;
using detail::ByteWriter;

constexpr char kMagic[4] = {'E', 'M', 'B', '1'};

template <typename T>
void validate_probability_impl(std::span<const T> v) {
  if (v.size() != static_cast<std::size_t>(kNumClasses)) {
    throw Error(ErrorCode::kInvalidProbability,
                "probability vector must have 4 entries, got " + std::to_string(v.size()));
  }
  double sum = 0.0;
  for (T x : v) {
    if (!std::isfinite(x) || x < 0) {
      throw Error(ErrorCode::kInvalidProbability, "probability entries must be finite and >= 0");
    }
    sum += static_cast<double>(x);
  }
  if (std::abs(sum - 1.0) > kProbabilitySumTolerance) {
    throw Error(ErrorCode::kInvalidProbability,
                "probability vector sums to " + std::to_string(sum) + ", expected 1");
  }
}

}  // namespace

std::string_view modality_name(Modality m) {
  switch (m) {
    case Modality::kText: return "text";
    case Modality::kSpeech: return "speech";
    case Modality::kVideo: return "video";
    case Modality::kFused: return "fused";
  }
  return "?";
}

std::optional<Modality> parse_modality(std::string_view name) {
  for (Modality m : {Modality::kText, Modality::kSpeech, Modality::kVideo, Modality::kFused}) {
    if (modality_name(m) == name) return m;
  }
  return std::nullopt;
}

void validate_probability_vector(std::span<const float> v) { validate_probability_impl(v); }
void validate_probability_vector(std::span<const double> v) { validate_probability_impl(v); }

EmbeddingSet::EmbeddingSet(Modality modality, std::uint32_t dim,
                           std::vector<EmbeddingRecord> records, SetKind kind)
    : modality_(modality), dim_(dim), kind_(kind), records_(std::move(records)) {
  if (dim_ == 0) throw Error(ErrorCode::kValidation, "embedding dim must be positive");
  if (kind_ == SetKind::kProbabilities && dim_ != static_cast<std::uint32_t>(kNumClasses)) {
    throw Error(ErrorCode::kDimMismatch,
                "probability set must have dim 4, got " + std::to_string(dim_));
  }
  index_.reserve(records_.size());
  for (std::size_t i = 0; i < records_.size(); ++i) {
    const auto& r = records_[i];
    if (r.utterance_id.empty()) throw Error(ErrorCode::kValidation, "empty utterance id in embedding set");
    if (r.vector.size() != dim_) {
      throw Error(ErrorCode::kDimMismatch, "record " + r.utterance_id + " has dim " +
                                               std::to_string(r.vector.size()) + ", set dim is " +
                                               std::to_string(dim_));
    }
    for (float x : r.vector) {
      if (!std::isfinite(x)) throw Error(ErrorCode::kNonFinite, "non-finite value in record " + r.utterance_id);
    }
    if (kind_ == SetKind::kProbabilities) {
      try {
        validate_probability_vector(std::span<const float>(r.vector));
      } catch (const Error& e) {
        throw Error(ErrorCode::kInvalidProbability, "record " + r.utterance_id + ": " + e.what());
      }
    }
    if (!index_.emplace(r.utterance_id, i).second) {
      throw Error(ErrorCode::kDuplicateId, "duplicate utterance id in embedding set: " + r.utterance_id);
    }
  }
}

const EmbeddingRecord* EmbeddingSet::find(std::string_view utterance_id) const {
  auto it = index_.find(std::string(utterance_id));
  return it == index_.end() ? nullptr : &records_[it->second];
}

bool bitwise_equal(const EmbeddingSet& a, const EmbeddingSet& b) {
  if (a.dim() != b.dim() || a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const auto& ra = a.records()[i];
    const auto& rb = b.records()[i];
    if (ra.utterance_id != rb.utterance_id) return false;
    if (std::memcmp(ra.vector.data(), rb.vector.data(), ra.vector.size() * sizeof(float)) != 0) {
      return false;
    }
  }
  return true;
}

std::vector<std::uint8_t> encode_embeddings(const EmbeddingSet& set) {
  if (set.size() > std::numeric_limits<std::uint32_t>::max()) {
    throw Error(ErrorCode::kValidation, "too many records for EMB1");
  }
  ByteWriter out;
  std::size_t total = kEmbHeaderBytes;
  for (const auto& r : set.records()) total += 2 + r.utterance_id.size() + 4 * std::size_t{set.dim()};
  out.reserve(total);

  out.bytes(std::string_view(kMagic, sizeof(kMagic)));
  out.u8(kEmbFormatVersion);
  out.u32(static_cast<std::uint32_t>(set.size()));
  out.u32(set.dim());
  for (const auto& r : set.records()) {
    if (r.utterance_id.size() > std::numeric_limits<std::uint16_t>::max()) {
      throw Error(ErrorCode::kValidation, "utterance id longer than 65535 bytes");
    }
    out.u16(static_cast<std::uint16_t>(r.utterance_id.size()));
    out.bytes(r.utterance_id);
    for (float x : r.vector) out.f32(x);
  }
  return out.take();
}

EmbeddingSet decode_embeddings(std::span<const std::uint8_t> bytes, Modality modality, SetKind kind) {
  detail::expect_magic(bytes, std::string_view(kMagic, sizeof(kMagic)), "EMB1");
  ByteReader in(bytes.subspan(sizeof(kMagic)), "EMB1");
  const auto version = in.u8("version");
  if (version != kEmbFormatVersion) {
    throw Error(ErrorCode::kUnsupportedVersion, "unsupported EMB1 version " + std::to_string(version));
  }
  const auto count = in.u32("record count");
  const auto dim = in.u32("dim");
  if (dim == 0) throw Error(ErrorCode::kDimMismatch, "EMB1 header declares dim 0");
  if (kind == SetKind::kProbabilities && dim != static_cast<std::uint32_t>(kNumClasses)) {
    throw Error(ErrorCode::kDimMismatch,
                "probability file must have dim 4, header says " + std::to_string(dim));
  }

  std::vector<EmbeddingRecord> records;
  // Each record needs at least 2 + 4*dim bytes; cap the reservation by what is on disk.
  records.reserve(std::min<std::size_t>(count, in.remaining() / (2 + 4 * std::size_t{dim}) + 1));
  for (std::uint32_t i = 0; i < count; ++i) {
    EmbeddingRecord r;
    const auto len = in.u16("id length");
    auto id = in.take(len, "id bytes");
    r.utterance_id.assign(id.begin(), id.end());
    in.need(4 * std::size_t{dim}, "vector");
    r.vector.resize(dim);
    for (auto& x : r.vector) x = in.f32("vector");
    records.push_back(std::move(r));
  }
  if (in.remaining() != 0) {
    throw Error(ErrorCode::kValidation,
                std::to_string(in.remaining()) + " trailing bytes after the declared records");
  }
  return EmbeddingSet(modality, dim, std::move(records), kind);
}

void write_embeddings(const EmbeddingSet& set, const std::filesystem::path& path) {
  const auto bytes = encode_embeddings(set);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::kIo, "cannot open for writing: " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error(ErrorCode::kIo, "write failed: " + path.string());
}

EmbeddingSet read_embeddings(const std::filesystem::path& path, Modality modality, SetKind kind) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot open embedding file: " + path.string());
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  try {
    return decode_embeddings(bytes, modality, kind);
  } catch (const Error& e) {
    throw Error(e.code(), path.string() + ": " + e.what());
  }
}

}  // namespace mmfusion
