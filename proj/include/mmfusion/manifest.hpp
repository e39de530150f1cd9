#pragma once

#include <array>
#include <filesystem>
#include <string>
#include <vector>

#include "mmfusion/emotion.hpp"

namespace mmfusion {

inline constexpr int kNumSessions = 5;

struct UtteranceMeta {
  std::string utterance_id;
  int session = 1;
  std::string raw_label;
  EmotionClass emotion = EmotionClass::kNeutral;

  bool operator==(const UtteranceMeta&) const = default;
};

/// A raw dataset row before label filtering.
struct RawUtterance {
  std::string utterance_id;
  int session = 1;
  std::string raw_label;
};

/// Ordered, validated list of labelled utterances. Ids are unique and opaque,
/// sessions lie in [1, 5].
class Manifest {
 public:
  Manifest() = default;

  /// Validates every row; throws Error(kValidation / kDuplicateId).
  explicit Manifest(std::vector<UtteranceMeta> rows, std::string source = {});

  /// Applies `labels` and drops rows whose label maps to nothing.
  static Manifest from_raw(const std::vector<RawUtterance>& raw, const LabelMap& labels = {},
                           std::string source = {});

  const std::vector<UtteranceMeta>& rows() const noexcept { return rows_; }
  std::size_t size() const noexcept { return rows_.size(); }
  bool empty() const noexcept { return rows_.empty(); }
  const UtteranceMeta& operator[](std::size_t i) const { return rows_[i]; }

  /// Free-text provenance, e.g. the generator algorithm and seed.
  const std::string& source() const noexcept { return source_; }

  std::vector<EmotionClass> labels() const;

  bool operator==(const Manifest&) const = default;

 private:
  std::vector<UtteranceMeta> rows_;
  std::string source_;
};

/// Session x class counts (sessions 1..5 are rows 0..4).
struct ManifestStats {
  std::array<std::array<std::size_t, kNumClasses>, kNumSessions> counts{};
  std::array<std::size_t, kNumSessions> session_totals{};
  std::array<std::size_t, kNumClasses> class_totals{};
  std::size_t total = 0;
};

ManifestStats manifest_stats(const Manifest& manifest);

/// CSV with header `utterance_id,session,raw_label,class`. A non-empty source
/// description is written as a leading `# ` comment line.
void write_manifest(const Manifest& manifest, const std::filesystem::path& path);

/// Reads the CSV, checking that every class column equals labels.map(raw_label).
Manifest read_manifest(const std::filesystem::path& path, const LabelMap& labels = {});

}  // namespace mmfusion
