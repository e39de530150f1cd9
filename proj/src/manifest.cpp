#include "mmfusion/manifest.hpp"

#include <charconv>
#include <fstream>
#include <unordered_set>

#include "mmfusion/csv.hpp"
#include "mmfusion/error.hpp"

namespace mmfusion {
namespace {

constexpr std::string_view kHeader = "utterance_id,session,raw_label,class";

void validate_row(const UtteranceMeta& row) {
  if (row.utterance_id.empty()) throw Error(ErrorCode::kValidation, "empty utterance_id");
  if (row.session < 1 || row.session > kNumSessions) {
    throw Error(ErrorCode::kValidation, "session out of range [1,5] for utterance " +
                                            row.utterance_id + ": " + std::to_string(row.session));
  }
}

}  // namespace

Manifest::Manifest(std::vector<UtteranceMeta> rows, std::string source)
    : rows_(std::move(rows)), source_(std::move(source)) {
  std::unordered_set<std::string_view> seen;
  seen.reserve(rows_.size());
  for (const auto& row : rows_) {
    validate_row(row);
    if (!seen.insert(row.utterance_id).second) {
      throw Error(ErrorCode::kDuplicateId, "duplicate utterance_id in manifest: " + row.utterance_id);
    }
  }
}

Manifest Manifest::from_raw(const std::vector<RawUtterance>& raw, const LabelMap& labels,
                            std::string source) {
  std::vector<UtteranceMeta> rows;
  rows.reserve(raw.size());
  for (const auto& r : raw) {
    if (auto c = labels.map(r.raw_label)) rows.push_back({r.utterance_id, r.session, r.raw_label, *c});
  }
  return Manifest(std::move(rows), std::move(source));
}

std::vector<EmotionClass> Manifest::labels() const {
  std::vector<EmotionClass> out;
  out.reserve(rows_.size());
  for (const auto& r : rows_) out.push_back(r.emotion);
  return out;
}

ManifestStats manifest_stats(const Manifest& manifest) {
  ManifestStats stats;
  for (const auto& row : manifest.rows()) {
    const auto s = static_cast<std::size_t>(row.session - 1);
    const auto c = static_cast<std::size_t>(class_index(row.emotion));
    ++stats.counts[s][c];
    ++stats.session_totals[s];
    ++stats.class_totals[c];
    ++stats.total;
  }
  return stats;
}

void write_manifest(const Manifest& manifest, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::kIo, "cannot open manifest for writing: " + path.string());
  if (!manifest.source().empty()) out << "# " << manifest.source() << '\n';
  out << kHeader << '\n';
  for (const auto& row : manifest.rows()) {
    out << csv::join({row.utterance_id, std::to_string(row.session), row.raw_label,
                      std::string(class_name(row.emotion))})
        << '\n';
  }
  if (!out) throw Error(ErrorCode::kIo, "failed writing manifest: " + path.string());
}

Manifest read_manifest(const std::filesystem::path& path, const LabelMap& labels) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot open manifest: " + path.string());

  std::string line;
  std::string source;
  bool header_seen = false;
  std::vector<UtteranceMeta> rows;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (!header_seen) {
      if (line.rfind("# ", 0) == 0) {
        source = line.substr(2);
        continue;
      }
      if (line != kHeader) {
        throw Error(ErrorCode::kValidation, "manifest header mismatch in " + path.string() +
                                                ": expected '" + std::string(kHeader) + "'");
      }
      header_seen = true;
      continue;
    }
    const auto fields = csv::split_line(line);
    const std::string where = path.string() + ":" + std::to_string(line_no);
    if (fields.size() != 4) throw Error(ErrorCode::kValidation, "expected 4 fields at " + where);

    UtteranceMeta row;
    row.utterance_id = fields[0];
    const auto& s = fields[1];
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), row.session);
    if (ec != std::errc{} || ptr != s.data() + s.size()) {
      throw Error(ErrorCode::kValidation, "bad session '" + s + "' at " + where);
    }
    row.raw_label = fields[2];
    const auto stated = parse_class_name(fields[3]);
    if (!stated) throw Error(ErrorCode::kValidation, "unknown class '" + fields[3] + "' at " + where);
    const auto mapped = labels.map(row.raw_label);
    if (!mapped) {
      throw Error(ErrorCode::kValidation,
                  "raw label '" + row.raw_label + "' is excluded by the label map at " + where);
    }
    if (*mapped != *stated) {
      throw Error(ErrorCode::kValidation, "class column disagrees with label map at " + where);
    }
    row.emotion = *stated;
    rows.push_back(std::move(row));
  }
  if (!header_seen) throw Error(ErrorCode::kValidation, "manifest has no header: " + path.string());
  return Manifest(std::move(rows), std::move(source));
}

}  // namespace mmfusion
