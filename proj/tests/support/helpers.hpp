#pragma once

#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "mmfusion/dataset.hpp"
#include "mmfusion/emotion.hpp"
#include "mmfusion/linalg.hpp"
#include "mmfusion/random.hpp"
#include "mmfusion/synthetic.hpp"

namespace testutil {

inline std::vector<int> to_ints(const std::vector<mmfusion::EmotionClass>& y) {
  std::vector<int> out;
  for (auto c : y) out.push_back(mmfusion::class_index(c));
  return out;
}

inline std::vector<mmfusion::EmotionClass> to_classes(const std::vector<int>& y) {
  std::vector<mmfusion::EmotionClass> out;
  for (int c : y) out.push_back(mmfusion::class_from_index(c));
  return out;
}

inline double accuracy(const std::vector<mmfusion::EmotionClass>& a, const std::vector<mmfusion::EmotionClass>& b) {
  std::size_t ok = 0;
  for (std::size_t i = 0; i < a.size(); ++i) ok += a[i] == b[i];
  return static_cast<double>(ok) / static_cast<double>(a.size());
}

inline mmfusion::AlignedDataset synthetic_dataset(const mmfusion::SyntheticConfig& cfg) {
  const auto data = mmfusion::gen_synthetic(cfg);
  return mmfusion::align(data.manifest, data.text, data.speech, data.video);
}

/// Unique scratch directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  TempDir() {
    std::random_device rd;
    path_ = std::filesystem::temp_directory_path() / ("mmfusion_test_" + std::to_string(rd()) + std::to_string(rd()));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

inline mmfusion::Matrix random_matrix(mmfusion::Rng& rng, Eigen::Index rows, Eigen::Index cols, double scale = 1.0) {
  mmfusion::Matrix m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = scale * rng.normal();
  }
  return m;
}

}  // namespace testutil
