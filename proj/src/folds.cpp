#include "mmfusion/folds.hpp"

#include "mmfusion/error.hpp"

namespace mmfusion {

std::array<FoldSpec, kNumSessions> session_folds(const Manifest& manifest) {
  std::array<FoldSpec, kNumSessions> folds;
  for (int f = 0; f < kNumSessions; ++f) {
    auto& fold = folds[static_cast<std::size_t>(f)];
    fold.fold_index = f + 1;
    fold.test_session = f + 1;
    std::size_t k = 0;
    for (int s = 1; s <= kNumSessions; ++s) {
      if (s != fold.test_session) fold.train_sessions[k++] = s;
    }
  }
  for (std::size_t i = 0; i < manifest.size(); ++i) {
    const int session = manifest[i].session;
    for (auto& fold : folds) {
      (fold.test_session == session ? fold.test_rows : fold.train_rows).push_back(i);
    }
  }
  for (const auto& fold : folds) {
    if (fold.test_rows.empty()) {
      throw Error(ErrorCode::kEmptyFold,
                  "EmptyFold: session " + std::to_string(fold.test_session) + " has no utterances");
    }
  }
  return folds;
}

}  // namespace mmfusion
