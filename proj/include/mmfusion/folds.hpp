#pragma once

#include <array>
#include <vector>

#include "mmfusion/manifest.hpp"

namespace mmfusion {

/// Leave-one-session-out fold: fold i tests on session i.
struct FoldSpec {
  int fold_index = 1;
  int test_session = 1;
  std::array<int, kNumSessions - 1> train_sessions{};
  std::vector<std::size_t> train_rows;  // manifest row indices, ascending
  std::vector<std::size_t> test_rows;
};

/// Throws Error(kEmptyFold) when any session has no utterances.
std::array<FoldSpec, kNumSessions> session_folds(const Manifest& manifest);

}  // namespace mmfusion
