#pragma once

#include "mmfusion/linalg.hpp"

namespace mmfusion {

struct PcaProjection {
  Matrix components;  // k x d, orthonormal rows
  Vector eigenvalues;  // k, descending, >= 0
  Vector mean;         // d
  Matrix projected;    // n x k coordinates of the centred input

  Matrix transform(const Matrix& x) const;
};

/// Eigendecomposition of the sample covariance (denominator n - 1), keeping the
/// top k components. Each component is signed so its largest-magnitude entry is
/// positive (first such entry on ties). Requires n >= 2 and 1 <= k <= min(n - 1, d).
PcaProjection pca_project(const Matrix& x, int k);

}  // namespace mmfusion
