#include "mmfusion/pca.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>

#include "mmfusion/error.hpp"

namespace mmfusion {

Matrix PcaProjection::transform(const Matrix& x) const {
  if (x.cols() != mean.size()) throw Error(ErrorCode::kDimMismatch, "PCA transform dim mismatch");
  Matrix centred = x;
  centred.rowwise() -= mean.transpose();
  return centred * components.transpose();
}

PcaProjection pca_project(const Matrix& x, int k) {
  const Eigen::Index n = x.rows();
  const Eigen::Index d = x.cols();
  if (n < 2) throw Error(ErrorCode::kValidation, "PCA needs at least 2 rows");
  if (k < 1 || k > std::min<Eigen::Index>(n - 1, d)) {
    throw Error(ErrorCode::kValidation, "PCA k must lie in [1, min(n-1, d)] = [1, " +
                                            std::to_string(std::min<Eigen::Index>(n - 1, d)) + "], got " +
                                            std::to_string(k));
  }
  if (!x.allFinite()) throw Error(ErrorCode::kNonFinite, "PCA input contains non-finite values");

  PcaProjection out;
  out.mean = x.colwise().mean().transpose();
  Matrix centred = x;
  centred.rowwise() -= out.mean.transpose();
  const Eigen::MatrixXd cov = (centred.transpose() * centred) / static_cast<double>(n - 1);

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(cov);
  if (solver.info() != Eigen::Success) throw Error(ErrorCode::kComputation, "covariance eigendecomposition failed");

  // Eigen returns ascending eigenvalues.
  out.components.resize(k, d);
  out.eigenvalues.resize(k);
  for (int i = 0; i < k; ++i) {
    const Eigen::Index src = d - 1 - i;
    Eigen::RowVectorXd v = solver.eigenvectors().col(src).transpose();
    Eigen::Index peak = 0;
    for (Eigen::Index j = 1; j < d; ++j) {
      if (std::abs(v[j]) > std::abs(v[peak])) peak = j;
    }
    if (v[peak] < 0) v = -v;
    out.components.row(i) = v;
    out.eigenvalues[i] = std::max(0.0, solver.eigenvalues()[src]);
  }
  out.projected = centred * out.components.transpose();
  return out;
}

}  // namespace mmfusion
