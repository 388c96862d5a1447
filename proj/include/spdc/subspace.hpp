#pragma once

#include <algorithm>
#include <cmath>
#include <utility>
#include <vector>

#include <Eigen/QR>
#include <Eigen/SVD>

#include "spdc/types.hpp"

namespace spdc {

/// Cosines of the principal angles between span(a) and span(b), descending.
template <typename Scalar>
Vec<Scalar> principal_cosines(const Mat<Scalar>& a, const Mat<Scalar>& b) {
  const Mat<Scalar> qa = Eigen::HouseholderQR<Mat<Scalar>>(a).householderQ() *
                         Mat<Scalar>::Identity(a.rows(), a.cols());
  const Mat<Scalar> qb = Eigen::HouseholderQR<Mat<Scalar>>(b).householderQ() *
                         Mat<Scalar>::Identity(b.rows(), b.cols());
  Eigen::JacobiSVD<Mat<Scalar>> svd(qa.transpose() * qb);
  return svd.singularValues().cwiseMin(Scalar(1));
}

/// Mean squared principal cosine; 1 for identical subspaces, 0 for orthogonal ones.
template <typename Scalar>
Scalar subspace_overlap(const Mat<Scalar>& a, const Mat<Scalar>& b) {
  const Vec<Scalar> c = principal_cosines(a, b);
  if (c.size() == 0) return Scalar(0);
  return c.squaredNorm() / Scalar(std::max(a.cols(), b.cols()));
}

/// Groups a non-increasing sequence into runs whose neighbouring relative gap
/// is below `rel_gap`. Returns [begin, end) index ranges.
template <typename Derived>
std::vector<std::pair<int, int>> degenerate_clusters(const Eigen::MatrixBase<Derived>& values,
                                                     double rel_gap) {
  std::vector<std::pair<int, int>> out;
  const auto n = static_cast<int>(values.size());
  int begin = 0;
  for (int k = 1; k <= n; ++k) {
    bool split = k == n;
    if (!split) {
      const double prev = double(values(k - 1));
      const double cur = double(values(k));
      const double scale = std::max(std::abs(prev), std::abs(cur));
      split = scale == 0.0 ? false : std::abs(prev - cur) > rel_gap * scale;
    }
    if (split) {
      out.emplace_back(begin, k);
      begin = k;
    }
  }
  return out;
}

/// Smallest count >= m that does not cut through a degenerate cluster.
template <typename Derived>
int cluster_aligned_count(const Eigen::MatrixBase<Derived>& values, int m, double rel_gap) {
  for (const auto& [begin, end] : degenerate_clusters(values, rel_gap)) {
    if (begin < m && m < end) return end;
  }
  return m;
}

}  // namespace spdc
