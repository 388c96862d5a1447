#pragma once

#include <vector>

#include <Eigen/Dense>

#include "spdc/image_stack.hpp"

namespace spdc {

/// Largest frame side the dense 4D path accepts. At N = 64 the covariance is
/// 4096 x 4096 (128 MiB per dense copy); N = 256 would need ~34 GB.
inline constexpr int kDefaultFull4DCap = 64;

struct Full4DCovariance {
  Eigen::MatrixXd c_true;  // (1/M) sum_j dI_j dI_j^T over flattened frames
  Eigen::MatrixXd c_acc;   // (1/M) sum_j dI_j dI_{j+1}^T, wrapping, symmetrised
};

/// Same-frame and adjacent-frame covariances of the row-major flattened frames.
Full4DCovariance full4d_covariances(const ImageStack& stack, int cap = kDefaultFull4DCap);

/// sqrt(max(C_true - C_acc, 0)) over all pixel pairs, symmetrised.
Eigen::MatrixXd full4d_estimate(const ImageStack& stack, int cap = kDefaultFull4DCap);

struct Full4DTimings {
  double covariance_s = 0.0;
  double diagonalization_s = 0.0;
};

struct Full4DResult {
  Eigen::VectorXd spectrum;            // all eigenvalues, non-increasing, sum 1
  std::vector<Eigen::MatrixXd> modes;  // leading eigenvectors as rows x cols images
  Eigen::MatrixXd mode_vectors;        // same modes as flattened columns
  int rows = 0;
  int cols = 0;
  Full4DTimings timing;
};

/// Eigendecomposition of a (rows*cols)^2 correlation; keeps `m_top` modes.
Full4DResult full4d_decompose(const Eigen::MatrixXd& matrix, int rows, int cols, int m_top);

}  // namespace spdc
