#pragma once

#include <Eigen/Eigenvalues>

#include "spdc/error.hpp"
#include "spdc/types.hpp"

namespace spdc {

/// Eigenpairs of a real symmetric matrix, eigenvalues ascending.
template <typename Scalar>
struct SymmetricEigen {
  Vec<Scalar> values;
  Mat<Scalar> vectors;
};

/// Full symmetric eigendecomposition. Reads the lower triangle only.
/// float and double use OpenBLAS's divide-and-conquer driver when it can be
/// loaded at runtime; other scalars use Eigen's solver.
template <typename Scalar>
SymmetricEigen<Scalar> symmetric_eigen(const Mat<Scalar>& a) {
  Eigen::SelfAdjointEigenSolver<Mat<Scalar>> solver(a, Eigen::ComputeEigenvectors);
  if (solver.info() != Eigen::Success) {
    throw Error(ErrorKind::data, "symmetric eigensolver failed to converge");
  }
  return {solver.eigenvalues(), solver.eigenvectors()};
}

template <>
SymmetricEigen<double> symmetric_eigen<double>(const Mat<double>& a);

template <>
SymmetricEigen<float> symmetric_eigen<float>(const Mat<float>& a);

/// Name of the backend used for float/double ("openblas" or "eigen").
const char* eigensolver_backend();

}  // namespace spdc
