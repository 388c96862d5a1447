#include "spdc/full4d.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <string>

#include "spdc/eigensolver.hpp"
#include "spdc/error.hpp"
#include "spdc/schmidt.hpp"

namespace spdc {

Full4DCovariance full4d_covariances(const ImageStack& stack, int cap) {
  if (std::max(stack.rows, stack.cols) > cap) {
    throw Error(ErrorKind::resource, "frame side " + std::to_string(std::max(stack.rows, stack.cols)) +
                                         " exceeds the 4D cap of " + std::to_string(cap));
  }
  const int m = stack.n_frames();
  if (m < 2) throw Error(ErrorKind::data, "covariance needs at least 2 frames");
  const Eigen::Index p = Eigen::Index(stack.rows) * stack.cols;

  Eigen::MatrixXd d(m, p);
  for (int j = 0; j < m; ++j) {
    d.row(j) = Eigen::Map<const Eigen::RowVectorXf>(stack.frames[j].data(), p).cast<double>();
  }
  d.rowwise() -= d.colwise().mean();

  Full4DCovariance out;
  out.c_true.noalias() = d.transpose() * d;
  // Pair frame j with frame j + 1 (wrapping) without copying d.
  out.c_acc.noalias() = d.topRows(m - 1).transpose() * d.bottomRows(m - 1);
  out.c_acc.noalias() += d.row(m - 1).transpose() * d.row(0);
  out.c_true /= double(m);
  out.c_acc /= double(m);
  out.c_true = (0.5 * (out.c_true + out.c_true.transpose())).eval();
  out.c_acc = (0.5 * (out.c_acc + out.c_acc.transpose())).eval();
  return out;
}

Eigen::MatrixXd full4d_estimate(const ImageStack& stack, int cap) {
  Full4DCovariance cov = full4d_covariances(stack, cap);
  Eigen::MatrixXd g = std::move(cov.c_true);
  g -= cov.c_acc;
  cov.c_acc.resize(0, 0);
  g = g.cwiseMax(0.0).cwiseSqrt();
  return g;
}

Full4DResult full4d_decompose(const Eigen::MatrixXd& matrix, int rows, int cols, int m_top) {
  const Eigen::Index p = Eigen::Index(rows) * cols;
  if (matrix.rows() != p || matrix.cols() != p) {
    throw Error(ErrorKind::data, "4D matrix does not match the frame shape");
  }
  if (!matrix.allFinite()) throw Error(ErrorKind::data, "4D matrix has non-finite entries");
  if (m_top < 0 || m_top > p) throw Error(ErrorKind::contract, "m_top out of range");

  const auto start = std::chrono::steady_clock::now();
  SymmetricEigen<double> eig = symmetric_eigen<double>(matrix);

  Full4DResult out;
  out.rows = rows;
  out.cols = cols;
  out.spectrum = eig.values.reverse();
  const double top = std::max(out.spectrum(0), 0.0);
  for (Eigen::Index i = 0; i < p; ++i) {
    if (out.spectrum(i) < kEigenClampFraction * top) out.spectrum(i) = 0.0;
  }
  const double total = out.spectrum.sum();
  if (!(total > 0)) throw Error(ErrorKind::degenerate_input, "4D spectrum is identically zero");
  out.spectrum /= total;

  out.mode_vectors = eig.vectors.rightCols(m_top).rowwise().reverse();
  for (int k = 0; k < m_top; ++k) {
    auto v = out.mode_vectors.col(k);
    Eigen::Index arg = 0;
    v.cwiseAbs().maxCoeff(&arg);
    if (v(arg) < 0) v *= -1.0;
    v.normalize();
    out.modes.push_back(Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic,
                                                       Eigen::RowMajor>>(v.data(), rows, cols));
  }
  out.timing.diagonalization_s =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return out;
}

}  // namespace spdc
