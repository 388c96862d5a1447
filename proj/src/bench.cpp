#include "spdc/bench.hpp"

#include <algorithm>
#include <chrono>
#include <vector>

#include "spdc/eigensolver.hpp"
#include "spdc/subspace.hpp"

namespace spdc {

namespace {

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

/// Tensor modes of the slice method placed into full-frame pixel coordinates
/// and flattened row-major.
Eigen::MatrixXd embedded_modes(const Reconstruction& rec, int rows, int cols, int count) {
  const int length = rec.g1.grid.n_points;
  const int half = length / 2;
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(Eigen::Index(rows) * cols, count);
  for (int k = 0; k < count; ++k) {
    const IndexPair p = rec.result.spectrum.pairs[k];
    const Eigen::MatrixXd u = tensor_mode(rec.result.one_d, p.i, p.j);
    for (int a = 0; a < length; ++a) {
      for (int b = 0; b < length; ++b) {
        const int r = rec.center.row - half + a;
        const int c = rec.center.col - half + b;
        out(Eigen::Index(r) * cols + c, k) = u(a, b);
      }
    }
    out.col(k).normalize();
  }
  return out;
}

}  // namespace

BenchReport compare_methods(const ImageStack& stack, const BenchConfig& config) {
  BenchReport report;
  report.rows = stack.rows;
  report.cols = stack.cols;
  report.n_frames = stack.n_frames();
  report.repetitions = std::max(config.repetitions, 1);
  report.eigensolver = eigensolver_backend();

  ReconstructionConfig recon = config.recon;
  const int m = config.m_top;
  recon.n_keep = std::max(recon.n_keep, 4 * m);

  std::vector<double> sym_total, sym_slice, sym_cov, sym_est, sym_dec;
  Reconstruction rec;
  for (int r = 0; r < report.repetitions; ++r) {
    const auto start = std::chrono::steady_clock::now();
    rec = reconstruct_pipeline(stack, recon);
    sym_total.push_back(std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count());
    sym_slice.push_back(rec.timings.slicing_s);
    sym_cov.push_back(rec.timings.covariance_s);
    sym_est.push_back(rec.timings.estimate_s);
    sym_dec.push_back(rec.timings.decomposition_s);
  }

  std::vector<double> full_total, full_cov, full_dec;
  Full4DResult full;
  for (int r = 0; r < report.repetitions; ++r) {
    const auto start = std::chrono::steady_clock::now();
    Eigen::MatrixXd g = full4d_estimate(stack, config.cap);
    const double cov_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    full = full4d_decompose(g, stack.rows, stack.cols, std::min<Eigen::Index>(4 * m, g.rows()));
    full_total.push_back(std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count());
    full_cov.push_back(cov_s);
    full_dec.push_back(full.timing.diagonalization_s);
  }

  report.symmetric = {median(sym_slice), median(sym_cov), median(sym_est), median(sym_dec)};
  report.full4d = {median(full_cov), median(full_dec)};
  report.symmetric_total_s = median(sym_total);
  report.full4d_total_s = median(full_total);
  report.speedup = report.full4d_total_s / report.symmetric_total_s;

  const std::size_t length = static_cast<std::size_t>(rec.g1.grid.n_points);
  const std::size_t pixels = static_cast<std::size_t>(stack.rows) * stack.cols;
  const std::size_t frames = static_cast<std::size_t>(stack.n_frames());
  report.symmetric_bytes =
      sizeof(double) * (frames * recon.n_angles * length + 4 * length * length);
  report.full4d_bytes = sizeof(double) * (frames * pixels + 3 * pixels * pixels);

  const Eigen::VectorXd& lam = rec.result.spectrum.lambda;
  const int top = std::min<int>({m, static_cast<int>(lam.size()), static_cast<int>(full.spectrum.size())});
  report.symmetric_spectrum = lam.head(top);
  report.full4d_spectrum = full.spectrum.head(top);
  report.spectrum_l1 = (report.symmetric_spectrum - report.full4d_spectrum).cwiseAbs().sum() /
                       report.full4d_spectrum.sum();

  report.subspace_dim = std::min<int>(
      {cluster_aligned_count(lam, top, config.cluster_gap), static_cast<int>(lam.size()),
       static_cast<int>(full.mode_vectors.cols())});
  const Eigen::MatrixXd a = embedded_modes(rec, stack.rows, stack.cols, report.subspace_dim);
  const Eigen::MatrixXd b = full.mode_vectors.leftCols(report.subspace_dim);
  report.principal_cosines = principal_cosines<double>(a, b);
  report.subspace_overlap = subspace_overlap<double>(a, b);
  return report;
}

}  // namespace spdc
