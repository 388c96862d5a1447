#include "spdc/covariance.hpp"

#include <algorithm>
#include <chrono>
#include <numbers>

namespace spdc {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

Eigen::MatrixXd symmetrized(const Eigen::MatrixXd& m) { return 0.5 * (m + m.transpose()); }

}  // namespace

SliceSet extract_slices(const ImageStack& stack, int n_angles, PixelCenter center, int length) {
  if (n_angles < 1) throw Error(ErrorKind::geometry, "need at least one orientation");
  if (length < 1 || length % 2 == 0) throw Error(ErrorKind::geometry, "slice length must be odd");
  SliceSet out;
  out.center = center;
  out.length = length;
  out.pitch_mrad = stack.meta.pitch_mrad;
  out.angles.resize(n_angles);
  out.per_angle.assign(n_angles, Eigen::MatrixXd(stack.n_frames(), length));
  for (int a = 0; a < n_angles; ++a) {
    out.angles[a] = std::numbers::pi * a / n_angles;
    for (int j = 0; j < stack.n_frames(); ++j) {
      out.per_angle[a].row(j) =
          extract_diametric_slice(stack.frames[j], out.angles[a], center, length).transpose();
    }
  }
  return out;
}

CovariancePair accumulate_covariances(const SliceSet& slices) {
  const int m = slices.n_frames();
  if (m < 2) throw Error(ErrorKind::data, "covariance needs at least 2 frames");
  const int n = slices.length;
  CovariancePair out;
  out.c_true = Eigen::MatrixXd::Zero(n, n);
  out.c_acc = Eigen::MatrixXd::Zero(n, n);
  out.n_frames = m;
  out.n_angles = static_cast<int>(slices.per_angle.size());
  out.grid = {n, slices.pitch_mrad};

  Eigen::MatrixXd shifted(m, n);
  for (const Eigen::MatrixXd& x : slices.per_angle) {
    const Eigen::RowVectorXd mean = x.colwise().mean();
    const Eigen::MatrixXd d = x.rowwise() - mean;
    // Row j of `shifted` is the fluctuation of frame j + 1, wrapping to frame 1.
    shifted.topRows(m - 1) = d.bottomRows(m - 1);
    shifted.row(m - 1) = d.row(0);
    out.c_true.noalias() += d.transpose() * d;
    out.c_acc.noalias() += d.transpose() * shifted;
  }
  const double scale = 1.0 / (double(m) * out.n_angles);
  out.c_true = symmetrized(out.c_true * scale);
  out.c_acc = symmetrized(out.c_acc * scale);
  return out;
}

CorrelationMatrix estimate_g1_slice(const CovariancePair& pair, Estimator variant,
                                    EstimateDiagnostics* diagnostics) {
  const Eigen::Index n = pair.c_true.rows();
  int clamped = 0;
  auto root = [&clamped](double x) {
    if (x < 0) {
      ++clamped;
      return 0.0;
    }
    return std::sqrt(x);
  };

  Eigen::MatrixXd g(n, n);
  for (Eigen::Index b = 0; b < n; ++b) {
    for (Eigen::Index a = 0; a < n; ++a) {
      g(a, b) = variant == Estimator::sqrt_then_subtract ? root(pair.c_true(a, b)) - root(pair.c_acc(a, b))
                                                   : root(pair.c_true(a, b) - pair.c_acc(a, b));
    }
  }
  g = symmetrized(g);
  for (Eigen::Index i = 0; i < n; ++i) {
    if (g(i, i) < 0) {
      g(i, i) = 0;
      ++clamped;
    }
  }
  if (diagnostics) diagnostics->clamped_entries = clamped;

  CorrelationMatrix out;
  out.values = std::move(g);
  out.grid = pair.grid;
  out.provenance = Provenance::reconstructed;
  return out;
}

PixelCenter centroid_center(const ImageStack& stack) {
  const Eigen::MatrixXd mean = stack.mean_frame();
  const double total = mean.sum();
  if (!(total > 0)) throw Error(ErrorKind::degenerate_input, "mean frame carries no intensity");
  double r = 0.0;
  double c = 0.0;
  for (Eigen::Index i = 0; i < mean.rows(); ++i) {
    for (Eigen::Index j = 0; j < mean.cols(); ++j) {
      r += double(i) * mean(i, j);
      c += double(j) * mean(i, j);
    }
  }
  return {static_cast<int>(std::lround(r / total)), static_cast<int>(std::lround(c / total))};
}

int max_slice_length(const ImageStack& stack, PixelCenter center) {
  const int h = std::min({center.row, stack.rows - 1 - center.row, center.col,
                          stack.cols - 1 - center.col});
  if (h < 1) throw Error(ErrorKind::geometry, "centre too close to the frame edge");
  return 2 * h + 1;
}

Reconstruction reconstruct_pipeline(const ImageStack& stack, const ReconstructionConfig& config) {
  if (stack.n_frames() < 2) throw Error(ErrorKind::data, "stack needs at least 2 frames");
  Reconstruction out;

  auto start = Clock::now();
  switch (config.center_policy) {
    case CenterPolicy::centroid:
      out.center = centroid_center(stack);
      break;
    case CenterPolicy::metadata:
      if (!stack.meta.center_row || !stack.meta.center_col) {
        throw Error(ErrorKind::geometry, "stack metadata carries no centre");
      }
      out.center = {*stack.meta.center_row, *stack.meta.center_col};
      break;
    case CenterPolicy::explicit_pixel:
      out.center = config.center;
      break;
  }
  const int length = config.length > 0 ? config.length : max_slice_length(stack, out.center);
  const SliceSet slices = extract_slices(stack, config.n_angles, out.center, length);
  out.timings.slicing_s = seconds_since(start);

  start = Clock::now();
  const CovariancePair pair = accumulate_covariances(slices);
  out.timings.covariance_s = seconds_since(start);

  start = Clock::now();
  EstimateDiagnostics diag;
  out.g1 = estimate_g1_slice(pair, config.estimator, &diag);
  out.clamped_entries = diag.clamped_entries;
  const double true_norm = pair.c_true.norm();
  out.accidental_ratio = true_norm > 0 ? pair.c_acc.norm() / true_norm : 0.0;
  out.timings.estimate_s = seconds_since(start);

  start = Clock::now();
  OneDDecomposition<double> one_d = diagonalize_1d(out.g1);
  const double mass = one_d.mu.cwiseAbs().sum() + one_d.clamped_negative;
  out.negative_mass = mass > 0 ? one_d.clamped_negative / mass : 0.0;
  out.result = schmidt_analysis(std::move(one_d), config.n_keep);
  out.timings.decomposition_s = seconds_since(start);
  return out;
}

std::string estimator_name(Estimator e) {
  return e == Estimator::sqrt_then_subtract ? "sqrt-then-subtract" : "subtract-then-sqrt";
}

Estimator parse_estimator(const std::string& name) {
  if (name == "sqrt-then-subtract") return Estimator::sqrt_then_subtract;
  if (name == "subtract-then-sqrt") return Estimator::subtract_then_sqrt;
  throw Error(ErrorKind::config, "unknown estimator '" + name + "'");
}

}  // namespace spdc
