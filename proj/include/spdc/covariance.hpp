#pragma once

#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "spdc/correlation.hpp"
#include "spdc/error.hpp"
#include "spdc/image_stack.hpp"
#include "spdc/schmidt.hpp"

namespace spdc {

struct PixelCenter {
  int row = 0;
  int col = 0;

  friend bool operator==(const PixelCenter&, const PixelCenter&) = default;
};

namespace detail {

inline double snap(double x) {
  const double r = std::round(x);
  return std::abs(x - r) < 1e-9 ? r : x;
}

}  // namespace detail

/// `length` samples one pixel apart on the line through `center` at `angle`
/// (radians, measured from the +column axis towards +row). Bilinear
/// interpolation; angle 0 reads the centre row exactly.
template <typename Derived>
Eigen::VectorXd extract_diametric_slice(const Eigen::MatrixBase<Derived>& frame, double angle,
                                        PixelCenter center, int length) {
  if (length < 1) throw Error(ErrorKind::geometry, "slice length must be positive");
  const double half = 0.5 * (length - 1);
  const double dr = std::sin(angle);
  const double dc = std::cos(angle);
  const double max_r = double(frame.rows() - 1);
  const double max_c = double(frame.cols() - 1);
  for (double s : {-half, half}) {
    const double r = detail::snap(center.row + s * dr);
    const double c = detail::snap(center.col + s * dc);
    if (r < 0 || c < 0 || r > max_r || c > max_c) {
      throw Error(ErrorKind::geometry, "slice endpoint (" + std::to_string(r) + ", " +
                                           std::to_string(c) + ") lies outside the frame");
    }
  }

  Eigen::VectorXd out(length);
  for (int k = 0; k < length; ++k) {
    const double s = k - half;
    const double r = detail::snap(center.row + s * dr);
    const double c = detail::snap(center.col + s * dc);
    const auto r0 = static_cast<Eigen::Index>(std::floor(r));
    const auto c0 = static_cast<Eigen::Index>(std::floor(c));
    const double fr = r - double(r0);
    const double fc = c - double(c0);
    const Eigen::Index r1 = fr > 0 ? r0 + 1 : r0;
    const Eigen::Index c1 = fc > 0 ? c0 + 1 : c0;
    out(k) = (1 - fr) * (1 - fc) * double(frame(r0, c0)) + (1 - fr) * fc * double(frame(r0, c1)) +
             fr * (1 - fc) * double(frame(r1, c0)) + fr * fc * double(frame(r1, c1));
  }
  return out;
}

/// Slices of every frame at every orientation. per_angle[a] is frames x length.
struct SliceSet {
  std::vector<Eigen::MatrixXd> per_angle;
  std::vector<double> angles;
  PixelCenter center;
  int length = 0;
  double pitch_mrad = 1.0;

  int n_frames() const { return per_angle.empty() ? 0 : static_cast<int>(per_angle.front().rows()); }
};

/// `n_angles` orientations evenly spaced in [0, pi).
SliceSet extract_slices(const ImageStack& stack, int n_angles, PixelCenter center, int length);

/// Orientation-averaged same-frame and adjacent-frame fluctuation covariances.
struct CovariancePair {
  Eigen::MatrixXd c_true;
  Eigen::MatrixXd c_acc;
  int n_frames = 0;
  int n_angles = 0;
  WavevectorGrid grid;
};

CovariancePair accumulate_covariances(const SliceSet& slices);

enum class Estimator {
  /// sqrt(C_true) - sqrt(C_acc), entrywise.
  sqrt_then_subtract,
  /// sqrt(C_true - C_acc), entrywise.
  subtract_then_sqrt,
};

struct EstimateDiagnostics {
  int clamped_entries = 0;
};

CorrelationMatrix estimate_g1_slice(const CovariancePair& pair, Estimator variant,
                                    EstimateDiagnostics* diagnostics = nullptr);

/// Intensity centroid of the mean frame, rounded to the nearest pixel.
PixelCenter centroid_center(const ImageStack& stack);

/// Longest odd slice through `center` that stays inside the frame at every angle.
int max_slice_length(const ImageStack& stack, PixelCenter center);

enum class CenterPolicy { centroid, metadata, explicit_pixel };

struct ReconstructionConfig {
  int n_angles = 16;
  int length = 0;  // 0 picks max_slice_length
  CenterPolicy center_policy = CenterPolicy::centroid;
  PixelCenter center;  // used with explicit_pixel
  Estimator estimator = Estimator::sqrt_then_subtract;
  int n_keep = 25;
};

struct ReconstructionTimings {
  double slicing_s = 0.0;
  double covariance_s = 0.0;
  double estimate_s = 0.0;
  double decomposition_s = 0.0;

  double total() const { return slicing_s + covariance_s + estimate_s + decomposition_s; }
};

struct Reconstruction {
  SchmidtResult<double> result;
  CorrelationMatrix g1;
  PixelCenter center;
  int clamped_entries = 0;
  /// ||C_acc||_F / ||C_true||_F.
  double accidental_ratio = 0.0;
  /// Negative eigenvalue mass relative to the total |mu|.
  double negative_mass = 0.0;
  ReconstructionTimings timings;
};

Reconstruction reconstruct_pipeline(const ImageStack& stack, const ReconstructionConfig& config = {});

std::string estimator_name(Estimator e);
Estimator parse_estimator(const std::string& name);

}  // namespace spdc
