#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include <Eigen/Dense>

namespace spdc {

using Frame = Eigen::Matrix<float, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

struct StackMetadata {
  double pitch_mrad = 1.0;
  std::optional<int> center_row;
  std::optional<int> center_col;
  double gain = 0.0;
  std::uint64_t seed = 0;
  double read_noise = 0.0;
  double offset = 0.0;
  bool quantize = false;

  friend bool operator==(const StackMetadata&, const StackMetadata&) = default;
};

/// M single-shot far-field frames of identical size.
struct ImageStack {
  int rows = 0;
  int cols = 0;
  std::vector<Frame> frames;
  StackMetadata meta;

  int n_frames() const { return static_cast<int>(frames.size()); }

  /// Pixel-wise mean over frames, in double precision.
  Eigen::MatrixXd mean_frame() const {
    Eigen::MatrixXd sum = Eigen::MatrixXd::Zero(rows, cols);
    for (const Frame& f : frames) sum += f.cast<double>();
    return frames.empty() ? sum : Eigen::MatrixXd(sum / double(frames.size()));
  }
};

}  // namespace spdc
