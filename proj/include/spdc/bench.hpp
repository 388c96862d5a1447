#pragma once

#include <cstddef>
#include <string>

#include <Eigen/Dense>

#include "spdc/covariance.hpp"
#include "spdc/full4d.hpp"
#include "spdc/image_stack.hpp"

namespace spdc {

struct BenchConfig {
  int repetitions = 3;  // each method is timed this many times; medians are reported
  int m_top = 8;
  ReconstructionConfig recon;
  int cap = kDefaultFull4DCap;
  /// Relative gap below which neighbouring eigenvalues count as one cluster
  /// when choosing the compared subspace dimension.
  double cluster_gap = 0.1;
};

/// Timing and agreement between the slice method and the dense 4D method
/// run on the same stack.
struct BenchReport {
  int rows = 0;
  int cols = 0;
  int n_frames = 0;
  int repetitions = 0;
  std::string eigensolver;

  ReconstructionTimings symmetric;  // per-phase medians
  Full4DTimings full4d;             // per-phase medians
  double symmetric_total_s = 0.0;   // median of per-run totals
  double full4d_total_s = 0.0;
  double speedup = 0.0;
  /// Stack load time, when the caller measured one; added to both totals.
  double io_s = 0.0;

  std::size_t symmetric_bytes = 0;
  std::size_t full4d_bytes = 0;

  Eigen::VectorXd symmetric_spectrum;  // top m_top normalised lambda
  Eigen::VectorXd full4d_spectrum;
  double spectrum_l1 = 0.0;  // sum |a - b| / sum b over the top m_top
  int subspace_dim = 0;      // m_top widened to a cluster boundary
  Eigen::VectorXd principal_cosines;
  double subspace_overlap = 0.0;

  double end_to_end_speedup() const {
    return (full4d_total_s + io_s) / (symmetric_total_s + io_s);
  }
};

BenchReport compare_methods(const ImageStack& stack, const BenchConfig& config = {});

}  // namespace spdc
