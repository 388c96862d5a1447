#pragma once

#include <cstdint>

#include <Eigen/Dense>

#include "spdc/image_stack.hpp"
#include "spdc/random.hpp"
#include "spdc/schmidt.hpp"

namespace spdc {

/// Separable thermal ensemble built from a 1D coherent-mode decomposition:
/// <E(x,y) E*(x',y')> = G(x,x') G(y,y').
struct SynthesisSpec {
  OneDDecomposition<double> one_d;
  int n_frames = 1000;
  double read_noise = 0.0;  // counts, standard deviation
  double offset = 0.0;      // counts
  std::uint64_t seed = 1;
  bool quantize = false;
  double gain_label = 0.0;

  void validate() const;
};

/// One field realisation E = V C V^T with V = [sqrt(mu_i) v_i] and C a matrix
/// of unit-variance circular complex Gaussians (drawn column-major, real part first).
Eigen::MatrixXcd sample_field_frame(const SynthesisSpec& spec, NormalStream& rng);

/// Frames |E_j|^2 + offset + read noise, clamped at zero and optionally rounded.
/// Frame j draws from NormalStream::for_item(seed, j), so output does not
/// depend on generation order.
ImageStack synthesize_stack(const SynthesisSpec& spec);

/// Ensemble mean intensity I(x) I(y) implied by the decomposition.
Eigen::MatrixXd expected_intensity(const OneDDecomposition<double>& one_d);

/// Rescales mu so the peak of expected_intensity equals `peak`.
OneDDecomposition<double> scaled_to_peak(OneDDecomposition<double> one_d, double peak);

}  // namespace spdc
