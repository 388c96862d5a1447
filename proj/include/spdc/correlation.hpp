#pragma once

#include <Eigen/Dense>

#include "spdc/grid.hpp"
#include "spdc/optics.hpp"

namespace spdc {

/// Radial quadrature over the crystal plane. Node count doubles from
/// `initial_nodes` until the max entry change is below `rel_tol` times the
/// largest entry.
struct QuadratureSettings {
  int initial_nodes = 256;
  int max_nodes = 16384;
  double rel_tol = 1e-6;
  double cutoff_waists = 5.0;
};

enum class Provenance { theory, reconstructed };

/// Real symmetric first-order correlation G(q_x, q'_x) on a 1D slice.
struct CorrelationMatrix {
  Eigen::MatrixXd values;
  WavevectorGrid grid;
  Provenance provenance = Provenance::theory;
  /// Largest dropped imaginary part relative to the largest entry.
  double imag_residual = 0.0;
  int radial_nodes = 0;
};

struct IntensityProfile {
  Eigen::VectorXd values;
  WavevectorGrid grid;
};

/// High-gain correlation function on the x-axis slice, using the
/// J0 reduction of the radial pump integral.
CorrelationMatrix g1_slice(const CrystalPumpConfig& config, const WavevectorGrid& grid,
                           const QuadratureSettings& quad = {});

/// Diagonal of g1_slice, computed without the off-diagonal work.
IntensityProfile far_field_intensity(const CrystalPumpConfig& config, const WavevectorGrid& grid,
                                     const QuadratureSettings& quad = {});

/// Normalised degree of coherence as a function of sample separation.
struct CoherenceProfile {
  Eigen::VectorXd degree;       // indexed by |a - b|
  Eigen::VectorXd spread;       // max |value - mean| at that separation
  Eigen::VectorXi pair_count;   // zero where no supported pair exists
  double support_threshold = 0.0;

  /// Largest spread over separations that have at least one pair.
  double max_spread() const;
};

CoherenceProfile coherence_degree(const CorrelationMatrix& corr, double support_fraction = 1e-6);

/// sqrt(I(q) I(q')) exp(-(q - q')^2 / 2 sigma_c^2) with a Gaussian I of rms
/// width sigma_i. Widths in mrad.
CorrelationMatrix gaussian_schell_matrix(const WavevectorGrid& grid, double intensity_rms_mrad,
                                         double coherence_rms_mrad);

double total_intensity(const IntensityProfile& profile);

}  // namespace spdc
