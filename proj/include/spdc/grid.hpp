#pragma once

#include <string>

#include "spdc/error.hpp"

namespace spdc {

/// Uniform 1D far-field sampling. Sample i sits at angle (i - center) * pitch;
/// the transverse wavevector is that angle times |k_s|.
struct WavevectorGrid {
  int n_points = 256;
  double pitch_mrad = 0.625;

  int center_index() const { return n_points / 2; }
  double angle_mrad(int i) const { return (i - center_index()) * pitch_mrad; }
  double angle_rad(int i) const { return angle_mrad(i) * 1e-3; }
  double q(int i, double k_s) const { return angle_rad(i) * k_s; }

  void validate() const {
    if (n_points < 2) throw Error(ErrorKind::domain, "grid needs at least 2 points");
    if (!(pitch_mrad > 0)) throw Error(ErrorKind::domain, "grid pitch must be positive");
  }

  friend bool operator==(const WavevectorGrid&, const WavevectorGrid&) = default;
};

/// `n` samples spanning +-80 mrad.
inline WavevectorGrid default_grid(int n = 256) { return {n, 160.0 / n}; }

}  // namespace spdc
