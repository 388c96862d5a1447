#pragma once

#include <complex>
#include <optional>

namespace spdc {

/// How the longitudinal mismatch at q_s + q_i = 0 is formed.
enum class MismatchModel {
  /// k_p - k_sz(q) - k_iz(q) with the idler wavelength from energy
  /// conservation. Reduces to the degenerate form when lambda_s = 2 lambda_p.
  nondegenerate,
  /// k_p - 2 k_sz(q), treating the idler as a copy of the signal.
  degenerate,
};

/// Physical parameters of a Gaussian-pumped type-I BBO source.
/// Lengths in micrometres, angles in degrees.
struct CrystalPumpConfig {
  double lambda_p = 0.355;
  double lambda_s = 0.700;
  double length = 3000.0;
  double pump_waist = 185.0;  // 1/e^2 intensity radius
  double gain = 1.0;
  double theta_p = 32.7;
  double c1 = 1.0;
  /// Unset means calibrated so that Gamma * L == gain at beam centre for zero mismatch.
  std::optional<double> c2;
  MismatchModel mismatch = MismatchModel::nondegenerate;

  /// Throws Error{domain} on any violated invariant.
  void validate() const;
};

struct RefractiveIndices {
  double n_ord;
  double n_ext;
};

/// BBO dispersion, valid for 0.2 < lambda < 3 um.
RefractiveIndices sellmeier_indices(double lambda_um);

/// Index seen by the extraordinary pump at `theta_deg` from the optic axis.
double effective_pump_index(double theta_deg, double lambda_um);

/// 1/lambda_i = 1/lambda_p - 1/lambda_s.
double idler_wavelength(const CrystalPumpConfig& config);

/// Wavevector magnitudes (rad/um) of the three interacting fields.
struct Wavevectors {
  double k_p;
  double k_s;
  double k_i;

  /// sqrt(k_s^2 - q^2); throws Error{evanescent} for |q| >= k_s.
  double k_sz(double q) const;
  /// Idler longitudinal component under q_i = -q_s.
  double k_iz_bar(double q) const;
};

Wavevectors wavevectors(const CrystalPumpConfig& config);

/// Pump angle (deg) giving collinear phase matching, found by bisection on [0, 90].
double collinear_angle(const CrystalPumpConfig& config);

double longitudinal_mismatch(double q, const CrystalPumpConfig& config);
double longitudinal_mismatch(double q, const CrystalPumpConfig& config, const Wavevectors& k);

/// C2 in effect for `config` (explicit value or the centre calibration).
double gain_scale(const CrystalPumpConfig& config);

/// Gamma = sqrt(C2 |V_p|^2 / (k_sz k_iz) - (dk/2)^2), imaginary when the radicand is negative.
std::complex<double> parametric_rate(double delta_kz, double pump_intensity, double q,
                                     const CrystalPumpConfig& config);

/// sinh(Gamma L) / Gamma for real or purely imaginary Gamma.
double gain_kernel(std::complex<double> gamma, double length);

/// Same kernel written in terms of the radicand Gamma^2, which is always real.
double gain_kernel_from_square(double gamma_squared, double length);

}  // namespace spdc
