#include "spdc/optics.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "spdc/error.hpp"

namespace spdc {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double deg_to_rad(double deg) { return deg * std::numbers::pi / 180.0; }

void require(bool ok, const std::string& what) {
  if (!ok) throw Error(ErrorKind::domain, what);
}

}  // namespace

void CrystalPumpConfig::validate() const {
  require(lambda_p > 0 && lambda_s > 0, "wavelengths must be positive");
  require(lambda_s > lambda_p, "signal wavelength must exceed pump wavelength");
  require(length > 0, "crystal length must be positive");
  require(pump_waist > 0, "pump waist must be positive");
  require(gain >= 0, "pump amplitude must be non-negative");
  require(theta_p > 0 && theta_p < 90, "pump angle must lie in (0, 90) degrees");
  require(c1 > 0, "C1 must be positive");
  require(!c2 || *c2 >= 0, "C2 must be non-negative");
}

RefractiveIndices sellmeier_indices(double lambda_um) {
  if (!(lambda_um > 0.2 && lambda_um < 3.0)) {
    throw Error(ErrorKind::domain,
                "wavelength " + std::to_string(lambda_um) + " um outside dispersion window (0.2, 3)");
  }
  const double l2 = lambda_um * lambda_um;
  // The ordinary branch is the one with the larger index (negative uniaxial BBO).
  const double n_ord2 = 2.7405 + 0.0184 / (l2 - 0.0179) - 0.0155 * l2;
  const double n_ext2 = 2.3730 + 0.0128 / (l2 - 0.0156) - 0.0044 * l2;
  return {std::sqrt(n_ord2), std::sqrt(n_ext2)};
}

double effective_pump_index(double theta_deg, double lambda_um) {
  if (!(theta_deg >= 0.0 && theta_deg <= 90.0)) {
    throw Error(ErrorKind::domain, "pump angle outside [0, 90] degrees");
  }
  const auto [n_o, n_e] = sellmeier_indices(lambda_um);
  const double t = deg_to_rad(theta_deg);
  const double s = std::sin(t);
  const double c = std::cos(t);
  return n_e * n_o / std::sqrt(n_o * n_o * s * s + n_e * n_e * c * c);
}

double idler_wavelength(const CrystalPumpConfig& config) {
  const double inv = 1.0 / config.lambda_p - 1.0 / config.lambda_s;
  if (!(inv > 0)) throw Error(ErrorKind::phase_matching, "idler wavelength is not finite");
  return 1.0 / inv;
}

double Wavevectors::k_sz(double q) const {
  if (!(std::abs(q) < k_s)) {
    throw Error(ErrorKind::evanescent, "transverse wavevector " + std::to_string(q) +
                                           " rad/um is not below |k_s| = " + std::to_string(k_s));
  }
  return std::sqrt(k_s * k_s - q * q);
}

double Wavevectors::k_iz_bar(double q) const {
  if (!(std::abs(q) < k_i)) {
    throw Error(ErrorKind::evanescent, "idler wavevector is evanescent at q = " + std::to_string(q));
  }
  return std::sqrt(k_i * k_i - q * q);
}

Wavevectors wavevectors(const CrystalPumpConfig& config) {
  Wavevectors k{};
  k.k_p = kTwoPi * effective_pump_index(config.theta_p, config.lambda_p) / config.lambda_p;
  k.k_s = kTwoPi * sellmeier_indices(config.lambda_s).n_ord / config.lambda_s;
  if (config.mismatch == MismatchModel::degenerate) {
    k.k_i = k.k_s;
  } else {
    const double lambda_i = idler_wavelength(config);
    k.k_i = kTwoPi * sellmeier_indices(lambda_i).n_ord / lambda_i;
  }
  return k;
}

double collinear_angle(const CrystalPumpConfig& config) {
  if (!(config.lambda_s > config.lambda_p)) {
    throw Error(ErrorKind::phase_matching, "no down-conversion for lambda_s <= lambda_p");
  }
  const double lambda_i = idler_wavelength(config);
  const double target = sellmeier_indices(config.lambda_s).n_ord / config.lambda_s +
                        sellmeier_indices(lambda_i).n_ord / lambda_i;
  auto residual = [&](double theta) {
    return effective_pump_index(theta, config.lambda_p) / config.lambda_p - target;
  };

  double lo = 0.0;
  double hi = 90.0;
  double f_lo = residual(lo);
  const double f_hi = residual(hi);
  if (f_lo * f_hi > 0) {
    throw Error(ErrorKind::phase_matching, "collinear phase matching has no solution in [0, 90] deg");
  }
  while (hi - lo > 1e-6) {
    const double mid = 0.5 * (lo + hi);
    const double f_mid = residual(mid);
    if (f_mid == 0.0) return mid;
    if ((f_mid > 0) == (f_lo > 0)) {
      lo = mid;
      f_lo = f_mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

double longitudinal_mismatch(double q, const CrystalPumpConfig& config, const Wavevectors& k) {
  const double k_sz = k.k_sz(q);
  if (config.mismatch == MismatchModel::degenerate) return k.k_p - 2.0 * k_sz;
  return k.k_p - k_sz - k.k_iz_bar(q);
}

double longitudinal_mismatch(double q, const CrystalPumpConfig& config) {
  return longitudinal_mismatch(q, config, wavevectors(config));
}

double gain_scale(const CrystalPumpConfig& config) {
  if (config.c2) return *config.c2;
  const Wavevectors k = wavevectors(config);
  return k.k_sz(0.0) * k.k_iz_bar(0.0) / (config.length * config.length);
}

std::complex<double> parametric_rate(double delta_kz, double pump_intensity, double q,
                                     const CrystalPumpConfig& config) {
  const Wavevectors k = wavevectors(config);
  const double radicand = gain_scale(config) * pump_intensity / (k.k_sz(q) * k.k_iz_bar(q)) -
                          0.25 * delta_kz * delta_kz;
  if (radicand >= 0) return {std::sqrt(radicand), 0.0};
  return {0.0, std::sqrt(-radicand)};
}

double gain_kernel_from_square(double gamma_squared, double length) {
  const double z2 = gamma_squared * length * length;
  if (std::abs(z2) < 1e-8) return length * (1.0 + z2 / 6.0 + z2 * z2 / 120.0);
  if (z2 > 0) {
    const double z = std::sqrt(z2);
    return length * std::sinh(z) / z;
  }
  const double z = std::sqrt(-z2);
  return length * std::sin(z) / z;
}

double gain_kernel(std::complex<double> gamma, double length) {
  return gain_kernel_from_square((gamma * gamma).real(), length);
}

}  // namespace spdc
