#include "spdc/correlation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>
#include <vector>

#include "spdc/error.hpp"
#include "spdc/quadrature.hpp"

namespace spdc {

namespace {

/// Per-sample quantities on the grid that do not depend on the radial rule.
struct SliceGeometry {
  Eigen::VectorXd mismatch;  // dk_z(q)
  Eigen::VectorXd k_sz;
  Eigen::VectorXd k_iz;
  double dq = 0.0;           // wavevector step between neighbouring samples
};

SliceGeometry slice_geometry(const CrystalPumpConfig& config, const WavevectorGrid& grid) {
  const Wavevectors k = wavevectors(config);
  SliceGeometry geo;
  const int n = grid.n_points;
  geo.mismatch.resize(n);
  geo.k_sz.resize(n);
  geo.k_iz.resize(n);
  for (int i = 0; i < n; ++i) {
    const double q = grid.q(i, k.k_s);
    geo.k_sz(i) = k.k_sz(q);
    geo.k_iz(i) = k.k_iz_bar(q);
    geo.mismatch(i) = longitudinal_mismatch(q, config, k);
  }
  geo.dq = grid.pitch_mrad * 1e-3 * k.k_s;
  return geo;
}

/// Gain kernel K(q, rho) tabulated as (node, sample) plus the radial weight
/// 2 pi rho |V_p(rho)|^2 w_rho.
struct RadialTable {
  QuadratureRule rule;
  Eigen::MatrixXd kernel;  // nodes x samples
  Eigen::VectorXd weight;
};

RadialTable radial_table(const CrystalPumpConfig& config, const SliceGeometry& geo, int nodes,
                         double cutoff) {
  RadialTable t;
  t.rule = gauss_legendre(nodes, 0.0, cutoff);
  const double c2 = gain_scale(config);
  const double g2 = config.gain * config.gain;
  const double w2 = config.pump_waist * config.pump_waist;
  const int n = static_cast<int>(geo.mismatch.size());
  t.kernel.resize(nodes, n);
  t.weight.resize(nodes);
  for (int r = 0; r < nodes; ++r) {
    const double rho = t.rule.nodes(r);
    const double pump = g2 * std::exp(-2.0 * rho * rho / w2);
    t.weight(r) = t.rule.weights(r) * 2.0 * std::numbers::pi * rho * pump;
    for (int i = 0; i < n; ++i) {
      const double half_dk = 0.5 * geo.mismatch(i);
      const double gamma2 = c2 * pump / (geo.k_sz(i) * geo.k_iz(i)) - half_dk * half_dk;
      t.kernel(r, i) = gain_kernel_from_square(gamma2, config.length);
    }
  }
  return t;
}

struct SliceIntegral {
  Eigen::MatrixXd real;
  double imag_max = 0.0;
};

SliceIntegral integrate_slice(const CrystalPumpConfig& config, const SliceGeometry& geo,
                              int nodes, double cutoff) {
  const RadialTable t = radial_table(config, geo, nodes, cutoff);
  const int n = static_cast<int>(geo.mismatch.size());

  // J0 depends only on |a - b| on a uniform grid.
  Eigen::MatrixXd bessel_weight(nodes, n);
  for (int d = 0; d < n; ++d) {
    for (int r = 0; r < nodes; ++r) {
      bessel_weight(r, d) = std::cyl_bessel_j(0.0, d * geo.dq * t.rule.nodes(r)) * t.weight(r);
    }
  }

  SliceIntegral out{Eigen::MatrixXd(n, n)};
  for (int a = 0; a < n; ++a) {
    for (int b = a; b < n; ++b) {
      const double radial =
          (t.kernel.col(a).cwiseProduct(t.kernel.col(b))).dot(bessel_weight.col(b - a));
      const double phase = 0.5 * (geo.mismatch(a) - geo.mismatch(b)) * config.length;
      const double scale = config.c1 / (geo.k_sz(a) * geo.k_sz(b));
      const double value = scale * radial * std::cos(phase);
      out.real(a, b) = value;
      out.real(b, a) = value;
      out.imag_max = std::max(out.imag_max, std::abs(scale * radial * std::sin(phase)));
    }
  }
  return out;
}

Eigen::VectorXd integrate_diagonal(const CrystalPumpConfig& config, const SliceGeometry& geo,
                                   int nodes, double cutoff) {
  const RadialTable t = radial_table(config, geo, nodes, cutoff);
  const int n = static_cast<int>(geo.mismatch.size());
  Eigen::VectorXd out(n);
  for (int a = 0; a < n; ++a) {
    out(a) = config.c1 / (geo.k_sz(a) * geo.k_sz(a)) *
             t.kernel.col(a).cwiseAbs2().dot(t.weight);
  }
  return out;
}

double relative_change(const Eigen::MatrixXd& prev, const Eigen::MatrixXd& next) {
  const double scale = next.cwiseAbs().maxCoeff();
  if (scale == 0.0) return 0.0;
  return (next - prev).cwiseAbs().maxCoeff() / scale;
}

/// Doubles the node count until two successive estimates agree.
template <typename Evaluate>
auto converge(const QuadratureSettings& quad, Evaluate&& evaluate, int& nodes_used) {
  if (quad.initial_nodes < 2 || quad.max_nodes < quad.initial_nodes) {
    throw Error(ErrorKind::domain, "invalid quadrature node limits");
  }
  int nodes = quad.initial_nodes;
  auto prev = evaluate(nodes);
  double change = 0.0;
  while (nodes * 2 <= quad.max_nodes) {
    nodes *= 2;
    auto next = evaluate(nodes);
    change = relative_change(prev.matrix(), next.matrix());
    prev = std::move(next);
    if (change <= quad.rel_tol) {
      nodes_used = nodes;
      return prev;
    }
  }
  throw AccuracyError("radial quadrature did not converge: relative change " +
                          std::to_string(change) + " at " + std::to_string(nodes) + " nodes",
                      change);
}

}  // namespace

CorrelationMatrix g1_slice(const CrystalPumpConfig& config, const WavevectorGrid& grid,
                           const QuadratureSettings& quad) {
  config.validate();
  grid.validate();
  const SliceGeometry geo = slice_geometry(config, grid);
  const double cutoff = quad.cutoff_waists * config.pump_waist;

  double imag_max = 0.0;
  CorrelationMatrix out;
  out.grid = grid;
  out.provenance = Provenance::theory;
  out.values = converge(
      quad,
      [&](int nodes) {
        SliceIntegral s = integrate_slice(config, geo, nodes, cutoff);
        imag_max = s.imag_max;
        return s.real;
      },
      out.radial_nodes);
  const double peak = out.values.cwiseAbs().maxCoeff();
  out.imag_residual = peak > 0 ? imag_max / peak : 0.0;
  return out;
}

IntensityProfile far_field_intensity(const CrystalPumpConfig& config, const WavevectorGrid& grid,
                                     const QuadratureSettings& quad) {
  config.validate();
  grid.validate();
  const SliceGeometry geo = slice_geometry(config, grid);
  const double cutoff = quad.cutoff_waists * config.pump_waist;
  int nodes = 0;
  IntensityProfile out;
  out.grid = grid;
  out.values = converge(
      quad, [&](int n) { return integrate_diagonal(config, geo, n, cutoff); }, nodes);
  return out;
}

double CoherenceProfile::max_spread() const {
  double worst = 0.0;
  for (Eigen::Index d = 0; d < spread.size(); ++d) {
    if (pair_count(d) > 0) worst = std::max(worst, spread(d));
  }
  return worst;
}

CoherenceProfile coherence_degree(const CorrelationMatrix& corr, double support_fraction) {
  const Eigen::MatrixXd& g = corr.values;
  const Eigen::Index n = g.rows();
  const Eigen::VectorXd intensity = g.diagonal();
  const double threshold = support_fraction * intensity.maxCoeff();

  std::vector<bool> supported(n);
  bool any = false;
  for (Eigen::Index i = 0; i < n; ++i) {
    supported[i] = intensity(i) > threshold && intensity(i) > 0;
    any = any || supported[i];
  }
  if (!any) throw Error(ErrorKind::degenerate_input, "no sample above the support threshold");

  CoherenceProfile out;
  out.support_threshold = threshold;
  out.degree = Eigen::VectorXd::Zero(n);
  out.spread = Eigen::VectorXd::Zero(n);
  out.pair_count = Eigen::VectorXi::Zero(n);
  Eigen::VectorXd lo = Eigen::VectorXd::Constant(n, std::numeric_limits<double>::infinity());
  Eigen::VectorXd hi = -lo;

  for (Eigen::Index a = 0; a < n; ++a) {
    if (!supported[a]) continue;
    for (Eigen::Index b = 0; b < n; ++b) {
      if (!supported[b]) continue;
      const Eigen::Index d = std::abs(a - b);
      const double value = g(a, b) / std::sqrt(intensity(a) * intensity(b));
      out.degree(d) += value;
      out.pair_count(d) += 1;
      lo(d) = std::min(lo(d), value);
      hi(d) = std::max(hi(d), value);
    }
  }
  for (Eigen::Index d = 0; d < n; ++d) {
    if (out.pair_count(d) == 0) continue;
    out.degree(d) /= out.pair_count(d);
    out.spread(d) = std::max(hi(d) - out.degree(d), out.degree(d) - lo(d));
  }
  return out;
}

CorrelationMatrix gaussian_schell_matrix(const WavevectorGrid& grid, double intensity_rms_mrad,
                                         double coherence_rms_mrad) {
  grid.validate();
  const int n = grid.n_points;
  Eigen::VectorXd amplitude(n);
  for (int i = 0; i < n; ++i) {
    const double t = grid.angle_mrad(i) / intensity_rms_mrad;
    amplitude(i) = std::exp(-0.25 * t * t);  // sqrt of exp(-t^2 / 2)
  }
  CorrelationMatrix out;
  out.grid = grid;
  out.values.resize(n, n);
  for (int a = 0; a < n; ++a) {
    for (int b = 0; b < n; ++b) {
      const double d = (grid.angle_mrad(a) - grid.angle_mrad(b)) / coherence_rms_mrad;
      out.values(a, b) = amplitude(a) * amplitude(b) * std::exp(-0.5 * d * d);
    }
  }
  return out;
}

double total_intensity(const IntensityProfile& profile) { return profile.values.sum(); }

}  // namespace spdc
