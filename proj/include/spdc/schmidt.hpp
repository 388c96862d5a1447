#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "spdc/correlation.hpp"
#include "spdc/eigensolver.hpp"
#include "spdc/error.hpp"
#include "spdc/grid.hpp"
#include "spdc/types.hpp"

namespace spdc {

/// Eigenvalues below this fraction of the largest one are set to zero.
inline constexpr double kEigenClampFraction = 1e-12;

/// Coherent-mode decomposition of a 1D correlation slice.
/// Columns of `modes` are orthonormal; `mu` is non-increasing and non-negative.
/// Modes inside a degenerate cluster of `mu` are only defined up to a rotation
/// of that cluster; compare them with subspace projectors.
template <typename Scalar>
struct OneDDecomposition {
  Vec<Scalar> mu;
  Mat<Scalar> modes;
  WavevectorGrid grid;
  /// Sum of |mu| over eigenvalues that came out negative before clamping.
  Scalar clamped_negative = 0;
};

struct IndexPair {
  int i = 0;
  int j = 0;

  friend bool operator==(const IndexPair&, const IndexPair&) = default;
};

template <typename Scalar>
struct SchmidtSpectrum {
  /// Leading products mu_i mu_j, normalised over the full (untruncated) set.
  Vec<Scalar> lambda;
  std::vector<IndexPair> pairs;
  /// 1 / sum lambda^2 over the full normalised set.
  Scalar schmidt_number = 0;
};

struct SchmidtMetrics {
  double schmidt_number = 0.0;
  /// FWHM (mrad) of the magnitude of the leading 2D modes, NaN where not measurable.
  std::vector<double> mode_fwhm_mrad;
};

template <typename Scalar>
struct SchmidtResult {
  SchmidtSpectrum<Scalar> spectrum;
  OneDDecomposition<Scalar> one_d;
  SchmidtMetrics metrics;
};

template <typename Scalar>
OneDDecomposition<Scalar> diagonalize_1d(const Mat<Scalar>& g, const WavevectorGrid& grid) {
  if (g.rows() != g.cols() || g.rows() == 0) {
    throw Error(ErrorKind::data, "correlation matrix must be square and non-empty");
  }
  if (!g.allFinite()) throw Error(ErrorKind::data, "correlation matrix has non-finite entries");
  const Scalar norm = g.norm();
  const Scalar asym = (g - g.transpose()).norm();
  if (norm > 0 && asym > Scalar(1e-8) * norm) {
    throw Error(ErrorKind::contract, "correlation matrix is not symmetric (relative asymmetry " +
                                         std::to_string(double(asym / norm)) + ")");
  }
  const Mat<Scalar> sym = (g + g.transpose()) / Scalar(2);
  SymmetricEigen<Scalar> eig = symmetric_eigen<Scalar>(sym);

  const Eigen::Index n = g.rows();
  OneDDecomposition<Scalar> out;
  out.grid = grid;
  out.mu = eig.values.reverse();
  out.modes = eig.vectors.rowwise().reverse();

  const Scalar top = std::max(out.mu(0), Scalar(0));
  for (Eigen::Index i = 0; i < n; ++i) {
    if (out.mu(i) < 0) out.clamped_negative += -out.mu(i);
    if (out.mu(i) < Scalar(kEigenClampFraction) * top) out.mu(i) = 0;
  }
  for (Eigen::Index i = 0; i < n; ++i) {
    Eigen::Index arg = 0;
    out.modes.col(i).cwiseAbs().maxCoeff(&arg);
    if (out.modes(arg, i) < 0) out.modes.col(i) *= Scalar(-1);
  }
  return out;
}

inline OneDDecomposition<double> diagonalize_1d(const CorrelationMatrix& corr) {
  return diagonalize_1d<double>(corr.values, corr.grid);
}

/// Rebuilds sum_i mu_i v_i v_i^T.
template <typename Scalar>
Mat<Scalar> reconstruct(const OneDDecomposition<Scalar>& d) {
  return d.modes * d.mu.asDiagonal() * d.modes.transpose();
}

/// K = 1 / sum lambda^2 for a spectrum that sums to one.
template <typename Derived>
typename Derived::Scalar schmidt_number(const Eigen::MatrixBase<Derived>& lambda) {
  using Scalar = typename Derived::Scalar;
  const Scalar total = lambda.sum();
  if (!(std::abs(total - Scalar(1)) <= Scalar(1e-9))) {
    throw Error(ErrorKind::contract,
                "spectrum must be normalised (sum = " + std::to_string(double(total)) + ")");
  }
  return Scalar(1) / lambda.squaredNorm();
}

/// Schmidt number of the 1D spectrum after normalising it.
template <typename Derived>
typename Derived::Scalar schmidt_number_1d(const Eigen::MatrixBase<Derived>& mu) {
  const auto total = mu.sum();
  if (!(total > 0)) throw Error(ErrorKind::degenerate_input, "spectrum is identically zero");
  return schmidt_number((mu / total).eval());
}

/// Products mu_i mu_j sorted by descending value, then ascending i + j, then
/// ascending i; truncated to `n_keep`.
template <typename Scalar>
SchmidtSpectrum<Scalar> tensor_spectrum(const OneDDecomposition<Scalar>& one_d, int n_keep) {
  const auto n = static_cast<int>(one_d.mu.size());
  if (n_keep < 0 || static_cast<long long>(n_keep) > static_cast<long long>(n) * n) {
    throw Error(ErrorKind::contract, "n_keep must lie in [0, n^2]");
  }
  const Scalar total = one_d.mu.sum();
  if (!(total > 0)) throw Error(ErrorKind::degenerate_input, "spectrum is identically zero");

  struct Entry {
    Scalar value;
    int i;
    int j;
  };
  std::vector<Entry> all;
  all.reserve(static_cast<std::size_t>(n) * n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) all.push_back({one_d.mu(i) * one_d.mu(j), i, j});
  }
  std::sort(all.begin(), all.end(), [](const Entry& a, const Entry& b) {
    if (a.value != b.value) return a.value > b.value;
    if (a.i + a.j != b.i + b.j) return a.i + a.j < b.i + b.j;
    return a.i < b.i;
  });

  const Scalar norm = total * total;
  Scalar sum_sq = 0;
  for (const Entry& e : all) {
    const Scalar l = e.value / norm;
    sum_sq += l * l;
  }

  SchmidtSpectrum<Scalar> out;
  out.schmidt_number = Scalar(1) / sum_sq;
  out.lambda.resize(n_keep);
  out.pairs.resize(n_keep);
  for (int k = 0; k < n_keep; ++k) {
    out.lambda(k) = all[k].value / norm;
    out.pairs[k] = {all[k].i, all[k].j};
  }
  return out;
}

/// u(x, y) = v_i(x) v_j(y), stored with x along rows; unit Frobenius norm.
template <typename Scalar>
Mat<Scalar> tensor_mode(const OneDDecomposition<Scalar>& one_d, int i, int j) {
  const auto n = static_cast<int>(one_d.modes.cols());
  if (i < 0 || j < 0 || i >= n || j >= n) throw Error(ErrorKind::contract, "mode index out of range");
  Mat<Scalar> u = one_d.modes.col(i) * one_d.modes.col(j).transpose();
  const Scalar norm = u.norm();
  if (norm > 0) u /= norm;
  return u;
}

namespace detail {

/// Half-maximum crossing on one side of `peak`, by linear interpolation.
/// Returns a fractional sample index.
template <typename Scalar>
double half_max_crossing(const Vec<Scalar>& p, Eigen::Index peak, double half, int step) {
  Eigen::Index i = peak;
  while (true) {
    const Eigen::Index next = i + step;
    if (next < 0 || next >= p.size()) {
      throw Error(ErrorKind::not_measurable, "profile never drops to half maximum");
    }
    if (double(p(next)) <= half) {
      const double above = double(p(i));
      const double below = double(p(next));
      const double frac = (above - half) / (above - below);
      return double(i) + step * frac;
    }
    i = next;
  }
}

}  // namespace detail

/// Full width at half maximum (mrad) of a magnitude profile.
template <typename Scalar>
double mode_fwhm(const Vec<Scalar>& profile, const WavevectorGrid& grid) {
  const Vec<Scalar> p = profile.cwiseAbs();
  if (p.size() < 3) throw Error(ErrorKind::not_measurable, "profile too short");
  Eigen::Index peak = 0;
  const Scalar top = p.maxCoeff(&peak);
  if (!(top > 0)) throw Error(ErrorKind::not_measurable, "profile is zero");
  if (peak == 0 || peak == p.size() - 1) {
    throw Error(ErrorKind::not_measurable, "maximum lies on the grid edge");
  }
  for (Eigen::Index i = 0; i < p.size(); ++i) {
    if (i != peak && p(i) == top) throw Error(ErrorKind::not_measurable, "maximum is not unique");
  }
  const double half = 0.5 * double(top);
  const double left = detail::half_max_crossing(p, peak, half, -1);
  const double right = detail::half_max_crossing(p, peak, half, +1);
  return (right - left) * grid.pitch_mrad;
}

/// 2D variant: measured along the row (fixed x) through the global maximum.
template <typename Scalar>
double mode_fwhm(const Mat<Scalar>& mode, const WavevectorGrid& grid) {
  Eigen::Index row = 0;
  Eigen::Index col = 0;
  mode.cwiseAbs().maxCoeff(&row, &col);
  return mode_fwhm<Scalar>(Vec<Scalar>(mode.row(row).transpose()), grid);
}

/// Spectrum plus K and the widths of the first `n_fwhm` 2D modes.
template <typename Scalar>
SchmidtResult<Scalar> schmidt_analysis(OneDDecomposition<Scalar> one_d, int n_keep, int n_fwhm = 4) {
  SchmidtResult<Scalar> out;
  out.spectrum = tensor_spectrum(one_d, n_keep);
  out.metrics.schmidt_number = double(out.spectrum.schmidt_number);
  const int shown = std::min<int>(n_fwhm, static_cast<int>(out.spectrum.pairs.size()));
  for (int k = 0; k < shown; ++k) {
    const IndexPair p = out.spectrum.pairs[k];
    double width = std::numeric_limits<double>::quiet_NaN();
    try {
      width = mode_fwhm<Scalar>(tensor_mode(one_d, p.i, p.j), one_d.grid);
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::not_measurable) throw;
    }
    out.metrics.mode_fwhm_mrad.push_back(width);
  }
  out.one_d = std::move(one_d);
  return out;
}

}  // namespace spdc
